#include "liftcomp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "liftcomp/error.hpp"

namespace liftcomp {

namespace {

struct LogModel {
  std::vector<std::vector<double>> log_tables;
  std::vector<std::vector<std::size_t>> strides;
};

LogModel log_model(const FactorGraph& fg) {
  LogModel lm;
  for (std::size_t f = 0; f < fg.num_factors(); ++f) {
    const Factor& factor = fg.factors()[f];
    std::vector<double> logs(factor.table().size());
    for (std::size_t r = 0; r < logs.size(); ++r) logs[r] = std::log(factor.table()[r]);
    lm.log_tables.push_back(std::move(logs));
    lm.strides.push_back(row_major_strides(factor.shape()));
  }
  return lm;
}

double log_psi(const FactorGraph& fg, const LogModel& lm, const std::vector<std::size_t>& rv_map,
               const std::vector<std::size_t>& values) {
  double sum = 0.0;
  for (std::size_t f = 0; f < fg.num_factors(); ++f) {
    const auto& scope = fg.scope(f);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < scope.size(); ++j) idx += values[rv_map[scope[j]]] * lm.strides[f][j];
    sum += lm.log_tables[f][idx];
  }
  return sum;
}

struct Extremes {
  double max_log = -std::numeric_limits<double>::infinity();
  double min_log = std::numeric_limits<double>::infinity();
  std::uint64_t argmax = 0;
  std::uint64_t argmin = 0;
};

std::vector<std::size_t> decode(std::uint64_t flat, const Shape& shape) {
  std::vector<std::size_t> v(shape.size(), 0);
  for (std::size_t d = shape.size(); d-- > 0;) {
    v[d] = static_cast<std::size_t>(flat % shape[d]);
    flat /= shape[d];
  }
  return v;
}

}  // namespace

DistanceReport distance_exact(const FactorGraph& m1, const FactorGraph& m2, unsigned threads, std::uint64_t cap) {
  if (m1.num_rvs() != m2.num_rvs()) throw ModelError("distance: models declare different numbers of rvs");
  // m2's rv r sits at position map2[r] of m1's order.
  std::vector<std::size_t> map1(m1.num_rvs()), map2(m2.num_rvs());
  for (std::size_t r = 0; r < m1.num_rvs(); ++r) map1[r] = r;
  for (std::size_t r = 0; r < m2.num_rvs(); ++r) {
    const auto& rv = m2.rvs()[r];
    auto idx = m1.rv_index(rv.name);
    if (!idx || m1.rvs()[*idx].range != rv.range) {
      throw ModelError("distance: rv '" + rv.name + "' is missing or has a different range in the first model");
    }
    map2[r] = *idx;
  }
  const std::uint64_t states = m1.joint_state_count();
  check_enumerable(states, cap, "distance_exact");
  const Shape shape = m1.rv_shape();
  const LogModel lm1 = log_model(m1);
  const LogModel lm2 = log_model(m2);

  auto scan = [&](std::uint64_t begin, std::uint64_t end) {
    Extremes e;
    if (begin >= end) return e;
    auto values = decode(begin, shape);
    for (std::uint64_t flat = begin; flat < end; ++flat) {
      const double d = log_psi(m2, lm2, map2, values) - log_psi(m1, lm1, map1, values);
      if (d > e.max_log) {
        e.max_log = d;
        e.argmax = flat;
      }
      if (d < e.min_log) {
        e.min_log = d;
        e.argmin = flat;
      }
      next_index(values, shape);
    }
    return e;
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(states, 64))));
  std::vector<Extremes> parts(n_workers);
  if (n_workers == 1) {
    parts[0] = scan(0, states);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (states + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] { parts[w] = scan(std::min(states, w * chunk), std::min(states, (w + 1) * chunk)); });
    }
    for (auto& t : pool) t.join();
  }
  Extremes total;
  for (const auto& p : parts) {
    if (p.max_log > total.max_log) {
      total.max_log = p.max_log;
      total.argmax = p.argmax;
    }
    if (p.min_log < total.min_log) {
      total.min_log = p.min_log;
      total.argmin = p.argmin;
    }
  }
  DistanceReport rep;
  rep.d_exact = total.max_log - total.min_log;
  rep.max_ratio = std::exp(total.max_log);
  rep.min_ratio = std::exp(total.min_log);
  rep.argmax_assignment.values = decode(total.argmax, shape);
  rep.argmin_assignment.values = decode(total.argmin, shape);
  return rep;
}

double bound_general(std::size_t m, Epsilon eps) {
  if (m == 0) throw ModelError("bound: m must be at least 1");
  return static_cast<double>(m) * (std::log1p(eps.value()) - std::log1p(-eps.value()));
}

double bound_tight(std::size_t m, Epsilon eps) {
  if (m == 0) throw ModelError("bound: m must be at least 1");
  const double e = eps.value();
  const double md = static_cast<double>(m);
  return md * (std::log1p((md - 1.0) * e / md) + std::log1p(e) - std::log1p(e / md));
}

BoundSet bound_set(std::size_t m, Epsilon eps) {
  BoundSet b;
  b.m = m;
  b.eps = eps;
  b.d_general = bound_general(m, eps);
  b.d_tight = bound_tight(m, eps);
  const double md = static_cast<double>(m);
  b.alpha1 = (1.0 + eps.value() / md) / (1.0 + eps.value());
  b.alpha2 = 1.0 + (md - 1.0) * eps.value() / md;
  return b;
}

Interval odds_envelope(double d) {
  if (!(d >= 0.0)) throw ModelError("odds envelope: distance must be non-negative");
  return {std::exp(-d), std::exp(d)};
}

Interval prob_envelope(double p, double d) {
  if (!(p > 0.0 && p < 1.0)) throw ModelError("probability envelope: p must lie in (0, 1)");
  if (!(d >= 0.0)) throw ModelError("probability envelope: distance must be non-negative");
  const double lo = std::exp(-d);
  const double hi = std::exp(d);
  return {p * lo / (p * (lo - 1.0) + 1.0), p * hi / (p * (hi - 1.0) + 1.0)};
}

CorollaryEnvelopes corollary_envelopes(std::size_t m, Epsilon eps) {
  return {odds_envelope(bound_general(m, eps)), odds_envelope(bound_tight(m, eps))};
}

FactorGraph worst_case_fg(std::size_t m, Epsilon eps) {
  if (m < 2) throw ModelError("worst-case model needs m >= 2");
  const double inflate = 1.0 + eps.value();
  std::vector<std::string> range;
  for (std::size_t j = 1; j <= 2 * m; ++j) range.push_back("r" + std::to_string(j));
  std::vector<RandomVariable> rvs;
  std::vector<Factor> factors;
  for (std::size_t i = 1; i <= m; ++i) {
    const std::string rv = "R" + std::to_string(i);
    rvs.push_back({rv, range});
    std::vector<double> table;
    for (std::size_t j = 1; j <= 2 * m; ++j) {
      const double base = static_cast<double>(j);
      const bool inflated = j <= m ? j == i : j - m != i;
      table.push_back(inflated ? base * inflate : base);
    }
    factors.emplace_back("phi" + std::to_string(i), std::vector<std::string>{rv}, Shape{2 * m}, std::move(table));
  }
  return FactorGraph(std::move(rvs), std::move(factors));
}

}  // namespace liftcomp
