#include "liftcomp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "liftcomp/acp.hpp"
#include "liftcomp/bounds.hpp"
#include "liftcomp/eacp.hpp"
#include "liftcomp/error.hpp"
#include "liftcomp/inference.hpp"

namespace liftcomp {

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ModelError("Rng::index needs a positive bound");
  const std::uint64_t max = std::mt19937_64::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v > limit);
  return v % n;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

void validate(const GenConfig& cfg) {
  if (cfg.k == 0) throw ModelError("k must be positive");
  if (!(cfg.x >= 0.0 && cfg.x <= 1.0)) throw ModelError("x must lie in [0, 1]");
  Epsilon{cfg.eps};
  if (cfg.chain_length && *cfg.chain_length < 1) throw ModelError("chain length must be positive");
  if (cfg.free) return;
  if (std::find(kGridK.begin(), kGridK.end(), cfg.k) == kGridK.end()) {
    throw ModelError("k = " + std::to_string(cfg.k) + " is outside the grid (pass free to allow it)");
  }
  if (std::find(kGridX.begin(), kGridX.end(), cfg.x) == kGridX.end()) {
    throw ModelError("x is outside the grid (pass free to allow it)");
  }
  if (std::find(kGridEps.begin(), kGridEps.end(), cfg.eps) == kGridEps.end()) {
    throw ModelError("eps is outside the grid (pass free to allow it)");
  }
}

namespace {

std::size_t floor_log2(std::size_t k) {
  std::size_t r = 0;
  while (k > 1) {
    k >>= 1;
    ++r;
  }
  return r;
}

// Decorrelates the generator, perturbation and query streams of one seed.
constexpr std::uint64_t kPerturbStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kQueryStream = 0xc2b2ae3d27d4eb4fULL;

}  // namespace

FactorGraph generate_fg(const GenConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const std::size_t len = cfg.chain_length ? *cfg.chain_length : 2 + rng.index(floor_log2(cfg.k) + 1);
  std::vector<std::vector<double>> base(len);
  for (auto& t : base) {
    t.resize(4);
    for (double& v : t) v = rng.uniform(0.1, 1.0);
  }
  const std::vector<std::string> boolean{"true", "false"};
  std::vector<RandomVariable> rvs{{"H", boolean}};
  std::vector<Factor> factors;
  for (std::size_t b = 1; b <= cfg.k; ++b) {
    const std::string prefix = "B" + std::to_string(b) + "_";
    for (std::size_t t = 1; t <= len; ++t) {
      rvs.push_back({prefix + std::to_string(t), boolean});
      const std::string left = t == 1 ? std::string("H") : prefix + std::to_string(t - 1);
      factors.emplace_back("f" + std::to_string(b) + "_" + std::to_string(t),
                           std::vector<std::string>{left, prefix + std::to_string(t)}, Shape{2, 2}, base[t - 1]);
    }
  }
  return FactorGraph(std::move(rvs), std::move(factors));
}

FactorGraph perturb(const FactorGraph& fg, const GenConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed ^ kPerturbStream);
  const std::size_t n = fg.num_factors();
  const auto chosen = static_cast<std::size_t>(std::ceil(cfg.x * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < chosen && i < n; ++i) {
    std::swap(order[i], order[i + rng.index(n - i)]);
  }
  double lo = 1.0 - cfg.eps;
  double hi = 1.0 + cfg.eps;
  if (cfg.guarantee_pairwise) {
    hi = std::sqrt(1.0 + cfg.eps);
    lo = 1.0 / hi;
  }
  std::vector<std::vector<double>> tables;
  for (const auto& f : fg.factors()) tables.push_back(f.table());
  for (std::size_t i = 0; i < std::min(chosen, n); ++i) {
    for (double& v : tables[order[i]]) v *= rng.uniform(lo, hi);
  }
  return fg.with_tables(tables);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Best of a few repetitions, to damp scheduler noise on tiny models.
template <typename Fn>
double time_ms(Fn&& fn, int reps = 3) {
  double best = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    fn();
    const double t = ms_since(start);
    best = r == 0 ? t : std::min(best, t);
  }
  return best;
}

}  // namespace

ExperimentRecord run_experiment(const GenConfig& cfg, std::size_t n_queries, const ExperimentOptions& options) {
  ExperimentRecord rec;
  rec.config = cfg;
  const FactorGraph m = perturb(generate_fg(cfg), cfg);
  const Epsilon eps{cfg.eps};
  rec.n_rvs = m.num_rvs();
  rec.n_factors = m.num_factors();

  AcpResult acp;
  rec.t_acp_ms = time_ms([&] { acp = run_acp(m); }, 1);
  CompressionResult cr;
  rec.t_eacp_ms = time_ms([&] { cr = run_eacp(m, eps); }, 1);
  rec.n_groups = cr.grouping.groups.size();
  rec.n_groups_acp = acp.colours.factor_groups.groups.size();
  rec.compression_ratio = static_cast<double>(rec.n_factors) / static_cast<double>(rec.n_groups);
  rec.bound_tight = bound_tight(rec.n_factors, eps);

  if (!options.skip_exact && m.joint_state_count() <= enumeration_cap()) {
    rec.d_exact = distance_exact(m, cr.m_prime).d_exact;
  }

  Rng rng(cfg.seed ^ kQueryStream);
  for (std::size_t i = 0; i < n_queries; ++i) {
    QueryRecord qr;
    qr.index = i;
    const std::size_t target = rng.index(m.num_rvs());
    Query q;
    q.target = m.rvs()[target].name;
    q.value = m.rvs()[target].range[rng.index(m.rvs()[target].range.size())];
    const std::size_t n_ev = std::min<std::size_t>(rng.index(3), m.num_rvs() - 1);
    std::vector<std::size_t> others;
    for (std::size_t r = 0; r < m.num_rvs(); ++r) {
      if (r != target) others.push_back(r);
    }
    for (std::size_t e = 0; e < n_ev; ++e) {
      const std::size_t pick = e + rng.index(others.size() - e);
      std::swap(others[e], others[pick]);
      const auto& rv = m.rvs()[others[e]];
      q.evidence.push_back({rv.name, rv.range[rng.index(rv.range.size())]});
    }
    qr.target = q.target;
    qr.target_value = *q.value;
    qr.n_evidence = q.evidence.size();
    qr.p = query_ve(m, q).probability(*q.value);
    qr.p_prime = query_ve(cr.m_prime, q).probability(*q.value);
    qr.quotient = qr.p_prime / qr.p;
    const auto band = prob_envelope(qr.p, rec.bound_tight);
    qr.band_lo = band.first / qr.p;
    qr.band_hi = band.second / qr.p;
    rec.queries.push_back(std::move(qr));
  }

  const Query hub{"H", {}, std::nullopt};
  const FactorGraph grounded = ground(acp.pfg);
  rec.t_ground_query_ms = time_ms([&] { rec.ground_work = query_ve(grounded, hub).work; });
  rec.t_lifted_query_ms = time_ms([&] { rec.lifted_work = query_lifted_star(cr.pfg, "H", hub).work; });
  const double saved = rec.t_ground_query_ms - rec.t_lifted_query_ms;
  if (saved > 0.0) rec.alpha_substitute = (rec.t_eacp_ms - rec.t_acp_ms) / saved;
  return rec;
}

std::vector<ExperimentRecord> run_experiments(const std::vector<GenConfig>& configs, std::size_t n_queries,
                                              const ExperimentOptions& options, unsigned jobs) {
  std::vector<ExperimentRecord> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        out[i] = run_experiment(configs[i], n_queries, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "k",           "x",          "eps",            "seed",         "guarantee_pairwise", "n_rvs",
      "n_factors",   "n_groups",   "n_groups_acp",   "compression_ratio", "query_index",   "target",
      "target_value", "n_evidence", "p",             "p_prime",      "quotient",           "band_lo",
      "band_hi",     "d_exact",    "bound_tight",    "t_acp_ms",     "t_eacp_ms",          "t_ground_query_ms",
      "t_lifted_query_ms", "ground_work", "lifted_work", "alpha_substitute"};
  return cols;
}

std::string emit_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto& cols = csv_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << "\n";
  for (const auto& r : records) {
    for (const auto& q : r.queries) {
      os << r.config.k << ',' << r.config.x << ',' << r.config.eps << ',' << r.config.seed << ','
         << (r.config.guarantee_pairwise ? 1 : 0) << ',' << r.n_rvs << ',' << r.n_factors << ',' << r.n_groups << ','
         << r.n_groups_acp << ',' << r.compression_ratio << ',' << q.index << ',' << q.target << ','
         << q.target_value << ',' << q.n_evidence << ',' << q.p << ',' << q.p_prime << ',' << q.quotient << ','
         << q.band_lo << ',' << q.band_hi << ',';
      if (r.d_exact) os << *r.d_exact;
      os << ',' << r.bound_tight << ',' << r.t_acp_ms << ',' << r.t_eacp_ms << ',' << r.t_ground_query_ms << ','
         << r.t_lifted_query_ms << ',' << r.ground_work << ',' << r.lifted_work << ',';
      if (r.alpha_substitute) os << *r.alpha_substitute;
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace liftcomp
