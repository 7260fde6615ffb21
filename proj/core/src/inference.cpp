#include "liftcomp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "liftcomp/error.hpp"

namespace liftcomp {

const char* to_string(QueryMethod m) {
  switch (m) {
    case QueryMethod::enumeration:
      return "enumeration";
    case QueryMethod::variable_elimination:
      return "variable-elimination";
    case QueryMethod::lifted_star:
      return "lifted-star";
  }
  return "unknown";
}

double QueryResult::probability(const std::string& label) const {
  for (const auto& [l, p] : distribution) {
    if (l == label) return p;
  }
  throw ModelError("label '" + label + "' is not in the query target's range");
}

namespace {

struct QuerySetup {
  std::size_t target = 0;
  std::vector<std::optional<std::size_t>> fixed;  // per rv
};

QuerySetup setup(const FactorGraph& fg, const Query& q) {
  QuerySetup s;
  auto t = fg.rv_index(q.target);
  if (!t) throw ModelError("query target '" + q.target + "' is not a declared rv");
  s.target = *t;
  if (q.value && !fg.rvs()[s.target].label_index(*q.value)) {
    throw ModelError("query value '" + *q.value + "' is not in the range of '" + q.target + "'");
  }
  s.fixed.assign(fg.num_rvs(), std::nullopt);
  for (const auto& [r, v] : fg.resolve(q.evidence)) {
    if (r == s.target) throw ModelError("query target '" + q.target + "' is also observed");
    s.fixed[r] = v;
  }
  return s;
}

QueryResult normalised(const RandomVariable& rv, std::vector<double> mass, QueryMethod method, std::uint64_t work) {
  double z = 0.0;
  for (double m : mass) z += m;
  if (!(z > 0.0) || !std::isfinite(z)) throw ModelError("query has zero or non-finite total mass");
  QueryResult out;
  out.method = method;
  out.work = work;
  for (std::size_t v = 0; v < mass.size(); ++v) out.distribution.emplace_back(rv.range[v], mass[v] / z);
  return out;
}

// Dense table over an ordered list of variable ids, row-major.
struct Table {
  std::vector<std::size_t> vars;
  Shape card;
  std::vector<double> vals;
};

// Multiplies `tables` and sums out `var` (or nothing if var is unset).
Table multiply_sum(const std::vector<const Table*>& tables, std::optional<std::size_t> var, std::uint64_t& work) {
  std::vector<std::size_t> vars;
  Shape card;
  for (const Table* t : tables) {
    for (std::size_t k = 0; k < t->vars.size(); ++k) {
      if (std::find(vars.begin(), vars.end(), t->vars[k]) == vars.end()) {
        vars.push_back(t->vars[k]);
        card.push_back(t->card[k]);
      }
    }
  }
  // Keep the summed variable last so that output cells are contiguous.
  if (var) {
    auto it = std::find(vars.begin(), vars.end(), *var);
    if (it != vars.end()) {
      const std::size_t pos = static_cast<std::size_t>(it - vars.begin());
      const std::size_t c = card[pos];
      vars.erase(it);
      card.erase(card.begin() + static_cast<std::ptrdiff_t>(pos));
      vars.push_back(*var);
      card.push_back(c);
    } else {
      var.reset();
    }
  }
  std::vector<std::vector<std::size_t>> strides;
  for (const Table* t : tables) {
    const auto own = row_major_strides(t->card);
    std::vector<std::size_t> s(vars.size(), 0);
    for (std::size_t k = 0; k < t->vars.size(); ++k) {
      s[static_cast<std::size_t>(std::find(vars.begin(), vars.end(), t->vars[k]) - vars.begin())] = own[k];
    }
    strides.push_back(std::move(s));
  }
  Table out;
  out.vars = vars;
  out.card = card;
  const std::size_t inner = var ? card.back() : 1;
  if (var) {
    out.vars.pop_back();
    out.card.pop_back();
  }
  out.vals.assign(table_size(out.card), 0.0);
  std::vector<std::size_t> idx(vars.size(), 0);
  std::size_t flat = 0;
  do {
    double p = 1.0;
    for (std::size_t t = 0; t < tables.size(); ++t) p *= tables[t]->vals[flat_index(idx, strides[t])];
    out.vals[flat / inner] += p;
    ++flat;
  } while (next_index(idx, vars.empty() ? Shape{} : card));
  work += static_cast<std::uint64_t>(flat) * std::max<std::size_t>(tables.size(), 1);
  double hi = 0.0;
  for (double v : out.vals) hi = std::max(hi, v);
  if (hi > 0.0 && std::isfinite(hi)) {
    for (double& v : out.vals) v /= hi;
  }
  return out;
}

// Eliminates every variable in `tables` except `keep`; returns the table over keep.
std::vector<double> eliminate(std::vector<Table> tables, std::size_t keep, std::size_t keep_card,
                              std::vector<std::size_t> order, const std::function<std::string(std::size_t)>& name,
                              bool greedy, std::uint64_t& work) {
  std::set<std::size_t> remaining;
  for (const auto& t : tables) remaining.insert(t.vars.begin(), t.vars.end());
  remaining.erase(keep);
  std::size_t step = 0;
  while (!remaining.empty()) {
    std::size_t var;
    if (greedy) {
      std::optional<std::size_t> best;
      std::size_t best_deg = 0;
      for (std::size_t v : remaining) {
        std::set<std::size_t> nb;
        for (const auto& t : tables) {
          if (std::find(t.vars.begin(), t.vars.end(), v) != t.vars.end()) nb.insert(t.vars.begin(), t.vars.end());
        }
        nb.erase(v);
        const std::size_t deg = nb.size();
        if (!best || deg < best_deg || (deg == best_deg && name(v) < name(*best))) {
          best = v;
          best_deg = deg;
        }
      }
      var = *best;
    } else {
      while (step < order.size() && !remaining.count(order[step])) ++step;
      if (step == order.size()) throw ModelError("elimination order does not cover every rv");
      var = order[step++];
    }
    remaining.erase(var);
    std::vector<Table> rest;
    std::vector<Table> involved;
    for (auto& t : tables) {
      if (std::find(t.vars.begin(), t.vars.end(), var) != t.vars.end()) {
        involved.push_back(std::move(t));
      } else {
        rest.push_back(std::move(t));
      }
    }
    std::vector<const Table*> ptrs;
    for (const auto& t : involved) ptrs.push_back(&t);
    rest.push_back(multiply_sum(ptrs, var, work));
    tables = std::move(rest);
  }
  Table unit{{keep}, {keep_card}, std::vector<double>(keep_card, 1.0)};
  std::vector<const Table*> ptrs{&unit};
  for (const auto& t : tables) ptrs.push_back(&t);
  return multiply_sum(ptrs, std::nullopt, work).vals;
}

// Factor table restricted to the evidence; observed arguments are dropped.
Table restricted(const FactorGraph& fg, std::size_t f, const std::vector<std::optional<std::size_t>>& fixed,
                 std::uint64_t& work) {
  const Factor& factor = fg.factors()[f];
  const auto& scope = fg.scope(f);
  Table t;
  for (std::size_t j = 0; j < scope.size(); ++j) {
    if (!fixed[scope[j]]) {
      t.vars.push_back(scope[j]);
      t.card.push_back(factor.shape()[j]);
    }
  }
  if (t.vars.size() == scope.size()) {
    t.vals = factor.table();
    return t;
  }
  const auto strides = row_major_strides(factor.shape());
  t.vals.resize(table_size(t.card));
  std::vector<std::size_t> idx(t.vars.size(), 0);
  std::size_t flat = 0;
  do {
    std::size_t src = 0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < scope.size(); ++j) {
      src += (fixed[scope[j]] ? *fixed[scope[j]] : idx[k++]) * strides[j];
    }
    t.vals[flat++] = factor.table()[src];
  } while (next_index(idx, t.card));
  work += flat;
  return t;
}

}  // namespace

QueryResult query_enumerate(const FactorGraph& fg, const Query& q, std::uint64_t cap) {
  const QuerySetup s = setup(fg, q);
  Shape free_shape = fg.rv_shape();
  for (std::size_t r = 0; r < fg.num_rvs(); ++r) {
    if (s.fixed[r]) free_shape[r] = 1;
  }
  check_enumerable(saturating_state_count(free_shape), cap, "query_enumerate");
  std::vector<double> mass(fg.rvs()[s.target].range.size(), 0.0);
  std::vector<std::size_t> idx(fg.num_rvs(), 0);
  Assignment a;
  a.values.resize(fg.num_rvs());
  std::uint64_t work = 0;
  do {
    for (std::size_t r = 0; r < fg.num_rvs(); ++r) a.values[r] = s.fixed[r] ? *s.fixed[r] : idx[r];
    mass[a.values[s.target]] += eval_joint(fg, a);
    work += fg.num_factors();
  } while (next_index(idx, free_shape));
  return normalised(fg.rvs()[s.target], std::move(mass), QueryMethod::enumeration, work);
}

QueryResult query_ve(const FactorGraph& fg, const Query& q, const std::optional<std::vector<std::string>>& order) {
  const QuerySetup s = setup(fg, q);
  std::uint64_t work = 0;
  std::vector<Table> tables;
  for (std::size_t f = 0; f < fg.num_factors(); ++f) {
    Table t = restricted(fg, f, s.fixed, work);
    if (!t.vars.empty()) {
      tables.push_back(std::move(t));
    }
  }
  std::vector<std::size_t> ids;
  if (order) {
    for (const auto& n : *order) {
      auto r = fg.rv_index(n);
      if (!r) throw ModelError("elimination order names unknown rv '" + n + "'");
      ids.push_back(*r);
    }
  }
  auto name = [&](std::size_t r) { return fg.rvs()[r].name; };
  auto mass = eliminate(std::move(tables), s.target, fg.rvs()[s.target].range.size(), std::move(ids), name,
                        !order.has_value(), work);
  return normalised(fg.rvs()[s.target], std::move(mass), QueryMethod::variable_elimination, work);
}

namespace {

struct GroundView {
  std::vector<std::string> rv_names;
  std::vector<std::size_t> rv_class;
  std::vector<std::size_t> card;
  std::map<std::string, std::size_t> rv_id;
  struct GFactor {
    std::size_t parfactor;
    std::size_t member;
    std::vector<std::size_t> args;  // member argument order
    std::vector<std::size_t> frame_to_own;
  };
  std::vector<GFactor> factors;
  std::vector<std::vector<std::size_t>> incident;
};

GroundView ground_view(const ParfactorGraph& pfg) {
  GroundView g;
  for (std::size_t c = 0; c < pfg.rv_classes.size(); ++c) {
    for (const auto& n : pfg.rv_classes[c].members) {
      g.rv_id[n] = g.rv_names.size();
      g.rv_names.push_back(n);
      g.rv_class.push_back(c);
      g.card.push_back(pfg.rv_classes[c].range.size());
    }
  }
  g.incident.resize(g.rv_names.size());
  for (std::size_t p = 0; p < pfg.parfactors.size(); ++p) {
    for (std::size_t m = 0; m < pfg.parfactors[p].members.size(); ++m) {
      const auto& mem = pfg.parfactors[p].members[m];
      GroundView::GFactor gf{p, m, {}, mem.alignment.inverse().perm};
      for (const auto& a : mem.args) {
        auto it = g.rv_id.find(a);
        if (it == g.rv_id.end()) throw ModelError("parfactor member '" + mem.name + "' references unknown rv '" + a + "'");
        gf.args.push_back(it->second);
        g.incident[it->second].push_back(g.factors.size());
      }
      g.factors.push_back(std::move(gf));
    }
  }
  return g;
}

std::vector<double> member_table(const ParfactorGraph& pfg, const GroundView& g, std::size_t gf) {
  const auto& f = g.factors[gf];
  const Parfactor& pf = pfg.parfactors[f.parfactor];
  const Shape& rep_shape = pf.representative.shape();
  const std::vector<double> rep = pf.crv ? expand(*pf.crv, rep_shape) : pf.representative.table();
  Shape own;
  for (std::size_t a : f.args) own.push_back(g.card[a]);
  return from_reference_frame(rep, pf.members[f.member].alignment, rep_shape, own);
}

}  // namespace

QueryResult query_lifted_star(const ParfactorGraph& pfg, const std::string& hub, const Query& q) {
  if (q.target != hub) throw UnsupportedTopologyError("lifted star: the query target must be the hub");
  if (!q.evidence.empty()) throw UnsupportedTopologyError("lifted star: evidence is not supported");
  const GroundView g = ground_view(pfg);
  auto hub_it = g.rv_id.find(hub);
  if (hub_it == g.rv_id.end()) throw ModelError("lifted star: hub '" + hub + "' is not a declared rv");
  const std::size_t h = hub_it->second;
  if (q.value) {
    const auto& range = pfg.rv_classes[g.rv_class[h]].range;
    if (std::find(range.begin(), range.end(), *q.value) == range.end()) {
      throw ModelError("query value '" + *q.value + "' is not in the range of '" + hub + "'");
    }
  }
  const std::size_t nf = g.factors.size();
  auto touches_hub = [&](std::size_t f) {
    return std::find(g.factors[f].args.begin(), g.factors[f].args.end(), h) != g.factors[f].args.end();
  };

  // Branches: components of the graph without the hub, found from each
  // hub-attached factor.
  std::vector<std::size_t> hub_only;
  std::vector<bool> seen_factor(nf, false), seen_rv(g.rv_names.size(), false);
  seen_rv[h] = true;
  struct Branch {
    std::size_t root;
    std::vector<std::size_t> factors;
    std::vector<std::size_t> rvs;
  };
  std::vector<Branch> branches;
  for (std::size_t f = 0; f < nf; ++f) {
    if (!touches_hub(f) || seen_factor[f]) continue;
    if (g.factors[f].args.size() == 1) {
      hub_only.push_back(f);
      seen_factor[f] = true;
      continue;
    }
    Branch b{f, {}, {}};
    std::vector<std::size_t> stack{f};
    seen_factor[f] = true;
    std::size_t edges = 0;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      b.factors.push_back(cur);
      for (std::size_t a : g.factors[cur].args) {
        if (a == h) continue;
        ++edges;
        if (seen_rv[a]) continue;
        seen_rv[a] = true;
        b.rvs.push_back(a);
        for (std::size_t nb : g.incident[a]) {
          if (seen_factor[nb]) continue;
          if (touches_hub(nb)) throw UnsupportedTopologyError("lifted star: a branch is attached to the hub twice");
          seen_factor[nb] = true;
          stack.push_back(nb);
        }
      }
    }
    if (edges + 1 != b.factors.size() + b.rvs.size()) throw UnsupportedTopologyError("lifted star: a branch contains a cycle");
    branches.push_back(std::move(b));
  }
  for (std::size_t f = 0; f < nf; ++f) {
    if (!seen_factor[f]) throw UnsupportedTopologyError("lifted star: a factor is not connected to the hub");
  }

  // Rooted canonical encoding; arguments are listed in the parfactor frame.
  std::function<std::string(std::size_t, std::size_t)> enc_factor;
  std::function<std::string(std::size_t, std::size_t)> enc_rv = [&](std::size_t rv, std::size_t parent) {
    std::vector<std::string> kids;
    for (std::size_t nb : g.incident[rv]) {
      if (nb != parent) kids.push_back(enc_factor(nb, rv));
    }
    std::sort(kids.begin(), kids.end());
    std::string s = "v" + std::to_string(g.rv_class[rv]) + "(";
    for (const auto& k : kids) s += k + ",";
    return s + ")";
  };
  enc_factor = [&](std::size_t f, std::size_t parent) {
    const auto& gf = g.factors[f];
    std::string s = "f" + std::to_string(gf.parfactor) + "[";
    for (std::size_t own : gf.frame_to_own) {
      const std::size_t a = gf.args[own];
      s += a == h ? std::string("H") : a == parent ? std::string("P") : enc_rv(a, f);
      s += ";";
    }
    return s + "]";
  };
  std::map<std::string, std::pair<std::size_t, std::size_t>> classes;  // encoding -> (first branch, count)
  std::vector<std::string> class_order;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    auto key = enc_factor(branches[b].root, h);
    auto [it, inserted] = classes.emplace(key, std::make_pair(b, std::size_t{0}));
    if (inserted) class_order.push_back(key);
    ++it->second.second;
  }

  const std::size_t hub_card = g.card[h];
  std::vector<double> log_mass(hub_card, 0.0);
  std::uint64_t work = 0;
  for (const auto& key : class_order) {
    const auto [b, count] = classes.at(key);
    std::vector<Table> tables;
    for (std::size_t f : branches[b].factors) {
      Table t;
      t.vars = g.factors[f].args;
      for (std::size_t a : t.vars) t.card.push_back(g.card[a]);
      t.vals = member_table(pfg, g, f);
      tables.push_back(std::move(t));
    }
    auto name = [&](std::size_t r) { return g.rv_names[r]; };
    auto msg = eliminate(std::move(tables), h, hub_card, {}, name, true, work);
    for (std::size_t v = 0; v < hub_card; ++v) log_mass[v] += static_cast<double>(count) * std::log(msg[v]);
    work += hub_card;
  }
  std::map<std::size_t, std::size_t> hub_only_count;
  for (std::size_t f : hub_only) ++hub_only_count[g.factors[f].parfactor];
  for (const auto& [p, count] : hub_only_count) {
    const auto& vals = pfg.parfactors[p].crv ? expand(*pfg.parfactors[p].crv, pfg.parfactors[p].representative.shape())
                                             : pfg.parfactors[p].representative.table();
    for (std::size_t v = 0; v < hub_card; ++v) log_mass[v] += static_cast<double>(count) * std::log(vals[v]);
    work += hub_card;
  }
  const double top = *std::max_element(log_mass.begin(), log_mass.end());
  std::vector<double> mass(hub_card);
  for (std::size_t v = 0; v < hub_card; ++v) mass[v] = std::exp(log_mass[v] - top);
  RandomVariable rv{hub, pfg.rv_classes[g.rv_class[h]].range};
  return normalised(rv, std::move(mass), QueryMethod::lifted_star, work);
}

double quotient(const Query& q, const FactorGraph& m, const FactorGraph& m_prime) {
  if (!q.value) throw ModelError("quotient needs a target value");
  const double p = query_ve(m, q).probability(*q.value);
  const double p_prime = query_ve(m_prime, q).probability(*q.value);
  return p_prime / p;
}

}  // namespace liftcomp
