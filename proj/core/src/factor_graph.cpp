#include "liftcomp/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

#include "liftcomp/error.hpp"

namespace liftcomp {

std::optional<std::size_t> RandomVariable::label_index(std::string_view label) const {
  auto it = std::find(range.begin(), range.end(), label);
  if (it == range.end()) return std::nullopt;
  return static_cast<std::size_t>(it - range.begin());
}

Factor::Factor(std::string name, std::vector<std::string> args, Shape shape, std::vector<double> table)
    : name_(std::move(name)), args_(std::move(args)), shape_(std::move(shape)), table_(std::move(table)) {
  if (args_.size() != shape_.size()) {
    throw ModelError("factor '" + name_ + "': " + std::to_string(args_.size()) + " args but shape of rank " +
                     std::to_string(shape_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& a : args_) {
    if (!seen.insert(a).second) throw ModelError("factor '" + name_ + "': argument '" + a + "' repeated");
  }
  const std::size_t expected = table_size(shape_);
  if (table_.size() != expected) {
    throw ModelError("factor '" + name_ + "': table has " + std::to_string(table_.size()) + " entries, expected " +
                     std::to_string(expected));
  }
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (!std::isfinite(table_[i]) || !(table_[i] > 0.0)) {
      throw ModelError("factor '" + name_ + "': table[" + std::to_string(i) + "] must be finite and > 0");
    }
  }
}

double Factor::at(std::span<const std::size_t> index) const {
  return table_[flat_index(index, row_major_strides(shape_))];
}

Factor Factor::with_table(std::vector<double> table) const { return Factor(name_, args_, shape_, std::move(table)); }

FactorGraph::FactorGraph(std::vector<RandomVariable> rvs, std::vector<Factor> factors)
    : rvs_(std::move(rvs)), factors_(std::move(factors)) {
  for (std::size_t i = 0; i < rvs_.size(); ++i) {
    const auto& rv = rvs_[i];
    if (rv.range.size() < 2) throw ModelError("rv '" + rv.name + "': range needs at least two labels");
    std::set<std::string_view> labels(rv.range.begin(), rv.range.end());
    if (labels.size() != rv.range.size()) throw ModelError("rv '" + rv.name + "': range labels must be distinct");
    if (!rv_lookup_.emplace(rv.name, i).second) throw ModelError("rv '" + rv.name + "' declared twice");
  }
  incidence_.resize(rvs_.size());
  scopes_.reserve(factors_.size());
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const auto& factor = factors_[f];
    if (!factor_lookup_.emplace(factor.name(), f).second) {
      throw ModelError("factor '" + factor.name() + "' declared twice");
    }
    std::vector<std::size_t> scope;
    for (std::size_t p = 0; p < factor.arity(); ++p) {
      auto it = rv_lookup_.find(factor.args()[p]);
      if (it == rv_lookup_.end()) {
        throw ModelError("factor '" + factor.name() + "': argument '" + factor.args()[p] + "' is not a declared rv");
      }
      if (factor.shape()[p] != rvs_[it->second].range.size()) {
        throw ModelError("factor '" + factor.name() + "': dimension " + std::to_string(p) +
                         " disagrees with range of '" + factor.args()[p] + "'");
      }
      scope.push_back(it->second);
      incidence_[it->second].push_back(f);
    }
    scopes_.push_back(std::move(scope));
  }
}

std::optional<std::size_t> FactorGraph::rv_index(std::string_view name) const {
  auto it = rv_lookup_.find(std::string(name));
  if (it == rv_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FactorGraph::factor_index(std::string_view name) const {
  auto it = factor_lookup_.find(std::string(name));
  if (it == factor_lookup_.end()) return std::nullopt;
  return it->second;
}

const RandomVariable& FactorGraph::rv(std::string_view name) const {
  auto idx = rv_index(name);
  if (!idx) throw ModelError("unknown rv '" + std::string(name) + "'");
  return rvs_[*idx];
}

Shape FactorGraph::rv_shape() const {
  Shape shape;
  shape.reserve(rvs_.size());
  for (const auto& rv : rvs_) shape.push_back(rv.range.size());
  return shape;
}

std::uint64_t FactorGraph::joint_state_count() const { return saturating_state_count(rv_shape()); }

std::vector<std::string> FactorGraph::isolated_rvs() const {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < rvs_.size(); ++r) {
    if (incidence_[r].empty()) out.push_back(rvs_[r].name);
  }
  return out;
}

FactorGraph FactorGraph::with_tables(const std::vector<std::vector<double>>& tables) const {
  if (tables.size() != factors_.size()) throw ModelError("with_tables: one table per factor required");
  std::vector<Factor> factors;
  factors.reserve(factors_.size());
  for (std::size_t f = 0; f < factors_.size(); ++f) factors.push_back(factors_[f].with_table(tables[f]));
  return FactorGraph(rvs_, std::move(factors));
}

Assignment FactorGraph::assignment_from_labels(const std::map<std::string, std::string>& labels) const {
  Assignment a;
  a.values.reserve(rvs_.size());
  for (const auto& rv : rvs_) {
    auto it = labels.find(rv.name);
    if (it == labels.end()) throw ModelError("assignment is missing rv '" + rv.name + "'");
    auto idx = rv.label_index(it->second);
    if (!idx) throw ModelError("label '" + it->second + "' is not in the range of '" + rv.name + "'");
    a.values.push_back(*idx);
  }
  return a;
}

std::map<std::string, std::string> FactorGraph::labels(const Assignment& a) const {
  std::map<std::string, std::string> out;
  for (std::size_t r = 0; r < rvs_.size() && r < a.values.size(); ++r) out[rvs_[r].name] = rvs_[r].range.at(a.values[r]);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> FactorGraph::resolve(const Evidence& evidence) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::set<std::size_t> seen;
  for (const auto& obs : evidence) {
    auto r = rv_index(obs.rv);
    if (!r) throw ModelError("evidence names unknown rv '" + obs.rv + "'");
    auto v = rvs_[*r].label_index(obs.value);
    if (!v) throw ModelError("evidence value '" + obs.value + "' is not in the range of '" + obs.rv + "'");
    if (!seen.insert(*r).second) throw ModelError("rv '" + obs.rv + "' observed twice");
    out.emplace_back(*r, *v);
  }
  return out;
}

FactorGraph canonical_order(const FactorGraph& fg) {
  auto rvs = fg.rvs();
  std::sort(rvs.begin(), rvs.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  auto factors = fg.factors();
  std::sort(factors.begin(), factors.end(), [](const auto& a, const auto& b) { return a.name() < b.name(); });
  return FactorGraph(std::move(rvs), std::move(factors));
}

std::uint64_t enumeration_cap() {
  if (const char* env = std::getenv("LIFTCOMP_ENUM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultEnumerationCap;
}

void check_enumerable(std::uint64_t states, std::uint64_t cap, std::string_view what) {
  if (states > cap) {
    throw CapExceededError(std::string(what) + ": " + std::to_string(states) + " joint states exceed the cap of " +
                           std::to_string(cap) + " (set LIFTCOMP_ENUM_CAP to raise it)");
  }
}

namespace {

void check_complete(const FactorGraph& fg, const Assignment& a) {
  if (a.values.size() != fg.num_rvs()) {
    throw ModelError("assignment covers " + std::to_string(a.values.size()) + " of " + std::to_string(fg.num_rvs()) +
                     " rvs");
  }
  for (std::size_t r = 0; r < fg.num_rvs(); ++r) {
    if (a.values[r] >= fg.rvs()[r].range.size()) throw ModelError("assignment value out of range for '" + fg.rvs()[r].name + "'");
  }
}

double product_unchecked(const FactorGraph& fg, const std::vector<std::size_t>& values,
                         const std::vector<std::vector<std::size_t>>& strides) {
  double psi = 1.0;
  for (std::size_t f = 0; f < fg.num_factors(); ++f) {
    const auto& scope = fg.scope(f);
    std::size_t flat = 0;
    for (std::size_t p = 0; p < scope.size(); ++p) flat += values[scope[p]] * strides[f][p];
    psi *= fg.factors()[f].table()[flat];
  }
  return psi;
}

std::vector<std::vector<std::size_t>> all_strides(const FactorGraph& fg) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(fg.num_factors());
  for (const auto& f : fg.factors()) out.push_back(row_major_strides(f.shape()));
  return out;
}

}  // namespace

double eval_joint(const FactorGraph& fg, const Assignment& a) {
  check_complete(fg, a);
  return product_unchecked(fg, a.values, all_strides(fg));
}

double log_eval_joint(const FactorGraph& fg, const Assignment& a) {
  check_complete(fg, a);
  double acc = 0.0;
  for (std::size_t f = 0; f < fg.num_factors(); ++f) {
    const auto& scope = fg.scope(f);
    std::vector<std::size_t> idx(scope.size());
    for (std::size_t p = 0; p < scope.size(); ++p) idx[p] = a.values[scope[p]];
    acc += std::log(fg.factors()[f].at(idx));
  }
  return acc;
}

double partition_function(const FactorGraph& fg, std::uint64_t cap) {
  check_enumerable(fg.joint_state_count(), cap, "partition_function");
  const auto shape = fg.rv_shape();
  const auto strides = all_strides(fg);
  std::vector<std::size_t> values(shape.size(), 0);
  double z = 0.0;
  do {
    z += product_unchecked(fg, values, strides);
  } while (next_index(values, shape));
  return z;
}

double joint_probability(const FactorGraph& fg, const Assignment& a, std::uint64_t cap) {
  const double psi = eval_joint(fg, a);
  return psi / partition_function(fg, cap);
}

}  // namespace liftcomp
