#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftcomp/shape.hpp"

namespace liftcomp {

struct RandomVariable {
  std::string name;
  std::vector<std::string> range;

  bool operator==(const RandomVariable&) const = default;

  std::optional<std::size_t> label_index(std::string_view label) const;
};

/// A factor over an ordered argument list with a dense, row-major table
/// (last argument fastest). The shape is carried along so that tables can be
/// compared without the owning graph.
class Factor {
 public:
  Factor() = default;
  /// Throws ModelError unless every entry is finite and strictly positive,
  /// `args` are distinct, and the table length matches the shape.
  Factor(std::string name, std::vector<std::string> args, Shape shape, std::vector<double> table);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& args() const noexcept { return args_; }
  const Shape& shape() const noexcept { return shape_; }
  const std::vector<double>& table() const noexcept { return table_; }
  std::size_t arity() const noexcept { return args_.size(); }

  double at(std::span<const std::size_t> index) const;

  /// Copy with a replacement table (same validation).
  Factor with_table(std::vector<double> table) const;

  bool operator==(const Factor&) const = default;

 private:
  std::string name_;
  std::vector<std::string> args_;
  Shape shape_;
  std::vector<double> table_;
};

/// Assignment of one range index per RV, in the owning graph's RV order.
struct Assignment {
  std::vector<std::size_t> values;

  bool operator==(const Assignment&) const = default;
};

struct Observation {
  std::string rv;
  std::string value;

  bool operator==(const Observation&) const = default;
};

using Evidence = std::vector<Observation>;

/// Immutable bipartite model. Edges are implicit in the factors' args.
class FactorGraph {
 public:
  FactorGraph() = default;
  /// Throws ModelError on duplicate names, undeclared arguments, or factor
  /// shapes that disagree with the declared ranges.
  FactorGraph(std::vector<RandomVariable> rvs, std::vector<Factor> factors);

  const std::vector<RandomVariable>& rvs() const noexcept { return rvs_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t num_rvs() const noexcept { return rvs_.size(); }
  std::size_t num_factors() const noexcept { return factors_.size(); }

  std::optional<std::size_t> rv_index(std::string_view name) const;
  std::optional<std::size_t> factor_index(std::string_view name) const;
  const RandomVariable& rv(std::string_view name) const;

  /// RV indices of factor `f`'s arguments, in argument order.
  const std::vector<std::size_t>& scope(std::size_t f) const { return scopes_.at(f); }
  /// Indices of the factors that mention RV `r`, ascending.
  const std::vector<std::size_t>& incident_factors(std::size_t r) const { return incidence_.at(r); }

  Shape rv_shape() const;
  std::uint64_t joint_state_count() const;

  /// RVs that appear in no factor (they contribute a uniform marginal).
  std::vector<std::string> isolated_rvs() const;

  /// Same structure with factor `f`'s table replaced.
  FactorGraph with_tables(const std::vector<std::vector<double>>& tables) const;

  Assignment assignment_from_labels(const std::map<std::string, std::string>& labels) const;
  std::map<std::string, std::string> labels(const Assignment& a) const;

  /// Resolves evidence to (rv index, value index) pairs; throws ModelError on
  /// unknown RVs, labels out of range, or an RV observed twice.
  std::vector<std::pair<std::size_t, std::size_t>> resolve(const Evidence& evidence) const;

  bool operator==(const FactorGraph& other) const {
    return rvs_ == other.rvs_ && factors_ == other.factors_;
  }

 private:
  std::vector<RandomVariable> rvs_;
  std::vector<Factor> factors_;
  std::unordered_map<std::string, std::size_t> rv_lookup_;
  std::unordered_map<std::string, std::size_t> factor_lookup_;
  std::vector<std::vector<std::size_t>> scopes_;
  std::vector<std::vector<std::size_t>> incidence_;
};

/// Same model with RVs and factors sorted by name. Used to compare models
/// that were rebuilt in a different order.
FactorGraph canonical_order(const FactorGraph& fg);

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

/// Enumeration cap; LIFTCOMP_ENUM_CAP overrides the default of 2^24 states.
std::uint64_t enumeration_cap();

/// Throws CapExceededError if `states` exceeds `cap`.
void check_enumerable(std::uint64_t states, std::uint64_t cap, std::string_view what);

/// ψ(a) = ∏_j φ_j(a_j).
double eval_joint(const FactorGraph& fg, const Assignment& a);
double log_eval_joint(const FactorGraph& fg, const Assignment& a);

/// Z by exhaustive enumeration.
double partition_function(const FactorGraph& fg, std::uint64_t cap = enumeration_cap());

double joint_probability(const FactorGraph& fg, const Assignment& a, std::uint64_t cap = enumeration_cap());

}  // namespace liftcomp
