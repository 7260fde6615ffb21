#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "liftcomp/equivalence.hpp"
#include "liftcomp/factor_graph.hpp"

namespace liftcomp {

struct GroupMember {
  std::size_t factor = 0;
  /// Alignment of this member relative to the group's first member.
  Alignment alignment;

  bool operator==(const GroupMember&) const = default;
};

struct Group {
  std::vector<GroupMember> members;

  std::size_t anchor() const { return members.front().factor; }
  std::size_t size() const noexcept { return members.size(); }

  bool operator==(const Group&) const = default;
};

/// Ordered partition of factor indices. Groups are ordered by creation and
/// members by insertion.
struct Grouping {
  std::vector<Group> groups;

  std::size_t num_factors() const;
  /// Group index per factor.
  std::vector<std::size_t> group_index(std::size_t num_factors) const;
  /// Member factor sets, each sorted, in group order.
  std::vector<std::vector<std::size_t>> member_sets() const;

  bool operator==(const Grouping&) const = default;
};

/// Tables of a group's members laid out in the first member's frame.
std::vector<std::vector<double>> aligned_tables(std::span<const Factor> factors, const Group& group);

/// Greedy grouping of pairwise ε-equivalent factors. A factor joins the
/// admissible group whose members it deviates least from in summed squared
/// error (ties go to the older group) and otherwise opens a new group.
Grouping phase1_group(std::span<const Factor> factors, Epsilon eps);

/// Entrywise arithmetic mean of equally shaped tables. Rows whose inputs are
/// all equal reproduce that value exactly; other rows are clamped to the
/// inputs' [min, max] so rounding never leaves the convex hull.
std::vector<double> mean_table(std::span<const std::vector<double>> tables);

/// Mean of the aligned members, expressed over the first member's arguments.
Factor mean_factor(std::span<const Factor> factors, const Group& group);

/// Every pair of members is entrywise ε-equivalent in the shared frame.
bool pairwise_equivalent(std::span<const Factor> factors, const Group& group, Epsilon eps);

}  // namespace liftcomp
