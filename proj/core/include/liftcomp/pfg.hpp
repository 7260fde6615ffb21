#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "liftcomp/equivalence.hpp"
#include "liftcomp/factor_graph.hpp"
#include "liftcomp/grouping.hpp"

namespace liftcomp {

/// Class of indistinguishable RVs (a parameterised RV in first-order terms).
struct RvClass {
  std::string representative;
  std::vector<std::string> members;
  std::vector<std::string> range;

  bool operator==(const RvClass&) const = default;
};

/// One block of interchangeable argument positions replaced by a counting RV.
/// Histograms count occurrences of each range value and are listed in order
/// of first appearance when the block is enumerated row-major, so for a
/// Boolean pair with range (high, low) the rows read [2,0], [1,1], [0,2].
struct CountingBlock {
  std::vector<std::size_t> positions;
  std::vector<std::vector<std::size_t>> histograms;

  bool operator==(const CountingBlock&) const = default;
};

/// Histogram-indexed table. Each compacted dimension is either an ordinary
/// argument position or a counting block, placed where the block's first
/// position was.
struct CountingCompaction {
  struct Dim {
    bool counting = false;
    std::size_t index = 0;  // argument position, or block index when counting

    bool operator==(const Dim&) const = default;
  };

  std::vector<CountingBlock> blocks;
  std::vector<Dim> dims;
  Shape shape;
  std::vector<double> table;

  /// Flat compacted cell of every full-table entry.
  std::vector<std::size_t> cell_of_entry(const Shape& full_shape) const;

  bool operator==(const CountingCompaction&) const = default;
};

/// Compacts `table` (laid out over `full_shape`) along the non-trivial
/// blocks of `spec`. Cell values are the arithmetic mean of the entries that
/// map to the cell.
CountingCompaction compact(std::span<const double> table, const Shape& full_shape, const CommutativeSpec& spec);

/// Per-entry table that assigns every entry its cell's value.
std::vector<double> expand(const CountingCompaction& compaction, const Shape& full_shape);

struct ParfactorMember {
  std::string name;
  std::vector<std::string> args;
  /// Alignment relative to the representative.
  Alignment alignment;

  bool operator==(const ParfactorMember&) const = default;
};

struct Parfactor {
  Factor representative;
  std::vector<ParfactorMember> members;
  std::optional<CountingCompaction> crv;

  std::size_t count() const noexcept { return members.size(); }

  bool operator==(const Parfactor&) const = default;
};

/// Structural lifted model: representatives with their ground members.
struct ParfactorGraph {
  std::vector<RvClass> rv_classes;
  std::vector<Parfactor> parfactors;

  std::size_t num_ground_factors() const;
  std::size_t num_ground_rvs() const;

  bool operator==(const ParfactorGraph&) const = default;
};

/// Builds one parfactor per group. `rv_classes` lists RV indices per class;
/// `crv_specs` (empty, or one per group) requests counting compaction.
/// Throws ModelError if the members of a group do not share one table.
ParfactorGraph construct_pfg(const FactorGraph& fg_updated, const Grouping& groups,
                             const std::vector<std::vector<std::size_t>>& rv_classes,
                             const std::vector<std::optional<CommutativeSpec>>& crv_specs = {});

/// Expands every parfactor into its members. Counting cells are expanded
/// back to per-assignment rows. RVs appear class by class.
FactorGraph ground(const ParfactorGraph& pfg);

}  // namespace liftcomp
