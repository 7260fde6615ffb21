#pragma once

#include <optional>
#include <vector>

#include "liftcomp/acp.hpp"
#include "liftcomp/equivalence.hpp"
#include "liftcomp/factor_graph.hpp"
#include "liftcomp/grouping.hpp"
#include "liftcomp/pfg.hpp"

namespace liftcomp {

struct EacpOptions {
  bool detect_commutative = true;
  /// Tolerance of the swap test. Unset means exact symmetry. A relaxed
  /// tolerance symmetrises the group mean over each block, so M' then also
  /// carries the averaged histogram cells.
  std::optional<double> commutative_eps;
  bool counting_compaction = true;
};

struct CompressionResult {
  ParfactorGraph pfg;
  FactorGraph m_prime;
  Grouping phase1;
  /// Final groups; alignments are relative to each group's first member.
  Grouping grouping;
  ColourPassResult colours;
  /// Per final group: max over members and entries of |φ − φ*| / φ.
  std::vector<double> per_group_max_rel_dev;
};

/// Groups ε-equivalent factors, refines the groups by colour passing and
/// replaces each final group's tables by their mean. Throws
/// InvariantViolation if an output property fails to hold.
CompressionResult run_eacp(const FactorGraph& fg, Epsilon eps, const Evidence& evidence = {},
                           const EacpOptions& options = {});

}  // namespace liftcomp
