#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "liftcomp/equivalence.hpp"
#include "liftcomp/factor_graph.hpp"
#include "liftcomp/grouping.hpp"
#include "liftcomp/pfg.hpp"

namespace liftcomp {

/// Dense colour ids, renumbered in first-seen order every round.
struct ColourState {
  std::vector<std::size_t> rv_colours;
  std::vector<std::size_t> factor_colours;
  std::size_t iterations = 0;

  bool operator==(const ColourState&) const = default;
};

/// Initial factor colours plus, per factor, the argument rearrangement into
/// its colour class's frame and the commutative blocks of that frame.
struct FactorColouring {
  std::vector<std::size_t> colours;
  std::vector<Alignment> alignments;
  std::vector<CommutativeSpec> commutative;
};

struct ColourPassResult {
  ColourState state;
  /// Factors with equal final colour. Alignments are relative to each
  /// group's first member.
  Grouping factor_groups;
  std::vector<std::vector<std::size_t>> rv_classes;
};

/// RVs share a colour iff they share the ordered range and the observed value
/// (or are both unobserved).
std::vector<std::size_t> initial_rv_colours(const FactorGraph& fg, const Evidence& evidence);

/// Colour refinement until neither partition changes. Factor signatures are
/// the neighbour colours in (aligned) argument order followed by the own
/// colour; RV signatures are the sorted (factor colour, position) pairs, with
/// position 0 for commutative arguments, followed by the own colour.
ColourPassResult colour_pass(const FactorGraph& fg, const FactorColouring& initial, const Evidence& evidence);

/// Colouring by exact table equality up to argument permutation, found via
/// a canonical (lexicographically minimal) form per factor.
FactorColouring exact_factor_colouring(const FactorGraph& fg, bool detect_commutative = true);

/// Commutative blocks shared by all tables of a group, in the group's frame.
CommutativeSpec group_commutative_blocks(std::span<const Factor> factors, const Group& group, Epsilon eps);

/// Remaps a spec expressed in an anchor frame onto a member whose alignment
/// to that anchor is `align`.
CommutativeSpec remap_commutative(const CommutativeSpec& spec, const Alignment& align);

struct AcpOptions {
  bool detect_commutative = true;
  bool counting_compaction = true;
};

struct AcpResult {
  ColourPassResult colours;
  ParfactorGraph pfg;
};

/// Exact colour passing from exact-equality factor colours.
AcpResult run_acp(const FactorGraph& fg, const Evidence& evidence = {}, const AcpOptions& options = {});

}  // namespace liftcomp
