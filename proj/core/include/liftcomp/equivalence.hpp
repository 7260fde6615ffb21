#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "liftcomp/factor_graph.hpp"

namespace liftcomp {

/// Relative tolerance ε ∈ [0, 1).
class Epsilon {
 public:
  constexpr Epsilon() = default;
  /// Throws ModelError unless 0 <= value < 1.
  explicit Epsilon(double value);

  constexpr double value() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// Slack applied to interval boundaries when ε > 0. With ε = 0 the test is
/// exact equality.
inline constexpr double kBoundarySlack = 1e-12;

/// Argument permutation between two factors. Position j of the aligned
/// factor corresponds to position `perm[j]` of the reference factor, i.e.
/// reference(r_1..r_n) is compared with aligned(r_perm[0], .., r_perm[n-1]).
struct Alignment {
  std::vector<std::size_t> perm;

  static Alignment identity(std::size_t n);
  bool is_identity() const;
  bool is_valid() const;
  Alignment inverse() const;
  /// (a.then(b))(j) = a.perm[b.perm[j]]: first map with b, then with a.
  Alignment compose(const Alignment& inner) const;

  bool operator==(const Alignment&) const = default;
};

/// Permutation search is exhaustive; refuse anything beyond this arity.
inline constexpr std::size_t kMaxAlignmentArity = 8;

/// `a` and `b` each lie in the other's [x(1-ε), x(1+ε)] interval.
bool eps_equiv_potentials(double a, double b, Epsilon eps);

/// Re-indexes `f` into the argument frame of a reference factor whose shape
/// is `reference_shape`: out[r] = f(r_perm[0], .., r_perm[n-1]).
std::vector<double> to_reference_frame(const Factor& f, const Alignment& align, std::span<const std::size_t> reference_shape);

/// Inverse of to_reference_frame: maps a table laid out in the reference
/// frame back onto the argument order of a factor with `own_shape`.
std::vector<double> from_reference_frame(std::span<const double> reference_table, const Alignment& align,
                                         std::span<const std::size_t> reference_shape,
                                         std::span<const std::size_t> own_shape);

/// True if `align` maps `aligned_shape` onto `reference_shape` dimension by dimension.
bool shapes_compatible(std::span<const std::size_t> reference_shape, std::span<const std::size_t> aligned_shape,
                       const Alignment& align);

/// Lexicographically smallest alignment under which `f2` is entrywise
/// ε-equivalent to `f1` (identity first). Throws CapExceededError above
/// kMaxAlignmentArity.
std::optional<Alignment> eps_equiv_factors(const Factor& f1, const Factor& f2, Epsilon eps);

/// Σ_r (f1(r) − f2(π(r)))². Throws ModelError on incompatible shapes.
double err(const Factor& f1, const Factor& f2, const Alignment& align);

/// Partition of argument positions into blocks that may be permuted freely.
struct CommutativeSpec {
  std::vector<std::vector<std::size_t>> blocks;

  /// Blocks of size >= 2.
  std::vector<std::vector<std::size_t>> nontrivial() const;
  /// Block containing `pos`.
  const std::vector<std::size_t>& block_of(std::size_t pos) const;
  bool has_nontrivial() const;

  bool operator==(const CommutativeSpec&) const = default;
};

/// True if swapping positions i and j maps every entry of every table to an
/// ε-equivalent entry. All tables share `shape`.
bool swap_invariant(std::span<const std::vector<double>> tables, std::span<const std::size_t> shape, std::size_t i,
                    std::size_t j, Epsilon eps);

/// Greedy maximal cliques of the swap-invariance graph, scanned in position
/// order. Positions with different cardinalities never share a block.
CommutativeSpec commutative_blocks(std::span<const std::vector<double>> tables, std::span<const std::size_t> shape,
                                   Epsilon eps);
CommutativeSpec commutative_blocks(const Factor& f, Epsilon eps);

}  // namespace liftcomp
