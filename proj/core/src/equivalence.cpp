#include "liftcomp/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "liftcomp/error.hpp"

namespace liftcomp {

Epsilon::Epsilon(double value) : value_(value) {
  if (!(value >= 0.0) || !(value < 1.0)) {
    throw ModelError("epsilon must lie in [0, 1), got " + std::to_string(value));
  }
}

Alignment Alignment::identity(std::size_t n) {
  Alignment a;
  a.perm.resize(n);
  std::iota(a.perm.begin(), a.perm.end(), std::size_t{0});
  return a;
}

bool Alignment::is_identity() const {
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] != i) return false;
  }
  return true;
}

bool Alignment::is_valid() const {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

Alignment Alignment::inverse() const {
  Alignment inv;
  inv.perm.resize(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) inv.perm[perm[j]] = j;
  return inv;
}

Alignment Alignment::compose(const Alignment& inner) const {
  Alignment out;
  out.perm.resize(inner.perm.size());
  for (std::size_t j = 0; j < inner.perm.size(); ++j) out.perm[j] = perm[inner.perm[j]];
  return out;
}

bool eps_equiv_potentials(double a, double b, Epsilon eps) {
  const double e = eps.value();
  if (e == 0.0) return a == b;
  const double lo = 1.0 - kBoundarySlack;
  const double hi = 1.0 + kBoundarySlack;
  const bool a_in_b = a >= b * (1.0 - e) * lo && a <= b * (1.0 + e) * hi;
  const bool b_in_a = b >= a * (1.0 - e) * lo && b <= a * (1.0 + e) * hi;
  return a_in_b && b_in_a;
}

bool shapes_compatible(std::span<const std::size_t> reference_shape, std::span<const std::size_t> aligned_shape,
                       const Alignment& align) {
  if (reference_shape.size() != aligned_shape.size() || align.perm.size() != aligned_shape.size()) return false;
  for (std::size_t j = 0; j < aligned_shape.size(); ++j) {
    if (align.perm[j] >= reference_shape.size() || aligned_shape[j] != reference_shape[align.perm[j]]) return false;
  }
  return true;
}

namespace {

// Strides of the aligned factor expressed per reference dimension, so that
// walking the reference indices in row-major order addresses the aligned
// table directly.
std::vector<std::size_t> permuted_strides(std::span<const std::size_t> aligned_shape, const Alignment& align) {
  const auto own = row_major_strides(aligned_shape);
  std::vector<std::size_t> out(own.size());
  for (std::size_t j = 0; j < own.size(); ++j) out[align.perm[j]] = own[j];
  return out;
}

template <typename Fn>
void for_each_aligned(std::span<const std::size_t> reference_shape, std::span<const std::size_t> aligned_shape,
                      const Alignment& align, Fn&& fn) {
  const auto strides = permuted_strides(aligned_shape, align);
  std::vector<std::size_t> idx(reference_shape.size(), 0);
  std::size_t ref_flat = 0;
  do {
    fn(ref_flat++, flat_index(idx, strides));
  } while (next_index(idx, reference_shape));
}

}  // namespace

std::vector<double> to_reference_frame(const Factor& f, const Alignment& align,
                                       std::span<const std::size_t> reference_shape) {
  if (!shapes_compatible(reference_shape, f.shape(), align)) {
    throw ModelError("factor '" + f.name() + "' is not shape-compatible under the given alignment");
  }
  std::vector<double> out(f.table().size());
  for_each_aligned(reference_shape, f.shape(), align,
                   [&](std::size_t ref, std::size_t own) { out[ref] = f.table()[own]; });
  return out;
}

std::vector<double> from_reference_frame(std::span<const double> reference_table, const Alignment& align,
                                         std::span<const std::size_t> reference_shape,
                                         std::span<const std::size_t> own_shape) {
  if (!shapes_compatible(reference_shape, own_shape, align) || reference_table.size() != table_size(reference_shape)) {
    throw ModelError("from_reference_frame: incompatible shapes");
  }
  std::vector<double> out(reference_table.size());
  for_each_aligned(reference_shape, own_shape, align,
                   [&](std::size_t ref, std::size_t own) { out[own] = reference_table[ref]; });
  return out;
}

std::optional<Alignment> eps_equiv_factors(const Factor& f1, const Factor& f2, Epsilon eps) {
  if (f1.arity() != f2.arity()) return std::nullopt;
  if (f1.arity() > kMaxAlignmentArity) {
    throw CapExceededError("alignment search: arity " + std::to_string(f1.arity()) + " exceeds the cap of " +
                           std::to_string(kMaxAlignmentArity));
  }
  Alignment align = Alignment::identity(f1.arity());
  do {
    if (!shapes_compatible(f1.shape(), f2.shape(), align)) continue;
    bool ok = true;
    const auto strides = permuted_strides(f2.shape(), align);
    std::vector<std::size_t> idx(f1.arity(), 0);
    std::size_t ref = 0;
    do {
      if (!eps_equiv_potentials(f1.table()[ref++], f2.table()[flat_index(idx, strides)], eps)) {
        ok = false;
        break;
      }
    } while (next_index(idx, f1.shape()));
    if (ok) return align;
  } while (std::next_permutation(align.perm.begin(), align.perm.end()));
  return std::nullopt;
}

double err(const Factor& f1, const Factor& f2, const Alignment& align) {
  const auto aligned = to_reference_frame(f2, align, f1.shape());
  double sum = 0.0;
  for (std::size_t r = 0; r < aligned.size(); ++r) {
    const double d = f1.table()[r] - aligned[r];
    sum += d * d;
  }
  return sum;
}

std::vector<std::vector<std::size_t>> CommutativeSpec::nontrivial() const {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& b : blocks) {
    if (b.size() >= 2) out.push_back(b);
  }
  return out;
}

const std::vector<std::size_t>& CommutativeSpec::block_of(std::size_t pos) const {
  for (const auto& b : blocks) {
    if (std::find(b.begin(), b.end(), pos) != b.end()) return b;
  }
  throw ModelError("position " + std::to_string(pos) + " is not covered by the commutative spec");
}

bool CommutativeSpec::has_nontrivial() const {
  return std::any_of(blocks.begin(), blocks.end(), [](const auto& b) { return b.size() >= 2; });
}

bool swap_invariant(std::span<const std::vector<double>> tables, std::span<const std::size_t> shape, std::size_t i,
                    std::size_t j, Epsilon eps) {
  if (shape[i] != shape[j]) return false;
  Alignment swap = Alignment::identity(shape.size());
  std::swap(swap.perm[i], swap.perm[j]);
  const auto strides = permuted_strides(shape, swap);
  for (const auto& table : tables) {
    std::vector<std::size_t> idx(shape.size(), 0);
    std::size_t flat = 0;
    do {
      if (!eps_equiv_potentials(table[flat++], table[flat_index(idx, strides)], eps)) return false;
    } while (next_index(idx, shape));
  }
  return true;
}

CommutativeSpec commutative_blocks(std::span<const std::vector<double>> tables, std::span<const std::size_t> shape,
                                   Epsilon eps) {
  const std::size_t n = shape.size();
  std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) adjacent[i][j] = adjacent[j][i] = swap_invariant(tables, shape, i, j, eps);
  }
  CommutativeSpec spec;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> block{i};
    used[i] = true;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      if (std::all_of(block.begin(), block.end(), [&](std::size_t b) { return adjacent[b][j]; })) {
        block.push_back(j);
        used[j] = true;
      }
    }
    spec.blocks.push_back(std::move(block));
  }
  return spec;
}

CommutativeSpec commutative_blocks(const Factor& f, Epsilon eps) {
  const std::vector<double>& table = f.table();
  return commutative_blocks(std::span<const std::vector<double>>(&table, 1), f.shape(), eps);
}

}  // namespace liftcomp
