#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace liftcomp {

/// Cardinalities of a table's dimensions, in argument order.
using Shape = std::vector<std::size_t>;

/// Number of cells of a dense table with the given shape (1 for the empty shape).
std::size_t table_size(std::span<const std::size_t> shape);

/// Strides for row-major layout: the last dimension varies fastest.
std::vector<std::size_t> row_major_strides(std::span<const std::size_t> shape);

std::size_t flat_index(std::span<const std::size_t> index, std::span<const std::size_t> strides);

/// Advances `index` to the next row-major multi-index. Returns false after
/// the last one (and leaves `index` reset to all zeros).
bool next_index(std::vector<std::size_t>& index, std::span<const std::size_t> shape);

/// Joint state count of `shape`, saturating at UINT64_MAX.
std::uint64_t saturating_state_count(std::span<const std::size_t> shape);

}  // namespace liftcomp
