#include "liftcomp/shape.hpp"

#include <limits>

namespace liftcomp {

std::size_t table_size(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::vector<std::size_t> row_major_strides(std::span<const std::size_t> shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

std::size_t flat_index(std::span<const std::size_t> index, std::span<const std::size_t> strides) {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < index.size(); ++i) flat += index[i] * strides[i];
  return flat;
}

bool next_index(std::vector<std::size_t>& index, std::span<const std::size_t> shape) {
  for (std::size_t i = index.size(); i-- > 0;) {
    if (++index[i] < shape[i]) return true;
    index[i] = 0;
  }
  return false;
}

std::uint64_t saturating_state_count(std::span<const std::size_t> shape) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) return 0;
    if (n > kMax / d) return kMax;
    n *= d;
  }
  return n;
}

}  // namespace liftcomp
