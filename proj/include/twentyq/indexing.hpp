#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace twentyq {

/// 1-based flat bin index in [1 .. M^d].
using FlatIndex = std::uint64_t;

/// Multi-index (i_1, ..., i_d), each coordinate in [1 .. M].
struct BinIndex {
  std::vector<std::uint32_t> coords;

  bool operator==(const BinIndex&) const = default;
};

/// Uniform partition of the unit cube [0,1]^d into M^d equal bins.
///
/// Bins are half-open [a, b) in every coordinate, except that the last bin
/// in each dimension is closed so the partition covers the whole cube.
/// Flattening follows the mixed-radix rule 1 + sum_j (i_j - 1) M^(d-j),
/// so flat indices are 1-based.
class Partition {
 public:
  /// Throws std::invalid_argument if M or d is zero, std::overflow_error
  /// if M^d does not fit the flat-index range.
  Partition(std::uint32_t bins_per_dim, std::uint32_t dim);

  std::uint32_t bins_per_dim() const { return m_; }
  std::uint32_t dim() const { return d_; }
  std::uint64_t total_bins() const { return total_; }
  double bin_width() const { return 1.0 / static_cast<double>(m_); }

  /// Multi-index -> flat index. Throws std::out_of_range on bad coords.
  FlatIndex flatten(const BinIndex& idx) const;

  /// Flat index -> multi-index. Throws std::out_of_range outside [1, M^d].
  BinIndex unflatten(FlatIndex flat) const;

  /// Bin containing a point of the unit cube: i_j = min(floor(s_j*M)+1, M).
  BinIndex locate(std::span<const double> point) const;

  /// Center of a bin, component j = (2 i_j - 1) / (2M).
  std::vector<double> center(const BinIndex& idx) const;

 private:
  std::uint32_t m_;
  std::uint32_t d_;
  std::uint64_t total_;
};

}  // namespace twentyq
