#include "twentyq/indexing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace twentyq {

namespace {

std::uint64_t checked_pow(std::uint32_t base, std::uint32_t exp) {
  // keep a factor-of-two headroom below 2^63 so downstream size math is safe
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
  std::uint64_t result = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (result > kLimit / base) {
      throw std::overflow_error("Partition: M^d exceeds the flat-index range");
    }
    result *= base;
  }
  return result;
}

}  // namespace

Partition::Partition(std::uint32_t bins_per_dim, std::uint32_t dim)
    : m_(bins_per_dim), d_(dim), total_(0) {
  if (m_ < 1) throw std::invalid_argument("Partition: bins per dimension must be >= 1");
  if (d_ < 1) throw std::invalid_argument("Partition: dimension must be >= 1");
  total_ = checked_pow(m_, d_);
}

FlatIndex Partition::flatten(const BinIndex& idx) const {
  if (idx.coords.size() != d_) {
    throw std::out_of_range("flatten: index has wrong dimension");
  }
  std::uint64_t flat = 1;
  std::uint64_t stride = total_;
  for (std::uint32_t j = 0; j < d_; ++j) {
    const std::uint32_t c = idx.coords[j];
    if (c < 1 || c > m_) {
      throw std::out_of_range("flatten: coordinate " + std::to_string(j + 1) +
                              " outside [1, M]");
    }
    stride /= m_;
    flat += (static_cast<std::uint64_t>(c) - 1) * stride;
  }
  return flat;
}

BinIndex Partition::unflatten(FlatIndex flat) const {
  if (flat < 1 || flat > total_) {
    throw std::out_of_range("unflatten: flat index outside [1, M^d]");
  }
  BinIndex idx;
  idx.coords.assign(d_, 1);
  std::uint64_t rem = flat - 1;
  std::uint64_t stride = total_;
  for (std::uint32_t j = 0; j < d_; ++j) {
    stride /= m_;
    idx.coords[j] = static_cast<std::uint32_t>(rem / stride) + 1;
    rem %= stride;
  }
  return idx;
}

BinIndex Partition::locate(std::span<const double> point) const {
  if (point.size() != d_) {
    throw std::out_of_range("locate: point has wrong dimension");
  }
  BinIndex idx;
  idx.coords.assign(d_, 1);
  for (std::uint32_t j = 0; j < d_; ++j) {
    const double s = point[j];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::domain_error("locate: point outside the unit cube");
    }
    const auto raw = static_cast<std::uint64_t>(std::floor(s * m_)) + 1;
    idx.coords[j] = static_cast<std::uint32_t>(std::min<std::uint64_t>(raw, m_));
  }
  return idx;
}

std::vector<double> Partition::center(const BinIndex& idx) const {
  if (idx.coords.size() != d_) {
    throw std::out_of_range("center: index has wrong dimension");
  }
  std::vector<double> c(d_);
  for (std::uint32_t j = 0; j < d_; ++j) {
    if (idx.coords[j] < 1 || idx.coords[j] > m_) {
      throw std::out_of_range("center: coordinate outside [1, M]");
    }
    c[j] = (2.0 * idx.coords[j] - 1.0) / (2.0 * m_);
  }
  return c;
}

}  // namespace twentyq
