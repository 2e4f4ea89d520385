#include "twentyq/infodensity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace twentyq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DensityParams::DensityParams(double p, double state, const MdChannel& channel)
    : p_(p), state_(state), channel_(&channel) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("DensityParams: p must lie in (0,1)");
  }
  const int ny = channel.output_alphabet_size();
  marginal_.assign(static_cast<std::size_t>(ny), 0.0);
  for (int y = 0; y < ny; ++y) {
    marginal_[static_cast<std::size_t>(y)] =
        (1.0 - p) * channel.transition_prob(state, 0, y) +
        p * channel.transition_prob(state, 1, y);
  }
  densities_.assign(2, std::vector<double>(static_cast<std::size_t>(ny), 0.0));
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double cond = channel.transition_prob(state, x, y);
      const double marg = marginal_[static_cast<std::size_t>(y)];
      double v;
      if (cond == 0.0) {
        v = -kInf;
      } else if (marg == 0.0) {
        v = kInf;  // impossible symbol; info_density throws if it is queried
      } else {
        v = std::log(cond / marg);
      }
      densities_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = v;
    }
  }
}

double DensityParams::output_marginal(int y) const {
  if (y < 0 || y >= channel_->output_alphabet_size()) {
    throw std::invalid_argument("output_marginal: unknown symbol");
  }
  return marginal_[static_cast<std::size_t>(y)];
}

double DensityParams::info_density(int x, int y) const {
  if (x != 0 && x != 1) {
    throw std::invalid_argument("info_density: input symbol must be 0 or 1");
  }
  if (y < 0 || y >= channel_->output_alphabet_size()) {
    throw std::invalid_argument("info_density: unknown symbol");
  }
  if (marginal_[static_cast<std::size_t>(y)] == 0.0) {
    throw std::domain_error("info_density: output marginal is zero for this symbol");
  }
  return densities_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
}

double DensityParams::expected_density() const {
  double mi = 0.0;
  for (int x = 0; x < 2; ++x) {
    const double px = x == 1 ? p_ : 1.0 - p_;
    for (int y = 0; y < channel_->output_alphabet_size(); ++y) {
      const double cond = channel_->transition_prob(state_, x, y);
      if (cond == 0.0) continue;  // 0 * log 0 contributes nothing
      mi += px * cond * densities_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
    }
  }
  return mi;
}

DensityAccumulator::DensityAccumulator(const DensityParams& params,
                                       std::uint64_t n_bins)
    : params_(&params), n_bins_(n_bins) {
  if (n_bins == 0) {
    throw std::invalid_argument("DensityAccumulator: need at least one bin");
  }
  counter_mode_ = params.channel().output_alphabet_size() == 2;
  if (counter_mode_) {
    agree_y1_.assign(n_bins, 0);
    agree_y0_.assign(n_bins, 0);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const double cond = params.channel().transition_prob(params.state(), x, y);
        d_[x][y] = cond == 0.0 ? -kInf : std::log(cond / params.output_marginal(y));
      }
    }
  } else {
    sums_.assign(n_bins, 0.0);
  }
}

void DensityAccumulator::accumulate(std::span<const std::uint8_t> design_bits,
                                    int y) {
  if (design_bits.size() != n_bins_) {
    throw std::invalid_argument("accumulate: design column has wrong length");
  }
  if (counter_mode_) {
    if (params_->output_marginal(y) == 0.0) {
      throw std::domain_error("accumulate: response symbol has zero marginal");
    }
    if (y == 1) {
      ++responses_y1_;
      for (std::uint64_t b = 0; b < n_bins_; ++b) {
        agree_y1_[b] += design_bits[b];
      }
    } else {
      for (std::uint64_t b = 0; b < n_bins_; ++b) {
        agree_y0_[b] += static_cast<std::uint8_t>(1 - design_bits[b]);
      }
    }
  } else {
    for (std::uint64_t b = 0; b < n_bins_; ++b) {
      sums_[b] += params_->info_density(design_bits[b] ? 1 : 0, y);
    }
  }
  ++steps_;
}

double DensityAccumulator::class_density(std::uint64_t n11, std::uint64_t n00) const {
  // density = n11*d[1][1] + (ny1-n11)*d[0][1] + n00*d[0][0] + (ny0-n00)*d[1][0];
  // zero-count classes are skipped so that -inf densities never produce NaN
  const std::uint64_t ny1 = responses_y1_;
  const std::uint64_t ny0 = steps_ - responses_y1_;
  double v = 0.0;
  if (n11 > 0) v += static_cast<double>(n11) * d_[1][1];
  if (ny1 > n11) v += static_cast<double>(ny1 - n11) * d_[0][1];
  if (n00 > 0) v += static_cast<double>(n00) * d_[0][0];
  if (ny0 > n00) v += static_cast<double>(ny0 - n00) * d_[1][0];
  return v;
}

double DensityAccumulator::density(FlatIndex bin) const {
  if (bin < 1 || bin > n_bins_) {
    throw std::out_of_range("density: bin outside [1, n_bins]");
  }
  const std::uint64_t b = bin - 1;
  return counter_mode_ ? class_density(agree_y1_[b], agree_y0_[b]) : sums_[b];
}

std::pair<FlatIndex, double> DensityAccumulator::max_bin() const {
  if (steps_ == 0) {
    throw std::logic_error("max_bin: no steps accumulated yet");
  }
  FlatIndex best = 1;
  double best_v = -kInf;
  for (std::uint64_t b = 0; b < n_bins_; ++b) {
    const double v = counter_mode_ ? class_density(agree_y1_[b], agree_y0_[b]) : sums_[b];
    if (v >= best_v) {  // >= : ties go to the largest flat index
      best_v = v;
      best = b + 1;
    }
  }
  return {best, best_v};
}

FlatIndex DensityAccumulator::largest_bin_at_least(double threshold) const {
  for (std::uint64_t b = n_bins_; b > 0; --b) {
    const double v =
        counter_mode_ ? class_density(agree_y1_[b - 1], agree_y0_[b - 1]) : sums_[b - 1];
    if (v >= threshold) return b;
  }
  return 0;
}

}  // namespace twentyq
