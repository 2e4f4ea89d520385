#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "twentyq/channel.hpp"
#include "twentyq/indexing.hpp"

namespace twentyq {

/// Parameters of the decoder statistic: Bernoulli input weight p and a fixed
/// channel state. The state is the nominal one chosen up front by the query
/// procedure, not the realized per-step query size.
class DensityParams {
 public:
  DensityParams(double p, double state, const MdChannel& channel);

  double p() const { return p_; }
  double state() const { return state_; }
  const MdChannel& channel() const { return *channel_; }

  /// Output marginal P_Y(y) induced by Bern(p) and the channel at the state.
  double output_marginal(int y) const;

  /// log(P(y|x) / P_Y(y)), natural log. Returns -infinity when P(y|x)=0;
  /// throws std::domain_error when the marginal is 0 (impossible symbol).
  double info_density(int x, int y) const;

  /// Exact E[i(X;Y)] under Bern(p) x P^state by enumerating the alphabet.
  /// This is the mutual information, hence nonnegative.
  double expected_density() const;

 private:
  double p_;
  double state_;
  const MdChannel* channel_;
  std::vector<double> marginal_;                // per output symbol
  std::vector<std::vector<double>> densities_;  // [x][y], may hold -inf
};

/// Running per-bin accumulated information densities over one trial.
///
/// For binary-output channels the accumulator keeps two counters per bin
/// (agreements with y=1 and with y=0 responses) plus shared response counts,
/// which reconstruct every bin's exact sum of per-step densities in O(1)
/// memory per bin regardless of the stopping time. Wider alphabets fall back
/// to one running double per bin.
class DensityAccumulator {
 public:
  DensityAccumulator(const DensityParams& params, std::uint64_t n_bins);

  /// Fold in one step: bin b contributed design bit design_bits[b] (0-based
  /// span order, bin b corresponds to flat index b+1), shared response y.
  void accumulate(std::span<const std::uint8_t> design_bits, int y);

  std::uint64_t steps() const { return steps_; }
  std::uint64_t n_bins() const { return n_bins_; }

  /// Accumulated density of a 1-based flat bin index.
  double density(FlatIndex bin) const;

  /// Maximum accumulated density and a witnessing bin; ties break toward the
  /// LARGEST flat index. Requires at least one accumulated step.
  std::pair<FlatIndex, double> max_bin() const;

  /// Largest 1-based bin with density >= threshold, or 0 if none qualifies.
  FlatIndex largest_bin_at_least(double threshold) const;

 private:
  double class_density(std::uint64_t n11, std::uint64_t n00) const;

  const DensityParams* params_;
  std::uint64_t n_bins_;
  std::uint64_t steps_ = 0;
  bool counter_mode_;
  // counter mode (binary output): per-bin agreement counts, shared y counts
  std::vector<std::uint32_t> agree_y1_;
  std::vector<std::uint32_t> agree_y0_;
  std::uint64_t responses_y1_ = 0;
  // general mode: running float sums
  std::vector<double> sums_;
  // cached single-step densities [x][y] for the binary-output fast path
  double d_[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

}  // namespace twentyq
