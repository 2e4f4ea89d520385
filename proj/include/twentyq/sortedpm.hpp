#pragma once

#include <cstdint>
#include <vector>

#include "twentyq/channel.hpp"
#include "twentyq/engine.hpp"
#include "twentyq/rng.hpp"

namespace twentyq {

/// Posterior over a fixed grid of equal-width bins on [0,1] (d = 1).
class PosteriorState {
 public:
  explicit PosteriorState(std::uint32_t n_bins);

  std::uint32_t size() const { return static_cast<std::uint32_t>(weights_.size()); }
  std::uint32_t step() const { return step_; }
  double weight(std::uint32_t bin) const;  ///< 1-based bin
  const std::vector<double>& weights() const { return weights_; }

  double max_weight() const;
  std::uint32_t argmax_bin() const;  ///< 1-based; ties to the smallest index
  double bin_center(std::uint32_t bin) const;
  double bin_width() const { return 1.0 / static_cast<double>(weights_.size()); }

  void bump_step() { ++step_; }
  void set_weights(std::vector<double> w) { weights_ = std::move(w); }

 private:
  std::vector<double> weights_;
  std::uint32_t step_ = 0;
};

/// What one sorted-PM step did.
struct PmStepInfo {
  std::vector<std::uint32_t> query_bins;  ///< 1-based, ascending
  double query_mass = 0.0;                ///< posterior mass of the query
  double query_size = 0.0;                ///< total length of the query
  int oracle_bit = 0;
  int response = 0;
};

/// One sorted posterior matching step (binary-output channels only):
/// sort bins by posterior descending (stable, so index order breaks ties),
/// take the shortest nonempty prefix whose cumulative mass is closest to 1/2
/// (ties to the shorter prefix), query the union of those bins, pass the
/// oracle bit through the channel at the realized query length, Bayes-update
/// every weight with the measurement-dependent likelihood, renormalize.
PmStepInfo pm_step(PosteriorState& st, const MdChannel& ch, double truth,
                   Rng& rng);

enum class PmStopRule { fixed_n, mass_threshold };

/// Run sorted PM for n_queries steps (fixed_n) or until the largest weight
/// reaches theta (mass_threshold, still capped by n_queries). The estimate is
/// the center of the argmax-posterior bin. epsilon_term applies the same
/// up-front termination branch as the engine: output 0.5 with tau = 0.
TrialRecord pm_run(const MdChannel& ch, std::uint32_t n_bins,
                   std::uint64_t n_queries, double truth, double delta_eval,
                   Rng& rng, PmStopRule rule = PmStopRule::fixed_n,
                   double theta = 1.0, double epsilon_term = 0.0,
                   std::vector<PmStepInfo>* trace = nullptr);

}  // namespace twentyq
