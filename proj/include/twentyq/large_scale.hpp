#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twentyq/channel.hpp"
#include "twentyq/rng.hpp"

namespace twentyq {

/// One trial of a large-scale simulation. Resolutions are carried in log
/// space so bin counts far beyond 2^53 lose no precision.
struct ScaledTrial {
  std::uint64_t tau = 0;
  bool capped = false;
  bool correct = false;         ///< decoded bin == truth bin
  double log_resolution = 0.0;  ///< log ||estimate - truth||
  bool excess = false;          ///< resolution > 1/num_bins
};

/// First-passage law of one non-transmitted bin's accumulated-density walk,
/// conditioned on a response stream. The walk position after n steps is a
/// function of two counts (selected bins on y=1 steps, selected on y=0
/// steps), so the full first-passage distribution fits a 2-D lattice DP.
class WrongWalkDp {
 public:
  /// d[x][y] are the per-step densities at the nominal state; lambda is the
  /// stopping threshold.
  WrongWalkDp(const double d[2][2], double lambda);

  /// Advance one step with response y and per-step selection weight p_bit.
  void step(int y, double p_bit);

  std::uint64_t steps() const { return n1_ + n0_; }
  /// Cumulative probability that the walk crossed lambda by the current step.
  double crossed() const { return crossed_; }
  /// Probability mass that first crossed at the latest step.
  double last_increment() const { return last_increment_; }

 private:
  double walk_value(std::uint64_t a1, std::uint64_t a0) const;
  void prune();

  double d00_, d01_, d10_, d11_;
  double lambda_;
  std::uint64_t n1_ = 0, n0_ = 0;
  double crossed_ = 0.0;
  double last_increment_ = 0.0;
  std::vector<std::vector<double>> mass_;  // mass_[a1][a0]
};

/// Simulates Algorithm-1 trials for d = 1 and a binary-output channel at bin
/// counts far too large to materialize per-bin state.
///
/// The transmitted bin's walk and the realized query sizes are simulated
/// directly; the M-1 other bins enter through their exchangeable first-
/// passage law (WrongWalkDp) and a thinned trigger process for the event
/// that any of them crosses the threshold. Bin counts up to 2^31 use exact
/// binomial query sizes and integer bin arithmetic; beyond that the query
/// size uses a Gaussian approximation (error O(M^-1/2)) and qualifier
/// positions are drawn as reals (error O(1/M)).
class LargeMAlg1Sim {
 public:
  /// num_bins may be any value >= 2, including e.g. exp(70).
  LargeMAlg1Sim(const MdChannel& ch, double num_bins, double design_q,
                double lambda, std::uint64_t max_steps);

  ScaledTrial run_trial(Rng& rng) const;

  double num_bins() const { return num_bins_; }
  double log_num_bins() const { return log_num_bins_; }
  bool integer_mode() const { return integer_mode_; }

 private:
  const MdChannel* ch_;
  double num_bins_;
  double log_num_bins_;
  double design_q_;
  double lambda_;
  std::uint64_t max_steps_;
  bool integer_mode_;
  std::uint64_t m_int_ = 0;  // integer mode only
  double d_[2][2];           // nominal per-step densities
};

/// Sorted posterior matching in the infinite-grid limit: the posterior is a
/// piecewise-constant density over [0,1] held as an ordered list of pieces,
/// each query takes the top-density region of mass exactly 1/2 (splitting one
/// boundary piece), and the truth is tracked in piece-relative coordinates so
/// resolutions below the double-precision absolute grid stay exact.
class ContinuumPmSim {
 public:
  explicit ContinuumPmSim(const MdChannel& ch);

  /// Run n_queries steps with a uniformly drawn truth; the estimate is the
  /// midpoint of the top-density piece.
  ScaledTrial run(std::uint64_t n_queries, Rng& rng) const;

 private:
  const MdChannel* ch_;
};

/// Conditional "how many of n walkers crossed, given at least one did" draw:
/// Binomial(n, p) | >= 1, with n allowed to be huge (passed as a double).
std::uint64_t conditional_crossing_count(double n, double p, Rng& rng);

}  // namespace twentyq
