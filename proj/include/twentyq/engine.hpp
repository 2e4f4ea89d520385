#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "twentyq/channel.hpp"
#include "twentyq/indexing.hpp"
#include "twentyq/rng.hpp"

namespace twentyq {

/// Decoder rule once the stopping threshold is reached.
/// largest_qualifying is the literal rule (largest flat index whose density
/// clears the threshold); argmax_density is exposed for comparison only.
enum class DecodeRule { largest_qualifying, argmax_density };

struct ProcedureConfig {
  std::uint32_t bins_per_dim = 2;  ///< M
  std::uint32_t dim = 1;           ///< d
  double design_q = 0.5;           ///< Bernoulli weight of each design bit
  double lambda = 0.6931471805599453;  ///< stopping threshold, nats
  double epsilon_term = 0.0;  ///< up-front termination probability; 0 = run always
  std::uint64_t max_steps = 0;  ///< safety cap; 0 picks the default below
  DecodeRule decode_rule = DecodeRule::largest_qualifying;

  /// Default cap 50 * ceil(lambda / 0.01); capped trials are flagged, never
  /// silently dropped.
  std::uint64_t effective_max_steps() const;

  /// Throws std::invalid_argument on out-of-range fields or a channel whose
  /// validity constraints fail.
  void validate(const MdChannel& ch) const;
};

struct QuerySizeSummary {
  std::uint64_t steps = 0;
  double mean = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double size);
};

/// One simulated search.
struct TrialRecord {
  std::uint64_t tau = 0;     ///< stopping time; 0 when terminated up front
  bool terminated = false;   ///< Algorithm-2 termination branch taken
  bool capped = false;       ///< hit max_steps without crossing the threshold
  std::vector<double> truth;
  std::vector<double> estimate;
  FlatIndex true_bin = 0;
  FlatIndex decoded_bin = 0;     ///< 0 when terminated
  double decoded_density = 0.0;  ///< accumulated density of the decoded bin
  double linf_error = 0.0;       ///< ||estimate - truth||_inf
  bool excess = false;           ///< linf_error > delta_eval
  QuerySizeSummary query_sizes;
};

/// Optional per-step trace for diagnostics and tests.
struct StepTrace {
  double query_size = 0.0;  ///< realized |A_t|
  int oracle_bit = 0;       ///< 1(truth in A_t)
  int response = 0;         ///< noisy channel output
};

/// Run one adaptive query trial.
///
/// Loop per step: draw M^d Bern(q) design bits, form the query as the union
/// of bins with bit 1, obtain the oracle bit for the truth's bin, pass it
/// through the channel at the REALIZED state f(|A_t|), and accumulate
/// densities at the NOMINAL state f(q). Stops at the first step whose
/// maximum accumulated density reaches lambda, then decodes per decode_rule.
///
/// The termination uniform is drawn exactly once, up front, for every
/// epsilon_term including 0, so runs with different epsilon_term share
/// trajectories under a common seed.
TrialRecord run_trial(const ProcedureConfig& cfg, const MdChannel& ch,
                      std::span<const double> truth, double delta_eval,
                      Rng& rng, std::vector<StepTrace>* trace = nullptr);

struct StoppingTimePair {
  std::uint64_t tau1 = 0;
  std::uint64_t tau2 = 0;
  bool capped1 = false;
  bool capped2 = false;
};

/// Simulate the stopping times of bins 1 and 2 on a common response stream
/// under the nominal joint law: every design bit i.i.d. Bern(q), queries
/// formed as in run_trial, responses generated for transmitted bin 1 at the
/// realized state. Each time is capped at max_steps with a flag.
StoppingTimePair stopping_time_pair(const ProcedureConfig& cfg,
                                    const MdChannel& ch, Rng& rng);

/// lambda = log((M^d - 1) / target_eps): the threshold that makes the
/// union-bound error term equal target_eps. Requires M^d >= 2.
double choose_lambda(std::uint32_t bins_per_dim, std::uint32_t dim,
                     double target_eps);

}  // namespace twentyq
