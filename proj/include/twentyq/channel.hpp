#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twentyq/rng.hpp"

namespace twentyq {

/// Bounded Lipschitz state map f(s) = a + b*s on [0,1].
///
/// The affine family (constant = zero slope) covers every state map used in
/// practice here; the Lipschitz constant is exactly |b|. Extending to other
/// Lipschitz families only requires another evaluate/extrema implementation.
struct LipschitzFn {
  double a = 0.0;  ///< intercept
  double b = 0.0;  ///< slope; 0 for a constant map

  static LipschitzFn affine(double a, double b) { return {a, b}; }
  static LipschitzFn constant(double value) { return {value, 0.0}; }

  /// Evaluate at a query size in [0,1]; throws std::domain_error outside.
  double operator()(double size) const;

  double lipschitz_constant() const { return b < 0 ? -b : b; }
  bool is_constant() const { return b == 0.0; }
  double min_on_unit_interval() const { return b < 0 ? a + b : a; }
  double max_on_unit_interval() const { return b > 0 ? a + b : a; }

  std::string describe() const;
};

/// Result of the channel-continuity check at state q with perturbation xi.
struct ContinuityReport {
  double q = 0.0;
  double xi = 0.0;
  double lhs = 0.0;      ///< max over +/-xi of the entrywise sup-norm log-ratio
  double bound_c = 0.0;  ///< supplied constant c(q)
  bool satisfied = false;
};

/// Measurement-dependent discrete memoryless channel P_{Y|X}^s with binary
/// input, finite output alphabet, and state s in [0,1].
///
/// Two families:
///  - bsc: flips the input bit with probability nu*f(s) (requires
///    nu*f(s) <= 1/2 across [0,1]; construction rejects anything else);
///  - tabulated: per-anchor 2x|Y| row-stochastic matrices, linearly
///    interpolated in the state between anchors (anchors must cover 0 and 1).
///
/// Channels are immutable after construction and safe to share across
/// threads; callers own their Rng state.
class MdChannel {
 public:
  enum class Family { bsc, tabulated };

  static MdChannel bsc(double nu, LipschitzFn f);
  static MdChannel tabulated(std::vector<double> anchor_states,
                             std::vector<std::vector<std::vector<double>>> anchor_rows);

  Family family() const { return family_; }
  bool is_bsc() const { return family_ == Family::bsc; }
  int output_alphabet_size() const { return output_size_; }
  double nu() const { return nu_; }
  const LipschitzFn& state_map() const { return f_; }

  /// Crossover nu*f(state) of the bsc family. Throws for tabulated channels.
  double crossover(double state) const;

  /// P_{Y|X}^{state}(y|x). Throws std::domain_error for state outside [0,1]
  /// and std::invalid_argument for an unknown x or y.
  double transition_prob(double state, int x, int y) const;

  /// Draw one response symbol from P_{Y|X}^{state}(.|x).
  int sample_response(double state, int x, Rng& rng) const;

  std::string describe() const;

 private:
  MdChannel() = default;

  void check_state(double state) const;
  void interpolated_row(double state, int x, double* row) const;

  Family family_ = Family::bsc;
  double nu_ = 0.0;
  LipschitzFn f_;
  int output_size_ = 2;
  std::vector<double> anchor_states_;
  // anchor_rows_[k][x][y], row-stochastic in y
  std::vector<std::vector<std::vector<double>>> anchor_rows_;
};

/// Entrywise sup-norm continuity check of the channel law around state q:
/// lhs = max over the +/-xi perturbations of max_{x,y} |log(P^q / P^{q+-xi})|,
/// compared against bound_c * xi. A zero probability facing a nonzero one
/// makes lhs infinite (reported, not thrown); identical entries contribute 0.
/// Requires 0 < xi < min(q, 1-q).
ContinuityReport check_continuity(const MdChannel& ch, double q, double xi,
                                  double bound_c);

}  // namespace twentyq
