#include "twentyq/sortedpm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace twentyq {

PosteriorState::PosteriorState(std::uint32_t n_bins) {
  if (n_bins < 1) throw std::invalid_argument("PosteriorState: need >= 1 bin");
  weights_.assign(n_bins, 1.0 / static_cast<double>(n_bins));
}

double PosteriorState::weight(std::uint32_t bin) const {
  if (bin < 1 || bin > weights_.size()) {
    throw std::out_of_range("PosteriorState: bin outside [1, n_bins]");
  }
  return weights_[bin - 1];
}

double PosteriorState::max_weight() const {
  return *std::max_element(weights_.begin(), weights_.end());
}

std::uint32_t PosteriorState::argmax_bin() const {
  const auto it = std::max_element(weights_.begin(), weights_.end());
  return static_cast<std::uint32_t>(it - weights_.begin()) + 1;
}

double PosteriorState::bin_center(std::uint32_t bin) const {
  if (bin < 1 || bin > weights_.size()) {
    throw std::out_of_range("PosteriorState: bin outside [1, n_bins]");
  }
  return (2.0 * bin - 1.0) / (2.0 * static_cast<double>(weights_.size()));
}

PmStepInfo pm_step(PosteriorState& st, const MdChannel& ch, double truth,
                   Rng& rng) {
  if (ch.output_alphabet_size() != 2) {
    throw std::invalid_argument("pm_step: binary-output channels only");
  }
  if (!(truth >= 0.0 && truth <= 1.0)) {
    throw std::domain_error("pm_step: truth outside [0,1]");
  }
  const std::uint32_t n = st.size();
  const double width = st.bin_width();

  // stable sort: equal weights stay in index order, which is what makes the
  // noiseless run collapse to plain bisection
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return st.weights()[a] > st.weights()[b];
  });

  // shortest nonempty prefix with cumulative mass closest to 1/2
  double cum = 0.0;
  double best_gap = 2.0;
  std::uint32_t best_len = 1;
  double best_mass = 0.0;
  for (std::uint32_t j = 0; j < n; ++j) {
    cum += st.weights()[order[j]];
    const double gap = std::abs(cum - 0.5);
    if (gap < best_gap) {
      best_gap = gap;
      best_len = j + 1;
      best_mass = cum;
    }
    if (cum >= 0.5) break;  // gaps only grow once the mass crosses 1/2
  }

  PmStepInfo info;
  info.query_bins.reserve(best_len);
  for (std::uint32_t j = 0; j < best_len; ++j) {
    info.query_bins.push_back(order[j] + 1);
  }
  std::sort(info.query_bins.begin(), info.query_bins.end());
  info.query_mass = best_mass;
  info.query_size = static_cast<double>(best_len) * width;

  // oracle bit: does the truth's bin belong to the query?
  const auto truth_raw = static_cast<std::uint32_t>(std::floor(truth * n)) + 1;
  const std::uint32_t truth_bin = std::min(truth_raw, n);
  info.oracle_bit =
      std::binary_search(info.query_bins.begin(), info.query_bins.end(), truth_bin)
          ? 1
          : 0;
  info.response = ch.sample_response(info.query_size, info.oracle_bit, rng);

  // Bayes update with the measurement-dependent likelihood at the realized size
  const double like1 = ch.transition_prob(info.query_size, 1, info.response);
  const double like0 = ch.transition_prob(info.query_size, 0, info.response);
  std::vector<double> w(st.weights());
  for (std::uint32_t j = 0; j < best_len; ++j) {
    w[order[j]] *= like1;
  }
  for (std::uint32_t j = best_len; j < n; ++j) {
    w[order[j]] *= like0;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) {
    throw std::runtime_error("pm_step: posterior collapsed to zero mass");
  }
  for (double& x : w) x /= total;
  st.set_weights(std::move(w));
  st.bump_step();
  return info;
}

TrialRecord pm_run(const MdChannel& ch, std::uint32_t n_bins,
                   std::uint64_t n_queries, double truth, double delta_eval,
                   Rng& rng, PmStopRule rule, double theta, double epsilon_term,
                   std::vector<PmStepInfo>* trace) {
  if (!(delta_eval > 0.0 && delta_eval < 1.0)) {
    throw std::invalid_argument("pm_run: delta_eval must lie in (0,1)");
  }
  if (!(epsilon_term >= 0.0 && epsilon_term < 1.0)) {
    throw std::invalid_argument("pm_run: epsilon_term must lie in [0,1)");
  }
  TrialRecord rec;
  rec.truth.assign(1, truth);

  const auto truth_raw = static_cast<std::uint32_t>(std::floor(truth * n_bins)) + 1;
  rec.true_bin = std::min(truth_raw, n_bins);

  // same up-front termination draw as the engine, shared-seed compatible
  const bool terminate = rng.uniform01() < epsilon_term;
  if (terminate) {
    rec.terminated = true;
    rec.tau = 0;
    rec.estimate.assign(1, 0.5);
    rec.linf_error = std::abs(0.5 - truth);
    rec.excess = rec.linf_error > delta_eval;
    return rec;
  }

  PosteriorState st(n_bins);
  std::uint64_t t = 0;
  for (; t < n_queries; ++t) {
    if (rule == PmStopRule::mass_threshold && st.max_weight() >= theta) break;
    PmStepInfo info = pm_step(st, ch, truth, rng);
    rec.query_sizes.add(info.query_size);
    if (trace) trace->push_back(std::move(info));
  }
  rec.tau = t;
  rec.capped = rule == PmStopRule::mass_threshold && st.max_weight() < theta;

  const std::uint32_t decoded = st.argmax_bin();
  rec.decoded_bin = decoded;
  rec.decoded_density = st.weight(decoded);  // posterior mass, not a density sum
  rec.estimate.assign(1, st.bin_center(decoded));
  rec.linf_error = std::abs(rec.estimate[0] - truth);
  rec.excess = rec.linf_error > delta_eval;
  return rec;
}

}  // namespace twentyq
