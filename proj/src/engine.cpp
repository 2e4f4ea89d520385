#include "twentyq/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "twentyq/infodensity.hpp"

namespace twentyq {

std::uint64_t ProcedureConfig::effective_max_steps() const {
  if (max_steps > 0) return max_steps;
  return 50 * static_cast<std::uint64_t>(std::ceil(lambda / 0.01));
}

void ProcedureConfig::validate(const MdChannel& ch) const {
  Partition partition(bins_per_dim, dim);  // overflow / range checks
  (void)partition;
  if (!(design_q > 0.0 && design_q < 1.0)) {
    throw std::invalid_argument("ProcedureConfig: design_q must lie in (0,1)");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("ProcedureConfig: lambda must be positive");
  }
  // 1.0 is allowed as the degenerate always-terminate branch
  if (!(epsilon_term >= 0.0 && epsilon_term <= 1.0)) {
    throw std::invalid_argument("ProcedureConfig: epsilon_term must lie in [0,1]");
  }
  // construction of the density params re-checks channel validity at f(q)
  DensityParams params(design_q, design_q, ch);
  (void)params;
}

void QuerySizeSummary::add(double size) {
  ++steps;
  mean += (size - mean) / static_cast<double>(steps);
  if (size < min) min = size;
  if (size > max) max = size;
}

namespace {

void finish_geometry(TrialRecord& rec, double delta_eval) {
  double err = 0.0;
  for (std::size_t j = 0; j < rec.truth.size(); ++j) {
    err = std::max(err, std::abs(rec.estimate[j] - rec.truth[j]));
  }
  rec.linf_error = err;
  rec.excess = err > delta_eval;
}

}  // namespace

TrialRecord run_trial(const ProcedureConfig& cfg, const MdChannel& ch,
                      std::span<const double> truth, double delta_eval,
                      Rng& rng, std::vector<StepTrace>* trace) {
  cfg.validate(ch);
  if (!(delta_eval > 0.0 && delta_eval < 1.0)) {
    throw std::invalid_argument("run_trial: delta_eval must lie in (0,1)");
  }
  const Partition partition(cfg.bins_per_dim, cfg.dim);
  if (truth.size() != cfg.dim) {
    throw std::invalid_argument("run_trial: truth has wrong dimension");
  }

  TrialRecord rec;
  rec.truth.assign(truth.begin(), truth.end());
  rec.true_bin = partition.flatten(partition.locate(truth));

  // Algorithm-2 branch: one unconditional draw keeps the downstream stream
  // aligned across epsilon_term values under a shared seed.
  const bool terminate = rng.uniform01() < cfg.epsilon_term;
  if (terminate) {
    rec.terminated = true;
    rec.tau = 0;
    rec.estimate.assign(cfg.dim, 0.5);
    finish_geometry(rec, delta_eval);
    return rec;
  }

  const std::uint64_t n_bins = partition.total_bins();
  const DensityParams params(cfg.design_q, cfg.design_q, ch);
  DensityAccumulator acc(params, n_bins);
  std::vector<std::uint8_t> bits(n_bins);
  const std::uint64_t cap = cfg.effective_max_steps();

  const std::uint64_t true_slot = rec.true_bin - 1;
  for (std::uint64_t t = 1; t <= cap; ++t) {
    std::uint64_t selected = 0;
    for (std::uint64_t b = 0; b < n_bins; ++b) {
      const std::uint8_t bit = rng.bernoulli(cfg.design_q) ? 1 : 0;
      bits[b] = bit;
      selected += bit;
    }
    const double size = static_cast<double>(selected) / static_cast<double>(n_bins);
    const int oracle_bit = bits[true_slot];
    const int y = ch.sample_response(size, oracle_bit, rng);
    acc.accumulate(bits, y);
    rec.query_sizes.add(size);
    if (trace) trace->push_back({size, oracle_bit, y});

    const auto [arg, max_density] = acc.max_bin();
    if (max_density >= cfg.lambda) {
      rec.tau = t;
      rec.decoded_bin = cfg.decode_rule == DecodeRule::largest_qualifying
                            ? acc.largest_bin_at_least(cfg.lambda)
                            : arg;
      rec.decoded_density = acc.density(rec.decoded_bin);
      rec.estimate = partition.center(partition.unflatten(rec.decoded_bin));
      finish_geometry(rec, delta_eval);
      return rec;
    }
  }

  // cap reached: keep the record, flag it, decode by best effort
  rec.capped = true;
  rec.tau = cap;
  const auto [arg, max_density] = acc.max_bin();
  rec.decoded_bin = arg;
  rec.decoded_density = max_density;
  rec.estimate = partition.center(partition.unflatten(rec.decoded_bin));
  finish_geometry(rec, delta_eval);
  return rec;
}

StoppingTimePair stopping_time_pair(const ProcedureConfig& cfg,
                                    const MdChannel& ch, Rng& rng) {
  cfg.validate(ch);
  const Partition partition(cfg.bins_per_dim, cfg.dim);
  const std::uint64_t n_bins = partition.total_bins();
  if (n_bins < 2) {
    throw std::invalid_argument("stopping_time_pair: need at least two bins");
  }
  const DensityParams params(cfg.design_q, cfg.design_q, ch);
  const std::uint64_t cap = cfg.effective_max_steps();

  // only bins 1 and 2 need explicit bits; the other selections collapse into
  // one binomial draw for the realized query size
  double v1 = 0.0, v2 = 0.0;
  StoppingTimePair out;
  for (std::uint64_t t = 1; t <= cap && (out.tau1 == 0 || out.tau2 == 0); ++t) {
    const int b1 = rng.bernoulli(cfg.design_q) ? 1 : 0;
    const int b2 = rng.bernoulli(cfg.design_q) ? 1 : 0;
    const std::uint64_t rest = rng.binomial(n_bins - 2, cfg.design_q);
    const double size =
        static_cast<double>(rest + static_cast<std::uint64_t>(b1 + b2)) /
        static_cast<double>(n_bins);
    const int y = ch.sample_response(size, b1, rng);  // transmitted bin is 1
    if (out.tau1 == 0) {
      v1 += params.info_density(b1, y);
      if (v1 >= cfg.lambda) out.tau1 = t;
    }
    if (out.tau2 == 0) {
      v2 += params.info_density(b2, y);
      if (v2 >= cfg.lambda) out.tau2 = t;
    }
  }
  if (out.tau1 == 0) {
    out.tau1 = cap;
    out.capped1 = true;
  }
  if (out.tau2 == 0) {
    out.tau2 = cap;
    out.capped2 = true;
  }
  return out;
}

double choose_lambda(std::uint32_t bins_per_dim, std::uint32_t dim,
                     double target_eps) {
  if (!(target_eps > 0.0 && target_eps < 1.0)) {
    throw std::invalid_argument("choose_lambda: target_eps must lie in (0,1)");
  }
  const Partition partition(bins_per_dim, dim);
  if (partition.total_bins() < 2) {
    throw std::invalid_argument("choose_lambda: need M^d >= 2");
  }
  return std::log(static_cast<double>(partition.total_bins() - 1) / target_eps);
}

}  // namespace twentyq
