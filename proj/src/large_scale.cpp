#include "twentyq/large_scale.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "twentyq/infodensity.hpp"

namespace twentyq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegerModeLimit = 2147483648.0;  // 2^31
}  // namespace

WrongWalkDp::WrongWalkDp(const double d[2][2], double lambda)
    : d00_(d[0][0]), d01_(d[0][1]), d10_(d[1][0]), d11_(d[1][1]), lambda_(lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("WrongWalkDp: lambda must be positive");
  }
  mass_.assign(1, std::vector<double>(1, 1.0));
}

double WrongWalkDp::walk_value(std::uint64_t a1, std::uint64_t a0) const {
  // zero-count classes are skipped so -inf densities cannot produce NaN
  double v = 0.0;
  if (a1 > 0) v += static_cast<double>(a1) * d11_;
  if (n1_ > a1) v += static_cast<double>(n1_ - a1) * d01_;
  if (a0 > 0) v += static_cast<double>(a0) * d10_;
  if (n0_ > a0) v += static_cast<double>(n0_ - a0) * d00_;
  return v;
}

void WrongWalkDp::prune() {
  double newly = 0.0;
  for (std::uint64_t a1 = 0; a1 <= n1_; ++a1) {
    auto& row = mass_[a1];
    for (std::uint64_t a0 = 0; a0 <= n0_; ++a0) {
      double& m = row[a0];
      if (m > 0.0 && walk_value(a1, a0) >= lambda_) {
        newly += m;
        m = 0.0;
      }
    }
  }
  last_increment_ = newly;
  crossed_ += newly;
}

void WrongWalkDp::step(int y, double p_bit) {
  const double p = p_bit;
  const double q = 1.0 - p_bit;
  if (y == 1) {
    ++n1_;
    mass_.emplace_back(n0_ + 1, 0.0);
    for (std::uint64_t a1 = n1_; a1 >= 1; --a1) {
      auto& row = mass_[a1];
      const auto& below = mass_[a1 - 1];
      for (std::uint64_t a0 = 0; a0 <= n0_; ++a0) {
        row[a0] = row[a0] * q + below[a0] * p;
      }
    }
    for (double& m : mass_[0]) m *= q;
  } else {
    ++n0_;
    for (std::uint64_t a1 = 0; a1 <= n1_; ++a1) {
      auto& row = mass_[a1];
      row.push_back(0.0);
      for (std::uint64_t a0 = n0_; a0 >= 1; --a0) {
        row[a0] = row[a0] * q + row[a0 - 1] * p;
      }
      row[0] *= q;
    }
  }
  prune();
}

std::uint64_t conditional_crossing_count(double n, double p, Rng& rng) {
  if (!(p > 0.0) || !(n >= 1.0)) return 1;
  if (p >= 1.0) return static_cast<std::uint64_t>(n);
  const double log1mp = std::log1p(-p);
  const double z = -std::expm1(n * log1mp);  // P(N >= 1)
  if (!(z > 0.0)) return 1;
  const double u = rng.uniform01();
  // sequential inversion of Binomial(n, p) conditioned on N >= 1
  double pk = std::exp(std::log(n) + std::log(p) + (n - 1.0) * log1mp);
  double cdf = 0.0;
  const double odds = p / (1.0 - p);
  for (std::uint64_t k = 1; k <= 4096; ++k) {
    cdf += pk / z;
    if (u < cdf) return k;
    pk *= ((n - static_cast<double>(k)) / (static_cast<double>(k) + 1.0)) * odds;
    if (!(pk > 0.0)) return k;
  }
  return 4096;
}

LargeMAlg1Sim::LargeMAlg1Sim(const MdChannel& ch, double num_bins,
                             double design_q, double lambda,
                             std::uint64_t max_steps)
    : ch_(&ch),
      num_bins_(num_bins),
      log_num_bins_(std::log(num_bins)),
      design_q_(design_q),
      lambda_(lambda),
      max_steps_(max_steps) {
  if (ch.output_alphabet_size() != 2) {
    throw std::invalid_argument("LargeMAlg1Sim: binary-output channels only");
  }
  if (!(num_bins >= 2.0)) {
    throw std::invalid_argument("LargeMAlg1Sim: need at least two bins");
  }
  if (!(design_q > 0.0 && design_q < 1.0)) {
    throw std::invalid_argument("LargeMAlg1Sim: design_q must lie in (0,1)");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("LargeMAlg1Sim: lambda must be positive");
  }
  if (max_steps == 0) {
    throw std::invalid_argument("LargeMAlg1Sim: max_steps must be positive");
  }
  integer_mode_ = num_bins <= kIntegerModeLimit && num_bins == std::floor(num_bins);
  if (integer_mode_) m_int_ = static_cast<std::uint64_t>(num_bins);
  const DensityParams params(design_q, design_q, ch);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double cond = ch.transition_prob(design_q, x, y);
      d_[x][y] = cond == 0.0 ? -kInf : params.info_density(x, y);
    }
  }
}

ScaledTrial LargeMAlg1Sim::run_trial(Rng& rng) const {
  ScaledTrial trial;

  // truth drawn uniformly: a bin plus a within-bin offset
  std::uint64_t w_int = 0;
  double w_pos = 0.0;
  if (integer_mode_) {
    w_int = 1 + rng.below(m_int_);
  } else {
    w_pos = rng.uniform01();
  }
  const double frac = rng.uniform01();  // truth offset within its bin

  WrongWalkDp dp(d_, lambda_);
  const double others = num_bins_ - 1.0;
  double true_walk = 0.0;
  double survivors = 1.0;  // per-walk survival probability so far

  for (std::uint64_t t = 1; t <= max_steps_; ++t) {
    const int bit = rng.bernoulli(design_q_) ? 1 : 0;
    double size;
    double p_bit;  // selection weight of one non-transmitted bin given the size
    if (integer_mode_) {
      const std::uint64_t selected =
          static_cast<std::uint64_t>(bit) + rng.binomial(m_int_ - 1, design_q_);
      size = static_cast<double>(selected) / num_bins_;
      p_bit = static_cast<double>(selected - static_cast<std::uint64_t>(bit)) / others;
    } else {
      const double sd = std::sqrt(others * design_q_ * (1.0 - design_q_)) / num_bins_;
      size = design_q_ + (static_cast<double>(bit) - design_q_) / num_bins_ +
             rng.normal(0.0, sd);
      size = std::clamp(size, 0.0, 1.0);
      p_bit = std::clamp(size + (size - static_cast<double>(bit)) / others, 0.0, 1.0);
    }
    const int y = ch_->sample_response(size, bit, rng);
    true_walk += d_[bit][y];

    dp.step(y, p_bit);
    const double rho = survivors > 0.0 ? dp.last_increment() / survivors : 0.0;
    survivors -= dp.last_increment();
    const double p_trigger =
        rho > 0.0 ? -std::expm1(others * std::log1p(-std::min(rho, 1.0))) : 0.0;
    const bool wrong_trigger = p_trigger > 0.0 && rng.bernoulli(p_trigger);
    const bool true_trigger = true_walk >= lambda_;
    if (!wrong_trigger && !true_trigger) continue;

    trial.tau = t;
    std::uint64_t n_qualifiers =
        wrong_trigger ? conditional_crossing_count(others, rho, rng) : 0;

    if (integer_mode_) {
      std::uint64_t decoded = true_trigger ? w_int : 0;
      for (std::uint64_t i = 0; i < n_qualifiers; ++i) {
        std::uint64_t idx = 1 + rng.below(m_int_ - 1);
        if (idx >= w_int) ++idx;  // uniform over [1, M] minus the truth bin
        decoded = std::max(decoded, idx);
      }
      trial.correct = decoded == w_int;
      if (trial.correct) {
        trial.log_resolution = std::log(std::abs(0.5 - frac)) - log_num_bins_;
        trial.excess = false;
      } else {
        const double delta =
            static_cast<double>(decoded) - static_cast<double>(w_int);
        const double scaled = std::abs(delta + 0.5 - frac);
        trial.log_resolution = std::log(scaled) - log_num_bins_;
        trial.excess = scaled > 1.0;
      }
    } else {
      double best_pos = -1.0;
      for (std::uint64_t i = 0; i < n_qualifiers; ++i) {
        best_pos = std::max(best_pos, rng.uniform01());
      }
      if (true_trigger && w_pos >= best_pos) {
        trial.correct = true;
        trial.log_resolution = std::log(std::abs(0.5 - frac)) - log_num_bins_;
        trial.excess = false;
      } else {
        trial.correct = false;
        const double dist = std::max(std::abs(best_pos - w_pos), 1e-300);
        trial.log_resolution = std::log(dist);
        trial.excess = trial.log_resolution > -log_num_bins_;
      }
    }
    return trial;
  }

  trial.tau = max_steps_;
  trial.capped = true;
  trial.correct = false;
  trial.log_resolution = 0.0;  // resolution pessimistically 1
  trial.excess = true;
  return trial;
}

ContinuumPmSim::ContinuumPmSim(const MdChannel& ch) : ch_(&ch) {
  if (ch.output_alphabet_size() != 2) {
    throw std::invalid_argument("ContinuumPmSim: binary-output channels only");
  }
}

namespace {

struct Piece {
  double len;   // spatial length
  double mass;  // posterior mass
  double density() const { return mass / len; }
};

}  // namespace

ScaledTrial ContinuumPmSim::run(std::uint64_t n_queries, Rng& rng) const {
  std::vector<Piece> pieces{{1.0, 1.0}};
  std::size_t truth_piece = 0;
  double truth_rel = rng.uniform01();  // truth position within its piece

  ScaledTrial trial;
  for (std::uint64_t t = 0; t < n_queries; ++t) {
    // top-density pieces first; stable order keeps ties deterministic
    std::vector<std::size_t> order(pieces.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pieces[a].density() > pieces[b].density();
    });

    // walk down the sorted pieces to mass exactly 1/2, cutting one piece
    std::vector<std::uint8_t> in_query(pieces.size(), 0);
    std::size_t boundary = pieces.size();
    double boundary_fraction = 0.0;
    double cum = 0.0;
    double query_size = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const Piece& pc = pieces[order[k]];
      if (cum + pc.mass <= 0.5 || pc.mass == 0.0) {
        cum += pc.mass;
        query_size += pc.len;
        in_query[order[k]] = 1;
        if (cum >= 0.5) break;
      } else {
        boundary = order[k];
        boundary_fraction = (0.5 - cum) / pc.mass;
        query_size += boundary_fraction * pc.len;
        break;
      }
    }

    // oracle answer: membership of the truth in the query region; the left
    // part of a cut piece is the included one
    int oracle_bit;
    if (boundary == truth_piece) {
      oracle_bit = truth_rel < boundary_fraction ? 1 : 0;
    } else {
      oracle_bit = in_query[truth_piece] ? 1 : 0;
    }
    const int y = ch_->sample_response(std::min(query_size, 1.0), oracle_bit, rng);

    const double like1 = ch_->transition_prob(std::min(query_size, 1.0), 1, y);
    const double like0 = ch_->transition_prob(std::min(query_size, 1.0), 0, y);

    // split the boundary piece, then scale every piece by its likelihood
    if (boundary != pieces.size() && boundary_fraction > 0.0 &&
        boundary_fraction < 1.0) {
      const Piece original = pieces[boundary];
      Piece left{original.len * boundary_fraction,
                 original.mass * boundary_fraction};
      Piece right{original.len - left.len, original.mass - left.mass};
      pieces[boundary] = left;
      pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(boundary) + 1, right);
      in_query.insert(in_query.begin() + static_cast<std::ptrdiff_t>(boundary) + 1, 0);
      in_query[boundary] = 1;
      if (truth_piece == boundary) {
        if (truth_rel < boundary_fraction) {
          truth_rel /= boundary_fraction;
        } else {
          truth_piece = boundary + 1;
          truth_rel = (truth_rel - boundary_fraction) / (1.0 - boundary_fraction);
        }
      } else if (truth_piece > boundary) {
        ++truth_piece;
      }
    }

    double total = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      pieces[i].mass *= in_query[i] ? like1 : like0;
      total += pieces[i].mass;
    }
    if (!(total > 0.0)) {
      throw std::runtime_error("ContinuumPmSim: posterior collapsed");
    }
    for (Piece& pc : pieces) pc.mass /= total;
  }
  trial.tau = n_queries;

  // estimate: midpoint of the top-density piece
  std::size_t best = 0;
  double best_density = -1.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].density() > best_density) {
      best_density = pieces[i].density();
      best = i;
    }
  }
  double dist;
  if (best == truth_piece) {
    dist = std::abs(0.5 - truth_rel) * pieces[best].len;
    trial.correct = true;
  } else {
    // sum of strictly positive spans: no cancellation however small the pieces
    dist = 0.5 * pieces[best].len;
    const auto [lo, hi] = std::minmax(best, truth_piece);
    for (std::size_t i = lo + 1; i < hi; ++i) dist += pieces[i].len;
    dist += best < truth_piece ? truth_rel * pieces[truth_piece].len
                               : (1.0 - truth_rel) * pieces[truth_piece].len;
    trial.correct = false;
  }
  trial.log_resolution = std::log(std::max(dist, 1e-300));
  trial.excess = false;  // no bin grid here; callers judge via quantiles
  return trial;
}

}  // namespace twentyq
