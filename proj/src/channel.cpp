#include "twentyq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace twentyq {

namespace {
constexpr double kRowSumTol = 1e-12;
}

double LipschitzFn::operator()(double size) const {
  if (!(size >= 0.0 && size <= 1.0)) {
    throw std::domain_error("LipschitzFn: argument outside [0,1]");
  }
  return a + b * size;
}

std::string LipschitzFn::describe() const {
  std::ostringstream os;
  if (is_constant()) {
    os << "f(q)=" << a;
  } else {
    os << "f(q)=" << a << (b < 0 ? "" : "+") << b << "q";
  }
  return os.str();
}

MdChannel MdChannel::bsc(double nu, LipschitzFn f) {
  if (!(nu > 0.0 && nu <= 1.0)) {
    throw std::invalid_argument("MdChannel::bsc: nu must lie in (0,1]");
  }
  if (f.min_on_unit_interval() < 0.0) {
    throw std::invalid_argument("MdChannel::bsc: f must be nonnegative on [0,1]");
  }
  // reject rather than clamp: a crossover above 1/2 silently corrupts analysis
  if (nu * f.max_on_unit_interval() > 0.5) {
    throw std::invalid_argument(
        "MdChannel::bsc: nu*f(q) must stay <= 1/2 on [0,1]");
  }
  MdChannel ch;
  ch.family_ = Family::bsc;
  ch.nu_ = nu;
  ch.f_ = f;
  ch.output_size_ = 2;
  return ch;
}

MdChannel MdChannel::tabulated(
    std::vector<double> anchor_states,
    std::vector<std::vector<std::vector<double>>> anchor_rows) {
  if (anchor_states.size() < 2 || anchor_states.size() != anchor_rows.size()) {
    throw std::invalid_argument("MdChannel::tabulated: need matching anchors");
  }
  if (anchor_states.front() != 0.0 || anchor_states.back() != 1.0) {
    throw std::invalid_argument("MdChannel::tabulated: anchors must cover [0,1]");
  }
  if (!std::is_sorted(anchor_states.begin(), anchor_states.end())) {
    throw std::invalid_argument("MdChannel::tabulated: anchors must be sorted");
  }
  const std::size_t ny = anchor_rows.front().empty() ? 0 : anchor_rows.front()[0].size();
  if (ny < 2) {
    throw std::invalid_argument("MdChannel::tabulated: output alphabet must have >= 2 symbols");
  }
  for (const auto& mat : anchor_rows) {
    if (mat.size() != 2) {
      throw std::invalid_argument("MdChannel::tabulated: input alphabet is binary");
    }
    for (const auto& row : mat) {
      if (row.size() != ny) {
        throw std::invalid_argument("MdChannel::tabulated: ragged row");
      }
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) throw std::invalid_argument("MdChannel::tabulated: negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTol) {
        throw std::invalid_argument("MdChannel::tabulated: row does not sum to 1");
      }
    }
  }
  MdChannel ch;
  ch.family_ = Family::tabulated;
  ch.output_size_ = static_cast<int>(ny);
  ch.anchor_states_ = std::move(anchor_states);
  ch.anchor_rows_ = std::move(anchor_rows);
  return ch;
}

void MdChannel::check_state(double state) const {
  if (!(state >= 0.0 && state <= 1.0)) {
    throw std::domain_error("MdChannel: state outside [0,1]");
  }
}

double MdChannel::crossover(double state) const {
  if (family_ != Family::bsc) {
    throw std::logic_error("MdChannel::crossover: not a bsc channel");
  }
  check_state(state);
  return nu_ * f_(state);
}

void MdChannel::interpolated_row(double state, int x, double* row) const {
  auto hi = std::upper_bound(anchor_states_.begin(), anchor_states_.end(), state);
  if (hi == anchor_states_.end()) --hi;  // state == 1.0
  const auto hi_idx = static_cast<std::size_t>(hi - anchor_states_.begin());
  const std::size_t lo_idx = hi_idx - 1;
  const double lo_s = anchor_states_[lo_idx];
  const double hi_s = anchor_states_[hi_idx];
  const double t = hi_s > lo_s ? (state - lo_s) / (hi_s - lo_s) : 0.0;
  const auto& lo_row = anchor_rows_[lo_idx][static_cast<std::size_t>(x)];
  const auto& hi_row = anchor_rows_[hi_idx][static_cast<std::size_t>(x)];
  for (int y = 0; y < output_size_; ++y) {
    row[y] = (1.0 - t) * lo_row[static_cast<std::size_t>(y)] +
             t * hi_row[static_cast<std::size_t>(y)];
  }
}

double MdChannel::transition_prob(double state, int x, int y) const {
  check_state(state);
  if (x != 0 && x != 1) {
    throw std::invalid_argument("MdChannel: input symbol must be 0 or 1");
  }
  if (y < 0 || y >= output_size_) {
    throw std::invalid_argument("MdChannel: unknown output symbol");
  }
  if (family_ == Family::bsc) {
    const double c = nu_ * f_(state);
    return y == x ? 1.0 - c : c;
  }
  std::vector<double> row(static_cast<std::size_t>(output_size_));
  interpolated_row(state, x, row.data());
  return row[static_cast<std::size_t>(y)];
}

int MdChannel::sample_response(double state, int x, Rng& rng) const {
  check_state(state);
  if (x != 0 && x != 1) {
    throw std::invalid_argument("MdChannel: input symbol must be 0 or 1");
  }
  if (family_ == Family::bsc) {
    const double c = nu_ * f_(state);
    return rng.bernoulli(c) ? 1 - x : x;
  }
  std::vector<double> row(static_cast<std::size_t>(output_size_));
  interpolated_row(state, x, row.data());
  const double u = rng.uniform01();
  double cum = 0.0;
  for (int y = 0; y < output_size_; ++y) {
    cum += row[static_cast<std::size_t>(y)];
    if (u < cum) return y;
  }
  return output_size_ - 1;
}

std::string MdChannel::describe() const {
  std::ostringstream os;
  if (family_ == Family::bsc) {
    os << "mdBSC(nu=" << nu_ << ", " << f_.describe() << ")";
  } else {
    os << "tabulated(|Y|=" << output_size_ << ", anchors=" << anchor_states_.size() << ")";
  }
  return os.str();
}

ContinuityReport check_continuity(const MdChannel& ch, double q, double xi,
                                  double bound_c) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("check_continuity: q must lie in (0,1)");
  }
  if (!(xi > 0.0 && xi < std::min(q, 1.0 - q))) {
    throw std::domain_error("check_continuity: need 0 < xi < min(q, 1-q)");
  }
  ContinuityReport rep;
  rep.q = q;
  rep.xi = xi;
  rep.bound_c = bound_c;
  rep.lhs = 0.0;
  for (const double qp : {q - xi, q + xi}) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < ch.output_alphabet_size(); ++y) {
        const double p0 = ch.transition_prob(q, x, y);
        const double p1 = ch.transition_prob(qp, x, y);
        double entry;
        if (p0 == p1) {
          entry = 0.0;  // covers identical zero entries of constant channels
        } else if (p0 <= 0.0 || p1 <= 0.0) {
          entry = std::numeric_limits<double>::infinity();
        } else {
          entry = std::abs(std::log(p0 / p1));
        }
        rep.lhs = std::max(rep.lhs, entry);
      }
    }
  }
  rep.satisfied = rep.lhs <= bound_c * xi;
  return rep;
}

}  // namespace twentyq
