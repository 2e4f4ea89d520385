#include "twentyq/analysis.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "twentyq/infodensity.hpp"

namespace twentyq {

std::string procedure_name(Procedure p) {
  switch (p) {
    case Procedure::alg1: return "alg1";
    case Procedure::alg2: return "alg2";
    case Procedure::sorted_pm: return "sorted_pm";
    case Procedure::sorted_pm_terminated: return "sorted_pm_terminated";
    case Procedure::measurement_independent: return "measurement_independent";
  }
  throw std::logic_error("procedure_name: unreachable");
}

Procedure procedure_from_name(const std::string& name) {
  if (name == "alg1") return Procedure::alg1;
  if (name == "alg2") return Procedure::alg2;
  if (name == "sorted_pm") return Procedure::sorted_pm;
  if (name == "sorted_pm_terminated") return Procedure::sorted_pm_terminated;
  if (name == "measurement_independent") return Procedure::measurement_independent;
  throw std::invalid_argument("unknown procedure: " + name);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binary_entropy: argument outside [0,1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

double beta(double nu, double q, const LipschitzFn& f) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("beta: q outside [0,1]");
  }
  const double c = nu * f(q);
  if (!(c >= 0.0 && c <= 0.5)) {
    throw std::invalid_argument("beta: nu f(q) outside [0, 1/2]");
  }
  return q * (1.0 - c) + (1.0 - q) * c;
}

namespace {

/// Golden-section maximization of fn on [lo, hi] down to the x-tolerance.
double golden_section_max(const std::function<double(double)>& fn, double lo,
                          double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5)-1)/2
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

CapacityResult maximize_over_q(const std::function<double(double)>& objective,
                               double tol) {
  // coarse bracket first; affine state maps can make the objective multimodal
  constexpr int kGridSteps = 1000;
  double best_q = 0.0;
  double best_v = objective(0.0);
  for (int i = 1; i <= kGridSteps; ++i) {
    const double q = static_cast<double>(i) / kGridSteps;
    const double v = objective(q);
    if (v > best_v) {
      best_v = v;
      best_q = q;
    }
  }
  const double step = 1.0 / kGridSteps;
  const double lo = best_q > step ? best_q - step : 0.0;
  const double hi = best_q + step < 1.0 ? best_q + step : 1.0;
  const double refined = golden_section_max(objective, lo, hi, tol);
  CapacityResult res;
  res.argmax_q = objective(refined) >= best_v ? refined : best_q;
  res.value = objective(res.argmax_q);
  res.method = "grid+golden_section";
  res.tolerance = tol;
  return res;
}

}  // namespace

CapacityResult capacity_bsc(double nu, const LipschitzFn& f, double tol) {
  // constructing the channel revalidates nu and f
  (void)MdChannel::bsc(nu, f);
  auto objective = [&](double q) {
    return binary_entropy(beta(nu, q, f)) - binary_entropy(nu * f(q));
  };
  return maximize_over_q(objective, tol);
}

CapacityResult capacity_general(const MdChannel& ch, double tol) {
  auto objective = [&](double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;  // degenerate inputs carry no information
    return DensityParams(q, q, ch).expected_density();
  };
  return maximize_over_q(objective, tol);
}

double sorted_pm_rate(double nu, const LipschitzFn& f) {
  const double c = nu * f(0.0);
  if (!(c >= 0.0 && c <= 0.5)) {
    throw std::domain_error("sorted_pm_rate: nu f(0) outside [0, 1/2]");
  }
  return std::log(2.0) - binary_entropy(c);
}

std::vector<RateCurve> rate_curves(double nu, const LipschitzFn& f,
                                   std::span<const double> eps_grid,
                                   unsigned dim,
                                   std::span<const Procedure> procedures,
                                   double eps_max) {
  if (dim < 1) throw std::invalid_argument("rate_curves: dim must be >= 1");
  if (!(eps_max > 0.0 && eps_max < 1.0)) {
    throw std::invalid_argument("rate_curves: eps_max must lie in (0,1)");
  }
  std::vector<Procedure> wanted(procedures.begin(), procedures.end());
  if (wanted.empty()) {
    wanted = {Procedure::alg2, Procedure::measurement_independent};
    if (dim == 1) {
      wanted.push_back(Procedure::sorted_pm);
      wanted.push_back(Procedure::sorted_pm_terminated);
    }
  }

  const CapacityResult cf = capacity_bsc(nu, f);
  const CapacityResult cmi = capacity_bsc(nu, LipschitzFn::constant(f(0.0)));
  const double cpm = sorted_pm_rate(nu, f);
  const double d = static_cast<double>(dim);

  std::vector<RateCurve> curves;
  for (Procedure p : wanted) {
    RateCurve curve;
    curve.procedure = p;
    curve.channel_summary = MdChannel::bsc(nu, f).describe();
    switch (p) {
      case Procedure::alg1:
        throw std::invalid_argument(
            "rate_curves: alg1 has no epsilon-indexed curve; its asymptote is "
            "the alg2 curve at eps=0");
      case Procedure::alg2:
        curve.argmax_q = cf.argmax_q;
        break;
      case Procedure::measurement_independent:
        curve.argmax_q = cmi.argmax_q;
        break;
      case Procedure::sorted_pm:
      case Procedure::sorted_pm_terminated:
        if (dim != 1) {
          throw std::invalid_argument("rate_curves: sorted PM curves require d=1");
        }
        break;
    }
    for (double raw_eps : eps_grid) {
      if (!(raw_eps >= 0.0 && raw_eps < 1.0)) {
        throw std::invalid_argument("rate_curves: epsilon outside [0,1)");
      }
      const double eps = raw_eps > eps_max ? eps_max : raw_eps;
      RatePoint pt;
      pt.epsilon = eps;
      switch (p) {
        case Procedure::alg2:
          pt.rate = cf.value / (d * (1.0 - eps));
          break;
        case Procedure::measurement_independent:
          pt.rate = cmi.value / (d * (1.0 - eps));
          break;
        case Procedure::sorted_pm:
          pt.rate = cpm;
          break;
        case Procedure::sorted_pm_terminated:
          pt.rate = cpm / (1.0 - eps);
          break;
        case Procedure::alg1:
          break;  // rejected above
      }
      curve.points.push_back(pt);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::optional<double> crossover_epsilon(double nu, const LipschitzFn& f,
                                        double tol) {
  const double cf = capacity_bsc(nu, f).value;
  const double cpm = sorted_pm_rate(nu, f);
  // g(eps) = cf/(1-eps) - cpm, increasing in eps; a root in (0,1) needs cf < cpm
  if (!(cf > 0.0) || !(cf < cpm)) return std::nullopt;
  double lo = 0.0, hi = 1.0 - cf / cpm + 1e-9;
  if (hi >= 1.0) hi = 1.0 - 1e-15;
  auto g = [&](double e) { return cf / (1.0 - e) - cpm; };
  if (g(lo) >= 0.0 || g(hi) <= 0.0) {
    // widen once; the analytic root 1 - cf/cpm is strictly inside (0,1)
    hi = std::min(1.0 - 1e-15, 1.0 - 0.5 * cf / cpm);
    if (g(hi) <= 0.0) return std::nullopt;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace twentyq
