#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twentyq/channel.hpp"

namespace twentyq {

enum class Procedure {
  alg1,
  alg2,
  sorted_pm,
  sorted_pm_terminated,
  measurement_independent,
};

std::string procedure_name(Procedure p);
Procedure procedure_from_name(const std::string& name);

/// Binary entropy -p log p - (1-p) log(1-p) in nats, with 0 log 0 = 0.
/// Throws std::domain_error outside [0,1].
double binary_entropy(double p);

/// beta(nu, q) = q(1 - nu f(q)) + (1-q) nu f(q); for the bsc family this is
/// the output marginal P_Y(1) under a Bern(q) input at state q.
double beta(double nu, double q, const LipschitzFn& f);

struct CapacityResult {
  double value = 0.0;     ///< nats per query
  double argmax_q = 0.0;  ///< maximizing Bernoulli design weight
  std::string method;     ///< "grid+golden_section"
  double tolerance = 0.0;
};

/// max over q in [0,1] of h_b(beta(nu,q)) - h_b(nu f(q)).
/// Coarse 1e-3 grid bracket first (the objective need not be unimodal for
/// affine f), then golden-section refinement to the given q-tolerance.
CapacityResult capacity_bsc(double nu, const LipschitzFn& f, double tol = 1e-10);

/// max over q in [0,1] of E[i_{q,f(q)}(X;Y)], the expectation enumerated
/// exactly over the finite alphabet. Agrees with capacity_bsc on bsc
/// channels through an independent code path.
CapacityResult capacity_general(const MdChannel& ch, double tol = 1e-10);

/// log 2 - h_b(nu f(0)): the sorted-posterior-matching decay rate.
double sorted_pm_rate(double nu, const LipschitzFn& f);

struct RatePoint {
  double epsilon = 0.0;
  double rate = 0.0;  ///< nats per query per dimension
};

struct RateCurve {
  Procedure procedure = Procedure::alg2;
  std::string channel_summary;
  double argmax_q = 0.0;  ///< 0 when not applicable (sorted PM curves)
  std::vector<RatePoint> points;
};

/// Asymptotic resolution-decay rates per query per dimension across an
/// epsilon grid:
///   alg2                    -> C_f(nu) / (d (1-eps))
///   sorted_pm               -> C^sortPM_f(nu), constant (d = 1 only)
///   sorted_pm_terminated    -> C^sortPM_f(nu) / (1-eps) (d = 1 only)
///   measurement_independent -> C_mi / (d (1-eps)), with the constant channel
///                              frozen at alpha = f(0)
/// Grid entries are clamped to eps_max (< 1) to keep the 1/(1-eps) pole out.
/// Requesting a sorted PM curve with dim != 1 throws std::invalid_argument.
std::vector<RateCurve> rate_curves(double nu, const LipschitzFn& f,
                                   std::span<const double> eps_grid,
                                   unsigned dim,
                                   std::span<const Procedure> procedures = {},
                                   double eps_max = 0.99);

/// Epsilon where the alg2 curve C_f/(1-eps) meets the constant sorted-PM
/// level, found by bisection; empty when no crossing exists in (0,1).
std::optional<double> crossover_epsilon(double nu, const LipschitzFn& f,
                                        double tol = 1e-12);

}  // namespace twentyq
