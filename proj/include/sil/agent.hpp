#pragma once

#include <optional>

namespace sil {

// Acceptance threshold plus per-round discount rate.
struct Scenario {
  double theta;
  double r;
  void validate() const;
};

// m: the critical value of C below which positive-effort utility exists.
// t_prime: root of (t+2)/(t e^(2t+2)) = 1 on (0, ln 2).
struct IncentiveConstant {
  double m;
  double t_prime;
};

IncentiveConstant solve_incentive_constant(double tol = 1e-10);

// Solved once per process, then read-only.
const IncentiveConstant& incentive_constant();

// C(theta, r, x0) = -ln(sqrt((theta^-2-1)/(x0^-2-1))) * ln(1+r).
// Zero at x0 == theta, negative (flagged by sign) for x0 > theta.
double factor_C(double theta, double r, double x0);

// Continuous rounds until acceptance at effort k; 0 when x0 >= theta,
// +infinity when k == 0 and x0 < theta.
double hitting_time(double theta, double x0, double k);

// U = (1+r)^-H - k, with U(0) = 0 when x0 < theta and U = 1 - k at x0 >= theta.
double utility(double k, double theta, double r, double x0);

enum class Action { Improve, Manipulate, Abstain };

struct BestResponse {
  Action action;
  std::optional<double> effort;  // present iff action == Improve
  double utility;
};

// Unique utility-maximizing effort when C(theta,r,x0) < m; Abstain otherwise.
BestResponse optimal_effort(double theta, double r, double x0);
BestResponse optimal_effort(double theta, double r, double x0, double m);

// Smallest x0 incentivized to improve under (theta, r):
// (1 + (theta^-2 - 1) exp(2m/ln(1+r)))^(-1/2).
double min_x0_to_improve(double theta, double r, double m);

// Largest threshold that still incentivizes x0; inverse of min_x0_to_improve.
double max_theta_to_incentivize(double x0, double r, double m);

// Root of 2x^2 + 2x^3 = 1 on (0,1).
double forgetting_effort_root();

// Upper bound k_hat on the optimal effort under forgetting:
// min( xh^2/(2xh^2+2xh^3), x0(x0^2+x0-sqrt(x0^4-x0^2+1))/(2x0^2+2x0^3-1) ),
// with the second expression taken as its continuous limit at x0 == xh.
double forgetting_effort_cap(double x0);

// (1+r)^-t_hit - k when the simulated forgetting trajectory reaches theta
// within the horizon; otherwise -k (or 0 with the zero-floor switch).
double forgetting_utility(double k, double theta, double r, double x0,
                          int horizon = 10000, bool zero_floor_when_never = false);

}  // namespace sil
