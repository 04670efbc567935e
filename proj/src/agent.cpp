#include "sil/agent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "sil/dynamics.hpp"
#include "sil/numeric.hpp"

namespace sil {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("theta must lie in (0, 1)");
}

void check_rate(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("discount rate r must be > 0");
}

void check_x0(double x0) {
  if (!(x0 > 0.0 && x0 < 1.0))
    throw std::invalid_argument("x0 must lie in (0, 1)");
}

// ln(x^-2 - 1), stable near both ends of (0, 1).
double log_inv_gap(double x) { return std::log1p(-x * x) - 2.0 * std::log(x); }

// -ln sqrt((theta^-2-1)/(x0^-2-1)); positive when x0 < theta.
double log_similarity_gap(double theta, double x0) {
  return 0.5 * (log_inv_gap(x0) - log_inv_gap(theta));
}

// Utility over z = ln(1+k): u(z) = e^(-C/z) - (e^z - 1) on (0, ln 2].
// u is not unimodal over the whole range (it can dip, then rise, then fall),
// so a grid scan locates the best cell before golden-section refinement.
std::pair<double, double> best_effort_z(double C) {
  constexpr int kGrid = 512;
  constexpr double kZLo = 1e-9;
  const auto u = [C](double z) { return std::exp(-C / z) - std::expm1(z); };

  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double z = kZLo + (kLn2 - kZLo) * i / (kGrid - 1);
    const double v = u(z);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (kLn2 - kZLo) / (kGrid - 1);
  const double lo = kZLo + step * std::max(best - 1, 0);
  const double hi = kZLo + step * std::min(best + 1, kGrid - 1);
  auto [z, val] = golden_section_max(u, lo, hi, 1e-13);
  if (best_val > val) {
    z = kZLo + step * best;
    val = best_val;
  }
  return {z, val};
}

}  // namespace

void Scenario::validate() const {
  check_theta(theta);
  check_rate(r);
}

IncentiveConstant solve_incentive_constant(double tol) {
  if (!(tol > 0.0 && tol <= 1e-2))
    throw std::invalid_argument("tol must lie in (0, 1e-2]");

  const auto L = [](double t) {
    return (t + 2.0) / (t * std::exp(2.0 * t + 2.0)) - 1.0;
  };
  const double t_prime = bisect_root(L, 1e-9, kLn2 - 1e-12, 1e-15);

  // Max utility is strictly decreasing in C; bisect for its zero crossing.
  double lo = 0.1, hi = 0.5;
  while (hi - lo > std::min(tol, 1e-12)) {
    const double mid = 0.5 * (lo + hi);
    if (best_effort_z(mid).second > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), t_prime};
}

const IncentiveConstant& incentive_constant() {
  static const IncentiveConstant cached = solve_incentive_constant();
  return cached;
}

double factor_C(double theta, double r, double x0) {
  check_theta(theta);
  check_rate(r);
  check_x0(x0);
  return log_similarity_gap(theta, x0) * std::log1p(r);
}

double hitting_time(double theta, double x0, double k) {
  check_theta(theta);
  check_x0(x0);
  if (!(k >= 0.0 && k <= 1.0))
    throw std::invalid_argument("effort k must lie in [0, 1]");
  if (x0 >= theta) return 0.0;
  if (k == 0.0) return std::numeric_limits<double>::infinity();
  return log_similarity_gap(theta, x0) / std::log1p(k);
}

double utility(double k, double theta, double r, double x0) {
  check_rate(r);
  if (x0 >= theta) return 1.0 - k;
  if (k == 0.0) return 0.0;
  const double h = hitting_time(theta, x0, k);
  return std::exp(-h * std::log1p(r)) - k;
}

BestResponse optimal_effort(double theta, double r, double x0) {
  return optimal_effort(theta, r, x0, incentive_constant().m);
}

BestResponse optimal_effort(double theta, double r, double x0, double m) {
  check_theta(theta);
  check_rate(r);
  check_x0(x0);
  if (x0 >= theta) return {Action::Improve, 0.0, 1.0};
  const double C = factor_C(theta, r, x0);
  if (C >= m) return {Action::Abstain, std::nullopt, 0.0};
  const auto [z, val] = best_effort_z(C);
  if (!(val > 0.0)) return {Action::Abstain, std::nullopt, 0.0};
  return {Action::Improve, std::expm1(z), val};
}

double min_x0_to_improve(double theta, double r, double m) {
  check_theta(theta);
  check_rate(r);
  const double scale = std::exp(2.0 * m / std::log1p(r));
  const double gap = (1.0 / (theta * theta) - 1.0) * scale;
  return 1.0 / std::sqrt(1.0 + gap);
}

double max_theta_to_incentivize(double x0, double r, double m) {
  check_x0(x0);
  check_rate(r);
  const double scale = std::exp(-2.0 * m / std::log1p(r));
  const double gap = (1.0 / (x0 * x0) - 1.0) * scale;
  return 1.0 / std::sqrt(1.0 + gap);
}

double forgetting_effort_root() {
  static const double root = bisect_root(
      [](double x) { return 2.0 * x * x + 2.0 * x * x * x - 1.0; }, 1e-9,
      1.0 - 1e-9, 1e-15);
  return root;
}

double forgetting_effort_cap(double x0) {
  check_x0(x0);
  const double xh = forgetting_effort_root();
  const double first = xh * xh / (2.0 * xh * xh + 2.0 * xh * xh * xh);
  const double den = 2.0 * x0 * x0 + 2.0 * x0 * x0 * x0 - 1.0;
  if (std::abs(den) < 1e-7) return first;  // 0/0 at the root; limit is `first`
  const double num =
      x0 * (x0 * x0 + x0 - std::sqrt(x0 * x0 * x0 * x0 - x0 * x0 + 1.0));
  return std::min(first, num / den);
}

double forgetting_utility(double k, double theta, double r, double x0,
                          int horizon, bool zero_floor_when_never) {
  if (!(k > 0.0 && k <= 1.0))
    throw std::invalid_argument("effort k must lie in (0, 1]");
  check_theta(theta);
  check_rate(r);
  check_x0(x0);
  const auto t_hit = forgetting_first_acceptance(x0, k, theta, horizon);
  if (!t_hit) return zero_floor_when_never ? 0.0 : -k;
  return std::exp(-static_cast<double>(*t_hit) * std::log1p(r)) - k;
}

}  // namespace sil
