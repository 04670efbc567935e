#include "sil/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sil/numeric.hpp"

namespace sil {

namespace {

constexpr double kThetaGridStep = 1e-3;

void check_rate(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("discount rate r must be > 0");
}

// One maximal ascending run followed by a descending one, flats allowed.
bool single_peaked_profile(const std::vector<double>& values) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * (1.0 + scale);
  bool descended = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (d < -tol) descended = true;
    else if (d > tol && descended) return false;
  }
  return true;
}

}  // namespace

double improvement_cutoff(double theta, double r, double m) {
  check_rate(r);
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("theta must lie in [0, 1]");
  if (theta == 0.0) return 0.0;
  if (theta == 1.0) return 1.0;
  return min_x0_to_improve(theta, r, m);
}

PolicyEvaluation welfare(double theta, const Density& f, double r, double m) {
  const double cutoff = improvement_cutoff(theta, r, m);
  if (cutoff >= theta) return {theta, 0.0, cutoff};
  const double total = adaptive_simpson(
      [&](double x) { return (theta - x) * f.pdf(x); }, cutoff, theta, 1e-9, 40);
  return {theta, std::max(total, 0.0), cutoff};
}

OptimalThreshold optimal_threshold(const Density& f, double r, double m) {
  check_rate(r);
  const int cells = static_cast<int>(std::lround(1.0 / kThetaGridStep));
  std::vector<double> values(cells - 1);
  int best = 0;
  for (int j = 1; j < cells; ++j) {
    values[j - 1] = welfare(j * kThetaGridStep, f, r, m).welfare;
    if (values[j - 1] > values[best]) best = j - 1;
  }
  const double theta_best = (best + 1) * kThetaGridStep;
  const double lo = std::max(theta_best - kThetaGridStep, 1e-9);
  const double hi = std::min(theta_best + kThetaGridStep, 1.0);
  auto [theta_star, peak] = golden_section_max(
      [&](double theta) { return welfare(theta, f, r, m).welfare; }, lo, hi,
      1e-6);
  if (values[best] > peak) {
    theta_star = theta_best;
    peak = values[best];
  }
  return {theta_star, peak, single_peaked_profile(values)};
}

double manipulation_fraction(const Density& f, double theta, double r,
                             const ManipulationSetting& setting) {
  return manipulation_fraction(f, theta, r, setting, incentive_constant().m);
}

double manipulation_fraction(const Density& f, double theta, double r,
                             const ManipulationSetting& setting, double m) {
  const ManipulationRegion region = manipulation_region(theta, r, setting, m);
  if (region.empty) return 0.0;
  return std::clamp(f.mass(*region.lower, *region.upper), 0.0, 1.0);
}

double estimate_r(double theta, double observed_cutoff, double m) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("theta must lie in (0, 1)");
  if (!(observed_cutoff > 0.0 && observed_cutoff < theta))
    throw std::invalid_argument(
        "observed cutoff must lie strictly between 0 and theta");
  const auto log_inv_gap = [](double x) {
    return std::log1p(-x * x) - 2.0 * std::log(x);
  };
  const double log_scale = log_inv_gap(observed_cutoff) - log_inv_gap(theta);
  return std::expm1(2.0 * m / log_scale);
}

REstimates estimate_r_multi(
    const std::vector<std::pair<double, double>>& observations, double m) {
  if (observations.empty())
    throw std::invalid_argument("need at least one observation");
  REstimates out;
  out.estimates.reserve(observations.size());
  double sum = 0.0;
  for (const auto& [theta, cutoff] : observations) {
    out.estimates.push_back(estimate_r(theta, cutoff, m));
    sum += out.estimates.back();
  }
  out.mean = sum / static_cast<double>(observations.size());
  return out;
}

}  // namespace sil
