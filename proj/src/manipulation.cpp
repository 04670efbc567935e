#include "sil/manipulation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sil/dynamics.hpp"

namespace sil {

namespace {

constexpr double kScanStep = 1e-3;
constexpr double kEndpointTol = 1e-9;
constexpr double kTieTol = 1e-12;

// Utilde(x0) - U*(x0): positive where manipulating beats the best honest
// response (U* >= 0 always, abstaining included).
double manipulation_edge(double theta, double r, double x0,
                         const ManipulationSetting& setting, double m) {
  return manipulation_utility(theta, r, x0, setting) -
         optimal_effort(theta, r, x0, m).utility;
}

double bisect_edge(double theta, double r, const ManipulationSetting& setting,
                   double m, double lo, double hi, bool positive_at_lo) {
  for (int i = 0; i < 80 && hi - lo > kEndpointTol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((manipulation_edge(theta, r, mid, setting, m) > 0.0) == positive_at_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void ManipulationSetting::validate() const {
  if (!(detection_p >= 0.0 && detection_p <= 1.0))
    throw std::invalid_argument("detection probability must lie in [0, 1]");
}

double manipulation_cost(double x_target, double x_from) {
  if (!(x_target >= 0.0 && x_target <= 1.0 && x_from >= 0.0 && x_from <= 1.0))
    throw std::invalid_argument("similarities must lie in [0, 1]");
  return std::max(x_target - x_from, 0.0);
}

double max_manipulation_step(double x_prev) {
  return similarity_recurrence(x_prev, 1.0);
}

double manipulation_utility(double theta, double r, double x0,
                            const ManipulationSetting& setting) {
  setting.validate();
  const double h = hitting_time(theta, x0, 1.0);
  const double reward =
      (1.0 - setting.detection_p) * std::exp(-h * std::log1p(r));
  return reward - manipulation_cost(theta, x0);
}

BestResponse joint_best_response(double theta, double r, double x0,
                                 const ManipulationSetting& setting) {
  return joint_best_response(theta, r, x0, setting, incentive_constant().m);
}

BestResponse joint_best_response(double theta, double r, double x0,
                                 const ManipulationSetting& setting, double m) {
  const BestResponse honest = optimal_effort(theta, r, x0, m);
  const double dishonest = manipulation_utility(theta, r, x0, setting);
  if (dishonest > honest.utility + kTieTol && dishonest > 0.0)
    return {Action::Manipulate, std::nullopt, dishonest};
  if (honest.action == Action::Improve) return honest;
  return {Action::Abstain, std::nullopt, 0.0};
}

ManipulationRegion manipulation_region(double theta, double r,
                                       const ManipulationSetting& setting) {
  return manipulation_region(theta, r, setting, incentive_constant().m);
}

ManipulationRegion manipulation_region(double theta, double r,
                                       const ManipulationSetting& setting,
                                       double m) {
  Scenario{theta, r}.validate();
  setting.validate();

  std::vector<double> xs;
  for (double x = kScanStep; x < theta; x += kScanStep) xs.push_back(x);
  if (xs.empty()) return {};

  std::vector<double> edge(xs.size());
  int best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    edge[i] = manipulation_edge(theta, r, xs[i], setting, m);
    if (edge[i] > edge[best]) best = static_cast<int>(i);
  }
  if (!(edge[best] > 0.0)) return {};

  int lo = best;
  while (lo > 0 && edge[lo - 1] > 0.0) --lo;
  int hi = best;
  while (hi + 1 < static_cast<int>(xs.size()) && edge[hi + 1] > 0.0) ++hi;

  ManipulationRegion region;
  region.empty = false;
  region.lower = bisect_edge(theta, r, setting, m, lo > 0 ? xs[lo - 1] : 1e-12,
                             xs[lo], /*positive_at_lo=*/false);
  if (hi + 1 < static_cast<int>(xs.size())) {
    region.upper =
        bisect_edge(theta, r, setting, m, xs[hi], xs[hi + 1], true);
  } else if (setting.detection_p == 0.0 ||
             manipulation_edge(theta, r, theta * (1.0 - 1e-12), setting, m) >
                 0.0) {
    region.upper = theta;  // the edge stays positive all the way up
  } else {
    region.upper =
        bisect_edge(theta, r, setting, m, xs[hi], theta * (1.0 - 1e-12), true);
  }
  return region;
}

double detection_threshold(double theta, double r) {
  return detection_threshold(theta, r, incentive_constant().m);
}

double detection_threshold(double theta, double r, double m) {
  Scenario{theta, r}.validate();
  if (manipulation_region(theta, r, {0.0}, m).empty) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (manipulation_region(theta, r, {mid}, m).empty)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sil
