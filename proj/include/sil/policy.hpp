#pragma once

#include <utility>
#include <vector>

#include "sil/manipulation.hpp"
#include "sil/population.hpp"

namespace sil {

// x*(theta): lowest initial similarity that still improves under (theta, r).
// Defined as 0 at theta == 0 and 1 at theta == 1 for continuity.
double improvement_cutoff(double theta, double r, double m);

struct PolicyEvaluation {
  double theta;
  double welfare;  // integral of (theta - x) f(x) over [x*(theta), theta]
  double cutoff;   // x*(theta)
};

PolicyEvaluation welfare(double theta, const Density& f, double r, double m);

struct OptimalThreshold {
  double theta_star;
  double welfare;
  bool single_peaked;  // whether the 1e-3 grid profile has a single peak
};

// Grid max over (0,1) at 1e-3 spacing, then golden-section refinement to 1e-6.
OptimalThreshold optimal_threshold(const Density& f, double r, double m);

// Population mass inside manipulation_region(theta, r, setting).
double manipulation_fraction(const Density& f, double theta, double r,
                             const ManipulationSetting& setting);
double manipulation_fraction(const Density& f, double theta, double r,
                             const ManipulationSetting& setting, double m);

// Inverts the improvement cutoff observed at a published threshold:
// r = exp(2m / ln((cutoff^-2 - 1)/(theta^-2 - 1))) - 1.
double estimate_r(double theta, double observed_cutoff, double m);

struct REstimates {
  std::vector<double> estimates;
  double mean;
};

// One estimate per (theta, observed_cutoff) experiment plus their mean.
REstimates estimate_r_multi(
    const std::vector<std::pair<double, double>>& observations, double m);

}  // namespace sil
