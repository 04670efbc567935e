#pragma once

#include <optional>

#include "sil/agent.hpp"

namespace sil {

enum class CostKind { LinearPositivePart };

struct ManipulationSetting {
  double detection_p = 0.0;  // Bernoulli over the whole application process
  CostKind cost_kind = CostKind::LinearPositivePart;
  void validate() const;
};

// (x_target - x_from)_+
double manipulation_cost(double x_target, double x_from);

// Undetectable per-round ceiling: the k = 1 improvement step.
double max_manipulation_step(double x_prev);

// Utilde = (1-P) (1+r)^-H(theta,x0,1) - (theta - x0)_+  with H paced at ln 2.
double manipulation_utility(double theta, double r, double x0,
                            const ManipulationSetting& setting);

// Manipulate iff Utilde > max(U*, 0); ties within 1e-12 go to Improve.
BestResponse joint_best_response(double theta, double r, double x0,
                                 const ManipulationSetting& setting);
BestResponse joint_best_response(double theta, double r, double x0,
                                 const ManipulationSetting& setting, double m);

struct ManipulationRegion {
  std::optional<double> lower;  // x_hat or x_hat_1
  std::optional<double> upper;  // theta or x_hat_2
  bool empty = true;
  double width() const { return empty ? 0.0 : *upper - *lower; }
};

// Interval of x0 on (0, theta) where manipulating beats improving, found by a
// 1e-3 scan of Utilde - U* plus bisection at the sign changes.
ManipulationRegion manipulation_region(double theta, double r,
                                       const ManipulationSetting& setting);
ManipulationRegion manipulation_region(double theta, double r,
                                       const ManipulationSetting& setting,
                                       double m);

// Smallest detection probability that empties the manipulation region.
double detection_threshold(double theta, double r);
double detection_threshold(double theta, double r, double m);

}  // namespace sil
