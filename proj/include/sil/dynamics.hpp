#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace sil {

inline constexpr double kUnitNormTol = 1e-9;

// Non-negative vector of unit Euclidean norm (a skill profile).
class Profile {
 public:
  // Validates: non-empty, coordinates >= 0, norm == 1 within kUnitNormTol.
  explicit Profile(std::vector<double> coords);

  // Scales a non-negative vector to unit norm.
  static Profile normalized(std::vector<double> coords);

  const std::vector<double>& coords() const { return coords_; }
  std::size_t dimension() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double dot(const Profile& other) const;

 private:
  struct unchecked_t {};
  Profile(std::vector<double> coords, unchecked_t) : coords_(std::move(coords)) {}
  std::vector<double> coords_;
};

// Per-round efforts k_t >= 0 with cumulative sum <= 1.
struct EffortSchedule {
  std::vector<double> efforts;
  void validate() const;
  double total() const;
};

struct PreNormalized {
  std::vector<Profile> profiles;  // m+1 coordinates each, unit norm
  std::vector<double> ideal;      // [d; 0], left unnormalized
  double max_norm;                // K, the largest input norm
};

// Extends every profile with an irrelevant-attribute coordinate
// z_i = sqrt(K^2 - |q_i|^2) and rescales by K = max_i |q_i|; the ideal gets a
// zero appended and is otherwise returned as given.
PreNormalized pre_normalize(const std::vector<std::vector<double>>& raw_profiles,
                            const std::vector<double>& ideal);

// One improvement round: normalize(q + k * (q.d) * d). Requires q.d > 0.
Profile improvement_step(const Profile& q, const Profile& d, double k);

// Scalar form of one improvement round: x'^-2 - 1 = (x^-2 - 1) / (k+1)^2.
double similarity_recurrence(double x, double k);

// t rounds at effort k: x_t^-2 - 1 = (x0^-2 - 1) / (k+1)^(2t).
double similarity_closed_form(double x0, double k, int t);

// Trajectory of length horizon+1 where round t is driven by the accumulated
// effort sum_{tau<=t} k_tau instead of a fixed k.
std::vector<Profile> cumulative_effort_trajectory(const Profile& q0,
                                                  const Profile& d,
                                                  const EffortSchedule& schedule,
                                                  int horizon);

// The single up-front effort whose closed-form similarity at `horizon` matches
// the cumulative-schedule trajectory within tol. Found by bisection; throws if
// no bracket exists.
double equivalent_one_shot_effort(const Profile& q0, const Profile& d,
                                  const EffortSchedule& schedule, int horizon,
                                  double tol);

// Efforts decaying as k_t = k/(t+1); exact product form
// x_t^-2 - 1 = (x0^-2 - 1) * prod_{i<t} (k_i+1)^-2.
double decaying_effort_similarity(double x0, double k, int t);

// One round with forgetting: normalize(q + (k*d + (1-k)*q0) * (q.d)).
Profile forgetting_step(const Profile& q, const Profile& q0, const Profile& d,
                        double k);

struct ForgettingTarget {
  Profile target;   // d* = dtilde / |dtilde|, dtilde = k*d + (1-k)*q0
  double k_u;       // |dtilde| * x0, the guaranteed convergence pace
  bool degenerate;  // k == 0: target collapses to q0, k_u to x0
};

ForgettingTarget forgetting_target(const Profile& q0, const Profile& d, double k);

// Scalar companions of forgetting_target (unit q0, d with q0.d = x0):
// |dtilde|^2 = k^2 + (1-k)^2 + 2k(1-k)x0.
double forgetting_blend_norm(double x0, double k);
double forgetting_pace(double x0, double k);              // k_u
double forgetting_limit_similarity(double x0, double k);  // d*.d

// Forgetting dynamics simulated in the plane spanned by q0 and d, which the
// update law preserves. x[t] = q_t.d, x_star[t] = q_t.d*.
struct ForgettingTrace {
  std::vector<double> x;
  std::vector<double> x_star;
};

ForgettingTrace forgetting_trace(double x0, double k, int steps);

// Smallest t <= horizon with q_t.d >= theta (within kUnitNormTol), or nullopt.
// Returns nullopt immediately when theta exceeds the reachable limit d*.d.
std::optional<int> forgetting_first_acceptance(double x0, double k, double theta,
                                               int horizon = 10000);

}  // namespace sil
