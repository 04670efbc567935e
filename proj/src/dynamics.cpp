#include "sil/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sil {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void check_effort(double k) {
  if (!(k >= 0.0 && k <= 1.0))
    throw std::invalid_argument("effort k must lie in [0, 1]");
}

void check_similarity(double x) {
  if (!(x > 0.0 && x <= 1.0))
    throw std::invalid_argument("similarity must lie in (0, 1]");
}

void check_same_dimension(const Profile& a, const Profile& b) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("profile dimensions differ");
}

}  // namespace

Profile::Profile(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("profile must be non-empty");
  for (double c : coords_)
    if (!(c >= 0.0))
      throw std::invalid_argument("profile coordinates must be non-negative");
  const double n = norm(coords_);
  if (std::abs(n - 1.0) > kUnitNormTol)
    throw std::invalid_argument("profile must have unit norm");
}

Profile Profile::normalized(std::vector<double> coords) {
  if (coords.empty()) throw std::invalid_argument("profile must be non-empty");
  for (double c : coords)
    if (!(c >= 0.0))
      throw std::invalid_argument("profile coordinates must be non-negative");
  const double n = norm(coords);
  if (!(n > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  for (double& c : coords) c /= n;
  return Profile(std::move(coords), unchecked_t{});
}

double Profile::dot(const Profile& other) const {
  check_same_dimension(*this, other);
  return sil::dot(coords_, other.coords_);
}

void EffortSchedule::validate() const {
  double sum = 0.0;
  for (double k : efforts) {
    if (!(k >= 0.0)) throw std::invalid_argument("schedule efforts must be >= 0");
    sum += k;
  }
  if (sum > 1.0 + 1e-12)
    throw std::invalid_argument("cumulative schedule effort exceeds 1");
}

double EffortSchedule::total() const {
  double sum = 0.0;
  for (double k : efforts) sum += k;
  return sum;
}

PreNormalized pre_normalize(const std::vector<std::vector<double>>& raw_profiles,
                            const std::vector<double>& ideal) {
  if (raw_profiles.empty()) throw std::invalid_argument("empty profile batch");
  const std::size_t m = ideal.size();
  if (m == 0) throw std::invalid_argument("ideal profile must be non-empty");
  for (double c : ideal)
    if (!(c >= 0.0))
      throw std::invalid_argument("ideal coordinates must be non-negative");

  double max_norm = 0.0;
  for (const auto& q : raw_profiles) {
    if (q.size() != m)
      throw std::invalid_argument("profile dimension does not match ideal");
    for (double c : q)
      if (!(c >= 0.0))
        throw std::invalid_argument("profile coordinates must be non-negative");
    max_norm = std::max(max_norm, norm(q));
  }
  if (!(max_norm > 0.0))
    throw std::invalid_argument("all profiles have zero norm");

  PreNormalized out;
  out.max_norm = max_norm;
  out.ideal = ideal;
  out.ideal.push_back(0.0);
  out.profiles.reserve(raw_profiles.size());
  for (const auto& q : raw_profiles) {
    std::vector<double> ext(q);
    const double n = norm(q);
    const double z2 = std::max(max_norm * max_norm - n * n, 0.0);
    ext.push_back(std::sqrt(z2));
    for (double& c : ext) c /= max_norm;
    out.profiles.push_back(Profile::normalized(std::move(ext)));
  }
  return out;
}

Profile improvement_step(const Profile& q, const Profile& d, double k) {
  check_effort(k);
  check_same_dimension(q, d);
  const double x = q.dot(d);
  if (!(x > 0.0)) throw std::domain_error("improvement_step requires q.d > 0");
  std::vector<double> next = q.coords();
  const double pull = k * x;
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += pull * d[i];
  return Profile::normalized(std::move(next));
}

double similarity_recurrence(double x, double k) {
  check_similarity(x);
  check_effort(k);
  const double gap = (1.0 / (x * x) - 1.0) / ((1.0 + k) * (1.0 + k));
  return 1.0 / std::sqrt(1.0 + gap);
}

double similarity_closed_form(double x0, double k, int t) {
  check_similarity(x0);
  check_effort(k);
  if (t < 0) throw std::invalid_argument("round count must be >= 0");
  const double gap = (1.0 / (x0 * x0) - 1.0) * std::pow(1.0 + k, -2.0 * t);
  return 1.0 / std::sqrt(1.0 + gap);
}

std::vector<Profile> cumulative_effort_trajectory(const Profile& q0,
                                                  const Profile& d,
                                                  const EffortSchedule& schedule,
                                                  int horizon) {
  schedule.validate();
  check_same_dimension(q0, d);
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (!(q0.dot(d) > 0.0))
    throw std::domain_error("cumulative trajectory requires q0.d > 0");

  std::vector<Profile> traj;
  traj.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.push_back(q0);
  double accumulated = 0.0;
  for (int t = 0; t < horizon; ++t) {
    if (t < static_cast<int>(schedule.efforts.size()))
      accumulated += schedule.efforts[t];
    traj.push_back(improvement_step(traj.back(), d, std::min(accumulated, 1.0)));
  }
  return traj;
}

double equivalent_one_shot_effort(const Profile& q0, const Profile& d,
                                  const EffortSchedule& schedule, int horizon,
                                  double tol) {
  schedule.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const double total = schedule.total();
  if (!(total > 0.0 && total <= 1.0 + 1e-12))
    throw std::invalid_argument("cumulative schedule effort must lie in (0, 1]");

  const double x0 = q0.dot(d);
  const auto traj = cumulative_effort_trajectory(q0, d, schedule, horizon);
  const double target = traj.back().dot(d);

  const auto gap = [&](double k) {
    return similarity_closed_form(x0, k, horizon) - target;
  };
  double lo = 0.0, hi = 1.0;
  double flo = gap(lo), fhi = gap(hi);
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::runtime_error("equivalent_one_shot_effort: bracket failure");
  double mid = 0.5;
  while (hi - lo > 1e-15) {
    mid = 0.5 * (lo + hi);
    const double fm = gap(mid);
    if (std::abs(fm) <= tol) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  if (std::abs(gap(mid)) > tol)
    throw std::runtime_error(
        "equivalent_one_shot_effort: bisection exhausted without reaching tol");
  return mid;
}

double decaying_effort_similarity(double x0, double k, int t) {
  check_similarity(x0);
  check_effort(k);
  if (t < 0) throw std::invalid_argument("round count must be >= 0");
  double inv_product = 1.0;  // prod (k_i + 1)^-1, k_i = k/(i+1)
  for (int i = 0; i < t; ++i) inv_product /= 1.0 + k / (i + 1.0);
  const double gap = (1.0 / (x0 * x0) - 1.0) * inv_product * inv_product;
  return 1.0 / std::sqrt(1.0 + gap);
}

Profile forgetting_step(const Profile& q, const Profile& q0, const Profile& d,
                        double k) {
  check_effort(k);
  check_same_dimension(q, d);
  check_same_dimension(q, q0);
  const double x = q.dot(d);
  if (!(x > 0.0)) throw std::domain_error("forgetting_step requires q.d > 0");
  std::vector<double> next = q.coords();
  for (std::size_t i = 0; i < next.size(); ++i)
    next[i] += (k * d[i] + (1.0 - k) * q0[i]) * x;
  return Profile::normalized(std::move(next));
}

ForgettingTarget forgetting_target(const Profile& q0, const Profile& d,
                                   double k) {
  check_effort(k);
  check_same_dimension(q0, d);
  const double x0 = q0.dot(d);
  if (!(x0 > 0.0)) throw std::domain_error("forgetting_target requires q0.d > 0");
  if (k == 0.0) return {q0, x0, true};

  std::vector<double> blend(q0.dimension());
  for (std::size_t i = 0; i < blend.size(); ++i)
    blend[i] = k * d[i] + (1.0 - k) * q0[i];
  const double blend_norm = norm(blend);
  return {Profile::normalized(std::move(blend)), blend_norm * x0, false};
}

double forgetting_blend_norm(double x0, double k) {
  check_similarity(x0);
  check_effort(k);
  return std::sqrt(k * k + (1.0 - k) * (1.0 - k) + 2.0 * k * (1.0 - k) * x0);
}

double forgetting_pace(double x0, double k) {
  return forgetting_blend_norm(x0, k) * x0;
}

double forgetting_limit_similarity(double x0, double k) {
  return (k + (1.0 - k) * x0) / forgetting_blend_norm(x0, k);
}

ForgettingTrace forgetting_trace(double x0, double k, int steps) {
  check_similarity(x0);
  check_effort(k);
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");

  // Plane coordinates: first axis d, second axis the unit component of q0
  // orthogonal to d.
  const double s0 = std::sqrt(std::max(1.0 - x0 * x0, 0.0));
  const double b1 = k + (1.0 - k) * x0;  // blend = k d + (1-k) q0
  const double b2 = (1.0 - k) * s0;
  const double bn = std::hypot(b1, b2);
  const double d1 = b1 / bn, d2 = b2 / bn;  // d* direction

  ForgettingTrace trace;
  trace.x.reserve(static_cast<std::size_t>(steps) + 1);
  trace.x_star.reserve(static_cast<std::size_t>(steps) + 1);
  double a = x0, b = s0;
  trace.x.push_back(a);
  trace.x_star.push_back(a * d1 + b * d2);
  for (int t = 0; t < steps; ++t) {
    const double x = a;
    const double na = a + b1 * x;
    const double nb = b + b2 * x;
    const double n = std::hypot(na, nb);
    a = na / n;
    b = nb / n;
    trace.x.push_back(a);
    trace.x_star.push_back(a * d1 + b * d2);
  }
  return trace;
}

std::optional<int> forgetting_first_acceptance(double x0, double k, double theta,
                                               int horizon) {
  check_similarity(x0);
  check_effort(k);
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("theta must lie in (0, 1)");
  if (horizon <= 0) throw std::invalid_argument("horizon must be > 0");

  if (x0 >= theta - kUnitNormTol) return 0;
  if (theta > forgetting_limit_similarity(x0, k) + 1e-12) return std::nullopt;

  const double s0 = std::sqrt(std::max(1.0 - x0 * x0, 0.0));
  const double b1 = k + (1.0 - k) * x0;
  const double b2 = (1.0 - k) * s0;
  double a = x0, b = s0;
  for (int t = 1; t <= horizon; ++t) {
    const double x = a;
    const double na = a + b1 * x;
    const double nb = b + b2 * x;
    const double n = std::hypot(na, nb);
    a = na / n;
    b = nb / n;
    if (a >= theta - kUnitNormTol) return t;
  }
  return std::nullopt;
}

}  // namespace sil
