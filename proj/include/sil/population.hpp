#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sil {

struct BetaParams {
  double v;
  double w;
};

// Distribution of initial similarity on [0,1]: parametric Beta or an
// empirical piecewise-linear CDF.
class Density {
 public:
  static Density beta(double v, double w);
  static Density beta(BetaParams p);
  // breakpoints strictly increasing in [0,1]; cdf nondecreasing, last == 1.
  // A (0,0) anchor is implied when the first breakpoint is positive.
  static Density empirical(std::vector<double> breakpoints,
                           std::vector<double> cdf_values);

  bool is_beta() const { return kind_ == Kind::Beta; }
  const BetaParams& beta_params() const;

  // x^(v-1) (1-x)^(w-1) / B(v,w); diverging endpoints are evaluated at a
  // one-sided clamp of 1e-12 so the value stays finite.
  double pdf(double x) const;
  double cdf(double x) const;
  double mass(double a, double b) const;  // cdf(b) - cdf(a)

 private:
  enum class Kind { Beta, Empirical };
  Density() = default;
  Kind kind_ = Kind::Beta;
  BetaParams beta_{1.0, 1.0};
  double log_beta_norm_ = 0.0;  // ln B(v,w)
  std::vector<double> breakpoints_;
  std::vector<double> cdf_;
};

enum class FitMethod { MaximumLikelihood, MethodOfMoments };

// Beta fit of samples strictly inside (0,1); Newton on the digamma equations,
// started from the method-of-moments estimate. Needs >= 30 samples.
Density fit_beta(const std::vector<double>& samples,
                 FitMethod method = FitMethod::MaximumLikelihood);

// Piecewise-linear CDF through (score, cumulative_prob) points with scores
// already normalized into [0,1].
Density density_from_cdf_table(const std::vector<std::pair<double, double>>& points);

// (x - lo)/(hi - lo) per element; reports the index of any out-of-range value.
std::vector<double> normalize_scores(const std::vector<double>& raw, double lo,
                                     double hi);

// n deterministic Beta(v,w) draws for the given seed.
std::vector<double> sample_beta(BetaParams p, std::size_t n, std::uint64_t seed);

// CSV ingestion. scores: header then one value per line. exam: header then
// three comma-separated values per line, averaged per row and normalized
// (fixed 0-100 range unless observed_range). cdf: header then
// "score,cumulative_prob" lines, scores returned as read.
std::vector<double> read_scores_csv(const std::string& path);
std::vector<double> read_exam_csv(const std::string& path,
                                  bool observed_range = false, double lo = 0.0,
                                  double hi = 100.0);
std::vector<std::pair<double, double>> read_cdf_csv(const std::string& path);

}  // namespace sil
