#include "sil/population.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "sil/rng.hpp"

namespace sil {

namespace {

constexpr double kEndpointClamp = 1e-12;

void check_shapes(double v, double w) {
  if (!(v > 0.0) || !(w > 0.0))
    throw std::invalid_argument("beta shapes must be > 0");
}

std::runtime_error parse_error(const std::string& path, std::size_t line,
                               const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  return std::runtime_error(os.str());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) fields.push_back(field);
  return fields;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Density Density::beta(double v, double w) {
  check_shapes(v, w);
  Density d;
  d.kind_ = Kind::Beta;
  d.beta_ = {v, w};
  d.log_beta_norm_ = std::lgamma(v) + std::lgamma(w) - std::lgamma(v + w);
  return d;
}

Density Density::beta(BetaParams p) { return beta(p.v, p.w); }

Density Density::empirical(std::vector<double> breakpoints,
                           std::vector<double> cdf_values) {
  if (breakpoints.size() != cdf_values.size())
    throw std::invalid_argument("breakpoints and cdf values differ in length");
  if (breakpoints.empty()) throw std::invalid_argument("empty cdf table");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] >= 0.0 && breakpoints[i] <= 1.0))
      throw std::invalid_argument("breakpoints must lie in [0, 1]");
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
      throw std::invalid_argument("breakpoints must be strictly increasing");
    if (!(cdf_values[i] >= 0.0 && cdf_values[i] <= 1.0 + 1e-12))
      throw std::invalid_argument("cdf values must lie in [0, 1]");
    if (i > 0 && cdf_values[i] < cdf_values[i - 1])
      throw std::invalid_argument("cdf values must be nondecreasing");
  }
  if (std::abs(cdf_values.back() - 1.0) > 1e-9)
    throw std::invalid_argument("cdf must end at 1");
  cdf_values.back() = 1.0;

  if (breakpoints.front() > 0.0) {
    breakpoints.insert(breakpoints.begin(), 0.0);
    cdf_values.insert(cdf_values.begin(), 0.0);
  } else if (cdf_values.front() > 0.0) {
    throw std::invalid_argument("cdf at score 0 must be 0");
  }
  if (breakpoints.size() < 2)
    throw std::invalid_argument("cdf table needs at least one segment");

  Density d;
  d.kind_ = Kind::Empirical;
  d.breakpoints_ = std::move(breakpoints);
  d.cdf_ = std::move(cdf_values);
  return d;
}

const BetaParams& Density::beta_params() const {
  if (kind_ != Kind::Beta)
    throw std::logic_error("density is not a beta distribution");
  return beta_;
}

double Density::pdf(double x) const {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("pdf argument must lie in [0, 1]");
  if (kind_ == Kind::Beta) {
    const double v = beta_.v, w = beta_.w;
    if (v < 1.0 && x < kEndpointClamp) x = kEndpointClamp;
    if (w < 1.0 && x > 1.0 - kEndpointClamp) x = 1.0 - kEndpointClamp;
    const double lx = v == 1.0 ? 0.0 : (v - 1.0) * std::log(x);
    const double l1x = w == 1.0 ? 0.0 : (w - 1.0) * std::log1p(-x);
    return std::exp(lx + l1x - log_beta_norm_);
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.begin()) return 0.0;
  if (it == breakpoints_.end()) {
    if (x > breakpoints_.back()) return 0.0;
    it = breakpoints_.end() - 1;  // right edge: use the last segment
  }
  const std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
  return (cdf_[i] - cdf_[i - 1]) / (breakpoints_[i] - breakpoints_[i - 1]);
}

double Density::cdf(double x) const {
  if (kind_ == Kind::Beta) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(beta_.v, beta_.w, x);
  }
  if (x <= breakpoints_.front()) return 0.0;
  if (x >= breakpoints_.back()) return 1.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
  const double t =
      (x - breakpoints_[i - 1]) / (breakpoints_[i] - breakpoints_[i - 1]);
  return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
}

double Density::mass(double a, double b) const {
  if (!(a >= 0.0 && b <= 1.0 && a <= b))
    throw std::invalid_argument("mass requires 0 <= a <= b <= 1");
  return cdf(b) - cdf(a);
}

Density fit_beta(const std::vector<double>& samples, FitMethod method) {
  if (samples.size() < 30)
    throw std::invalid_argument("fit_beta needs at least 30 samples");
  double sum = 0.0, log_sum = 0.0, log1m_sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    if (!(x > 0.0 && x < 1.0)) {
      std::ostringstream os;
      os << "sample " << i << " = " << x
         << " is not strictly inside (0, 1); clean the data first";
      throw std::invalid_argument(os.str());
    }
    sum += x;
    log_sum += std::log(x);
    log1m_sum += std::log1p(-x);
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n;

  // Method-of-moments start; var < mean(1-mean) holds for interior samples.
  const double common = std::max(mean * (1.0 - mean) / var - 1.0, 1e-6);
  double v = std::max(mean * common, 1e-3);
  double w = std::max((1.0 - mean) * common, 1e-3);
  if (method == FitMethod::MethodOfMoments) return Density::beta(v, w);

  const double s1 = log_sum / n;
  const double s2 = log1m_sum / n;
  using boost::math::digamma;
  using boost::math::trigamma;
  for (int iter = 0; iter < 200; ++iter) {
    const double psi_vw = digamma(v + w);
    const double f1 = digamma(v) - psi_vw - s1;
    const double f2 = digamma(w) - psi_vw - s2;
    const double tvw = trigamma(v + w);
    const double a = trigamma(v) - tvw;
    const double d = trigamma(w) - tvw;
    const double det = a * d - tvw * tvw;
    if (!(std::abs(det) > 0.0)) break;
    double dv = (d * f1 + tvw * f2) / det;
    double dw = (tvw * f1 + a * f2) / det;
    double step = 1.0;
    while ((v - step * dv <= 0.0 || w - step * dw <= 0.0) && step > 1e-12)
      step *= 0.5;
    if (v - step * dv <= 0.0 || w - step * dw <= 0.0) break;
    v -= step * dv;
    w -= step * dw;
    if (std::abs(f1) < 1e-12 && std::abs(f2) < 1e-12) break;
    if (std::abs(step * dv) < 1e-13 && std::abs(step * dw) < 1e-13) break;
  }
  return Density::beta(v, w);
}

Density density_from_cdf_table(
    const std::vector<std::pair<double, double>>& points) {
  std::vector<double> breaks, cdf;
  breaks.reserve(points.size());
  cdf.reserve(points.size());
  for (const auto& [score, prob] : points) {
    breaks.push_back(score);
    cdf.push_back(prob);
  }
  return Density::empirical(std::move(breaks), std::move(cdf));
}

std::vector<double> normalize_scores(const std::vector<double>& raw, double lo,
                                     double hi) {
  if (!(lo < hi)) throw std::invalid_argument("normalize_scores requires lo < hi");
  std::vector<double> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= lo && raw[i] <= hi)) {
      std::ostringstream os;
      os << "score " << i << " = " << raw[i] << " outside [" << lo << ", " << hi
         << "]";
      throw std::invalid_argument(os.str());
    }
    out.push_back((raw[i] - lo) / (hi - lo));
  }
  return out;
}

std::vector<double> sample_beta(BetaParams p, std::size_t n, std::uint64_t seed) {
  check_shapes(p.v, p.w);
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(rng.beta(p.v, p.w));
  return out;
}

std::vector<double> read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> scores;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      scores.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw parse_error(path, line_no, "expected a number, got '" + line + "'");
    }
  }
  return scores;
}

std::vector<double> read_exam_csv(const std::string& path, bool observed_range,
                                  double lo, double hi) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> averages;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw parse_error(path, line_no, "expected three comma-separated values");
    double total = 0.0;
    for (const auto& f : fields) {
      try {
        total += std::stod(f);
      } catch (const std::exception&) {
        throw parse_error(path, line_no, "expected a number, got '" + f + "'");
      }
    }
    averages.push_back(total / 3.0);
  }
  if (observed_range) {
    const auto [mn, mx] = std::minmax_element(averages.begin(), averages.end());
    if (averages.empty() || !(*mn < *mx))
      throw std::runtime_error(path + ": cannot infer score range");
    lo = *mn;
    hi = *mx;
  }
  return normalize_scores(averages, lo, hi);
}

std::vector<std::pair<double, double>> read_cdf_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<double, double>> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2)
      throw parse_error(path, line_no, "expected 'score,cumulative_prob'");
    try {
      points.emplace_back(std::stod(fields[0]), std::stod(fields[1]));
    } catch (const std::exception&) {
      throw parse_error(path, line_no, "expected numbers, got '" + line + "'");
    }
  }
  return points;
}

}  // namespace sil
