#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "sil/numeric.hpp"
#include "sil/population.hpp"
#include "sil/rng.hpp"

using namespace sil;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/sil_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

double pdf_mass(const Density& d) {
  return adaptive_simpson([&](double x) { return d.pdf(x); }, 1e-10, 1.0 - 1e-10,
                          1e-9, 40);
}

}  // namespace

TEST_CASE("beta pdf values and conventions") {
  const auto uniform = Density::beta(1, 1);
  for (double x : {0.0, 0.2, 0.5, 1.0})
    CHECK(uniform.pdf(x) == doctest::Approx(1.0).epsilon(1e-12));

  const auto bell = Density::beta(2, 2);
  CHECK(bell.pdf(0.5) == doctest::Approx(1.5).epsilon(1e-12));
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    const double x = rng.uniform(0.0, 1.0);
    CHECK(bell.pdf(x) == doctest::Approx(bell.pdf(1.0 - x)).epsilon(1e-12));
  }
  CHECK(bell.pdf(0.0) == 0.0);

  // diverging endpoints clamp to a finite one-sided value
  const auto spiked = Density::beta(0.91, 3.84);
  CHECK(std::isfinite(spiked.pdf(0.0)));
  CHECK(spiked.pdf(0.0) > 1.0);

  CHECK_THROWS_AS(bell.pdf(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(bell.pdf(1.1), std::invalid_argument);
  CHECK_THROWS_AS(Density::beta(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("densities integrate to one") {
  const double shapes[][2] = {{1, 1},       {2, 2},       {4.86, 2.37},
                              {4.15, 1.79}, {1.11, 0.97}, {0.91, 3.84},
                              {0.99, 1.58}, {1.35, 1.13}};
  for (const auto& s : shapes) {
    const auto d = Density::beta(s[0], s[1]);
    CHECK(std::abs(pdf_mass(d) - 1.0) <= 1e-6);       // quadrature route
    CHECK(d.mass(0.0, 1.0) == doctest::Approx(1.0));  // cdf route
    CHECK(d.mass(0.0, 0.37) + d.mass(0.37, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("seeded sampling is deterministic") {
  const auto a = sample_beta({2.0, 3.0}, 1000, 77);
  const auto b = sample_beta({2.0, 3.0}, 1000, 77);
  const auto c = sample_beta({2.0, 3.0}, 1000, 78);
  CHECK(a == b);
  CHECK(a != c);
  for (double x : a) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("fit_beta recovers known shapes") {
  SUBCASE("exam-style shape") {
    const auto samples = sample_beta({4.86, 2.37}, 10000, 20240601);
    const auto params = fit_beta(samples).beta_params();
    CHECK(std::abs(params.v - 4.86) <= 0.3);
    CHECK(std::abs(params.w - 2.37) <= 0.2);
  }
  SUBCASE("uniform samples look like Beta(1,1)") {
    const auto samples = sample_beta({1.0, 1.0}, 10000, 8);
    const auto params = fit_beta(samples).beta_params();
    CHECK(std::abs(params.v - 1.0) <= 0.1);
    CHECK(std::abs(params.w - 1.0) <= 0.1);
  }
  SUBCASE("tight concentration pushes both shapes large and equal-ish") {
    Rng rng(4);
    std::vector<double> samples;
    for (int i = 0; i < 2000; ++i) samples.push_back(0.5 + 0.002 * rng.normal());
    const auto params = fit_beta(samples).beta_params();
    CHECK(params.v > 50.0);
    CHECK(params.w > 50.0);
    CHECK(params.v / params.w == doctest::Approx(1.0).epsilon(0.1));
  }
  SUBCASE("method of moments flag") {
    const auto samples = sample_beta({2.0, 2.0}, 10000, 5);
    const auto params =
        fit_beta(samples, FitMethod::MethodOfMoments).beta_params();
    CHECK(std::abs(params.v - 2.0) <= 0.15);
    CHECK(std::abs(params.w - 2.0) <= 0.15);
  }
  SUBCASE("rejects boundary samples and tiny batches") {
    std::vector<double> with_boundary(40, 0.5);
    with_boundary[7] = 1.0;
    CHECK_THROWS_WITH_AS(fit_beta(with_boundary), doctest::Contains("sample 7"),
                         std::invalid_argument);
    CHECK_THROWS_AS(fit_beta({0.1, 0.2, 0.3}), std::invalid_argument);
  }
}

TEST_CASE("empirical densities from cdf tables") {
  SUBCASE("uniform table") {
    const auto d = density_from_cdf_table({{0.0, 0.0}, {1.0, 1.0}});
    for (double x : {0.0, 0.3, 0.99})
      CHECK(d.pdf(x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.cdf(0.4) == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("two-segment table") {
    const auto d = density_from_cdf_table({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
    CHECK(d.pdf(0.1) == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(d.pdf(0.49) == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(d.pdf(0.5) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d.pdf(1.0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d.mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("segment masses equal the cdf increments exactly") {
    const std::vector<std::pair<double, double>> table{
        {0.0, 0.0}, {0.2, 0.1}, {0.45, 0.55}, {0.8, 0.9}, {1.0, 1.0}};
    const auto d = density_from_cdf_table(table);
    for (std::size_t i = 1; i < table.size(); ++i)
      CHECK(d.mass(table[i - 1].first, table[i].first) ==
            doctest::Approx(table[i].second - table[i - 1].second)
                .epsilon(1e-12));
    CHECK(pdf_mass(d) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("a positive first breakpoint gets an implicit ramp from zero") {
    const auto d = density_from_cdf_table({{0.25, 0.5}, {1.0, 1.0}});
    CHECK(d.pdf(0.1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.pdf(0.6) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(d.mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("rejects malformed tables") {
    CHECK_THROWS_AS(density_from_cdf_table({{0.0, 0.0}, {0.5, 0.4}, {0.4, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(density_from_cdf_table({{0.0, 0.5}, {0.5, 0.4}, {1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(density_from_cdf_table({{0.0, 0.0}, {1.0, 0.8}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(density_from_cdf_table({{0.0, 0.2}, {1.0, 1.0}}),
                    std::invalid_argument);
  }
}

TEST_CASE("normalize_scores") {
  const auto fico = normalize_scores({300.0, 850.0}, 300.0, 850.0);
  CHECK(fico[0] == 0.0);
  CHECK(fico[1] == 1.0);
  CHECK(normalize_scores({50.0}, 0.0, 100.0)[0] == doctest::Approx(0.5));
  CHECK_THROWS_WITH_AS(normalize_scores({10.0, 120.0}, 0.0, 100.0),
                       doctest::Contains("score 1"), std::invalid_argument);
}

TEST_CASE("csv ingestion") {
  SUBCASE("scores file") {
    const auto path = write_temp("scores.csv", "score\n0.5\n0.25\n\n0.75\n");
    const auto scores = read_scores_csv(path);
    CHECK(scores == std::vector<double>{0.5, 0.25, 0.75});
    std::remove(path.c_str());
  }
  SUBCASE("exam file averages three subjects then normalizes") {
    const auto path =
        write_temp("exam.csv", "math,reading,writing\n60,70,80\n90,90,90\n");
    const auto scores = read_exam_csv(path);
    CHECK(scores[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(scores[1] == doctest::Approx(0.9).epsilon(1e-12));
    std::remove(path.c_str());
  }
  SUBCASE("cdf file") {
    const auto path = write_temp("cdf.csv", "score,cum\n300,0\n600,0.6\n850,1\n");
    const auto points = read_cdf_csv(path);
    REQUIRE(points.size() == 3);
    CHECK(points[1].first == 600.0);
    CHECK(points[1].second == 0.6);
    std::remove(path.c_str());
  }
  SUBCASE("missing and malformed files") {
    CHECK_THROWS_AS(read_scores_csv("/nonexistent/nope.csv"), std::runtime_error);
    const auto path = write_temp("bad.csv", "score\nnot_a_number\n");
    CHECK_THROWS_WITH_AS(read_scores_csv(path), doctest::Contains(":2:"),
                         std::runtime_error);
    std::remove(path.c_str());
  }
}
