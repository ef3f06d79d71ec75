#include <doctest.h>

#include <cmath>
#include <set>

#include "sparse_limits/errors.hpp"
#include "sparse_limits/model.hpp"

using namespace sparse_limits;

namespace {

struct Moments {
  double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;

  void add(double x, double y) {
    ++n;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  double var_x() const { return sxx / n - (sx / n) * (sx / n); }
  double corr() const {
    const double cxy = sxy / n - (sx / n) * (sy / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    return cxy / std::sqrt(var_x() * vy);
  }
};

}  // namespace

TEST_CASE("config validation") {
  ProblemConfig c;
  c.n_samples = 10;
  c.dimension = 8;
  c.sparsity = 2;
  CHECK_NOTHROW(c.validate());

  auto bad = c;
  bad.sparsity = 9;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = c;
  bad.sparsity = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = c;
  bad.rho = 1.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = c;
  bad.snr = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = c;
  bad.sigma2 = -1;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = c;
  bad.nu = -0.1;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = c;
  bad.n_samples = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("coefficient model names round-trip") {
  for (auto m : {CoeffModel::FixedSigns, CoeffModel::GaussianIID})
    CHECK(coeff_model_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(coeff_model_from_string("laplace"), ParameterError);
}

TEST_CASE("support set") {
  SupportSet s({5, 1, 3});
  CHECK(s.indices() == std::vector<int>{1, 3, 5});
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK(s.overlap(SupportSet({1, 2, 5})) == 2);
  CHECK_THROWS_AS(SupportSet({1, 1}), ParameterError);
  CHECK_THROWS_AS(SupportSet({-1, 2}), ParameterError);
}

TEST_CASE("sensing matrix, independent columns") {
  Moments m;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix x = model::generate_sensing_matrix(100, 4, 0.0, seed);
    for (int r = 0; r < 100; ++r) m.add(x(r, 0), x(r, 1));
  }
  // 10^4 rows pooled.
  const double se_var = std::sqrt(2.0 / m.n) * 0.01;
  CHECK(std::abs(m.var_x() - 0.01) < 5 * se_var);
  CHECK(std::abs(m.corr()) < 5.0 / std::sqrt(m.n));
}

TEST_CASE("sensing matrix, rho = 1 rows are constant") {
  const Matrix x = model::generate_sensing_matrix(7, 9, 1.0, 3);
  for (int r = 0; r < 7; ++r)
    for (int k = 1; k < 9; ++k) CHECK(x(r, k) == x(r, 0));
}

TEST_CASE("sensing matrix, pooled correlation at rho = 0.6") {
  Moments m;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Matrix x = model::generate_sensing_matrix(64, 512, 0.6, seed);
    for (int r = 0; r < 64; ++r)
      for (int k = 0; k + 1 < 512; k += 2) m.add(x(r, k), x(r, k + 1));
  }
  CHECK(std::abs(m.corr() - 0.6) <= 0.02);
  CHECK(std::abs(m.var_x() - 1.0 / 64) < 0.02 / 64);
  CHECK_THROWS_AS(model::generate_sensing_matrix(4, 4, -0.1, 0), ParameterError);
}

TEST_CASE("signal generation") {
  SUBCASE("fixed signs") {
    const auto s = model::generate_signal(512, 32, 1.0, CoeffModel::FixedSigns, 9);
    CHECK(s.support.size() == 32);
    int off = 0;
    for (int j = 0; j < 512; ++j) {
      if (s.support.contains(j))
        CHECK(std::abs(s.beta(j)) == 1.0);
      else
        off += s.beta(j) != 0.0;
    }
    CHECK(off == 0);
    const auto s4 = model::generate_signal(20, 3, 4.0, CoeffModel::FixedSigns, 9);
    for (int j : s4.support.indices()) CHECK(std::abs(s4.beta(j)) == 2.0);
  }
  SUBCASE("full support") {
    const auto s = model::generate_signal(6, 6, 1.0, CoeffModel::GaussianIID, 1);
    CHECK(s.support.indices() == std::vector<int>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("gaussian coefficients have variance sigma^2") {
    const double sigma2 = 2.5;
    double n = 0, s = 0, s2 = 0;
    for (std::uint64_t seed = 0; seed < 100000; ++seed) {
      const auto sig = model::generate_signal(10, 3, sigma2, CoeffModel::GaussianIID, seed);
      for (int j : sig.support.indices()) {
        ++n;
        s += sig.beta(j);
        s2 += sig.beta(j) * sig.beta(j);
      }
    }
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(std::abs(var - sigma2) < 3 * sigma2 * std::sqrt(2.0 / n));
  }
  SUBCASE("support is uniform over subsets") {
    std::vector<int> hits(10, 0);
    const int draws = 20000;
    for (int seed = 0; seed < draws; ++seed) {
      const auto sig = model::generate_signal(10, 3, 1.0, CoeffModel::FixedSigns, seed);
      for (int j : sig.support.indices()) ++hits[j];
    }
    const double p = 0.3;
    for (int h : hits) CHECK(std::abs(h - draws * p) < 5 * std::sqrt(draws * p * (1 - p)));
  }
  CHECK_THROWS_AS(model::generate_signal(3, 4, 1.0, CoeffModel::FixedSigns, 0), ParameterError);
}

TEST_CASE("observations") {
  const Matrix x = model::generate_sensing_matrix(2000, 5, 0.0, 1);
  SUBCASE("zero signal is pure noise") {
    const Vector y = model::generate_observations(x, Vector::Zero(5), 50.0, 2);
    const double var = y.squaredNorm() / y.size() - std::pow(y.mean(), 2);
    CHECK(std::abs(var - 1.0 / 50) < 5 * std::sqrt(2.0 / y.size()) / 50);
  }
  SUBCASE("noiseless limit") {
    Vector beta = Vector::Zero(5);
    beta(1) = 1.0;
    beta(3) = -1.0;
    const Vector y = model::generate_observations(x, beta, 1e12, 2);
    CHECK((y - x * beta).cwiseAbs().maxCoeff() < 1e-4);
  }
  SUBCASE("normalized 20 dB regime") {
    const double snr = 100.0 * std::log2(512.0);
    double n = 0, s2 = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Matrix xs = model::generate_sensing_matrix(256, 512, 0.0, seed);
      const auto sig = model::generate_signal(512, 32, 1.0, CoeffModel::FixedSigns, seed);
      const Vector w = model::generate_observations(xs, sig.beta, snr, seed) - xs * sig.beta;
      n += w.size();
      s2 += w.squaredNorm();
    }
    CHECK(std::abs(s2 / n - 1.0 / snr) < 5 * std::sqrt(2.0 / n) / snr);
  }
  CHECK_THROWS_AS(model::generate_observations(x, Vector::Zero(4), 1.0, 0), ParameterError);
  CHECK_THROWS_AS(model::generate_observations(x, Vector::Zero(5), 0.0, 0), ParameterError);
}

TEST_CASE("matrix corruption") {
  const Matrix x = model::generate_sensing_matrix(100, 50, 0.3, 8);
  CHECK(model::corrupt_matrix(x, 0.0, 1) == x);

  const Matrix v = model::corrupt_matrix(x, 1.0, 1) - x;
  const double var = v.squaredNorm() / v.size() - std::pow(v.mean(), 2);
  CHECK(std::abs(var - 0.01) < 5 * 0.01 * std::sqrt(2.0 / v.size()));

  double n = 0, s2 = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix xs = model::generate_sensing_matrix(100, 50, 0.0, seed);
    const Matrix z = model::corrupt_matrix(xs, 4.0, seed + 1000);
    n += z.size();
    s2 += z.squaredNorm();
  }
  CHECK(std::abs(s2 / n - 5.0 / 100) < 5 * (5.0 / 100) * std::sqrt(2.0 / n));
  CHECK_THROWS_AS(model::corrupt_matrix(x, -1.0, 0), ParameterError);
}

TEST_CASE("dataset invariants and determinism") {
  ProblemConfig c;
  c.n_samples = 30;
  c.dimension = 40;
  c.sparsity = 5;
  c.snr = 20;
  c.rho = 0.2;
  c.seed = 99;
  const auto a = model::generate_dataset(c);
  const auto b = model::generate_dataset(c);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.beta == b.beta);
  CHECK(a.support == b.support);
  CHECK_FALSE(a.z.has_value());
  CHECK(&a.observed_matrix() == &a.x);
  CHECK(a.x.rows() == 30);
  CHECK(a.x.cols() == 40);
  CHECK(a.y.size() == 30);
  CHECK(a.support.size() == 5);
  for (int j = 0; j < 40; ++j)
    if (!a.support.contains(j)) CHECK(a.beta(j) == 0.0);

  c.nu = 0.5;
  const auto noisy = model::generate_dataset(c);
  REQUIRE(noisy.z.has_value());
  CHECK(noisy.x == a.x);
  CHECK(&noisy.observed_matrix() == &*noisy.z);

  c.seed = 100;
  CHECK_FALSE(model::generate_dataset(c).x == a.x);
}
