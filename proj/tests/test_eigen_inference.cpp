#include "doctest.h"
#include "oracles.hpp"

#include "spikecov/eigen_inference.hpp"
#include "spikecov/errors.hpp"
#include "spikecov/sampling.hpp"

#include <cmath>
#include <numeric>

using namespace spikecov;

namespace {

PosteriorSamples from_column(const std::vector<double>& v) {
  PosteriorSamples ps;
  ps.k = 1;
  ps.n_draws = static_cast<int>(v.size());
  ps.eigenvalues.resize(ps.n_draws, 1);
  for (int j = 0; j < ps.n_draws; ++j) ps.eigenvalues(j, 0) = v[static_cast<std::size_t>(j)];
  return ps;
}

PosteriorSamples from_vectors(const std::vector<Vector>& vs) {
  PosteriorSamples ps;
  ps.k = 1;
  ps.n_draws = static_cast<int>(vs.size());
  ps.eigenvalues = Matrix::Ones(ps.n_draws, 1);
  for (const Vector& v : vs) ps.eigenvectors.push_back(v);
  return ps;
}

Vector unit(Index p, Index i) {
  Vector v = Vector::Zero(p);
  v(i) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("summaries of constant draws") {
  const auto s = summarize_eigenvalues(from_column(std::vector<double>(50, 3.5)), 0.95);
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean == 3.5);
  CHECK(s[0].ci_low == 3.5);
  CHECK(s[0].ci_high == 3.5);
  CHECK(s[0].n_draws == 50);
  CHECK_FALSE(s[0].mean_outside_ci);
}

TEST_CASE("credible interval of 1..100 at level 0.90") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::vector<double> shuffled = v;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto s = summarize_eigenvalues(from_column(shuffled), 0.90);
  CHECK(s[0].ci_low == doctest::Approx(5.95).epsilon(1e-14));
  CHECK(s[0].ci_high == doctest::Approx(95.05).epsilon(1e-14));
  CHECK(s[0].mean == doctest::Approx(50.5));
}

TEST_CASE("quantile rule agrees with the reference on random data") {
  RngStream st(1, 0);
  std::vector<double> v(257);
  for (double& x : v) x = st.normal();
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (double q : {0.0, 0.025, 0.1, 0.5, 0.77, 0.975, 1.0}) {
    CHECK(quantile_sorted(sorted, q) == doctest::Approx(oracle::quantile(v, q)).epsilon(1e-14));
  }
}

TEST_CASE("credible intervals are nested in the level") {
  RngStream st(2, 0);
  std::vector<double> v(500);
  for (double& x : v) x = st.gamma(2.0, 1.0);
  auto prev = credible_interval(v, 0.5);
  for (double level : {0.6, 0.8, 0.9, 0.95, 0.99}) {
    const auto ci = credible_interval(v, level);
    CHECK(ci.first <= prev.first);
    CHECK(ci.second >= prev.second);
    prev = ci;
  }
}

TEST_CASE("summaries need at least two draws and a valid level") {
  CHECK_THROWS_AS(summarize_eigenvalues(from_column({1.0}), 0.95), InvalidConfiguration);
  CHECK_THROWS_AS(credible_interval(std::vector<double>{1.0, 2.0}, 1.0), InvalidConfiguration);
}

TEST_CASE("mean is independent of summation order to 1e-12") {
  RngStream st(3, 0);
  std::vector<double> v(4099);
  for (double& x : v) x = 1e4 + st.normal();
  std::vector<double> r(v.rbegin(), v.rend());
  CHECK(std::abs(mean_of(v) - mean_of(r)) <= 1e-12 * std::abs(mean_of(v)));
}

TEST_CASE("mean_eigenvector basic cases") {
  const Vector xi = Vector::Ones(4).normalized();
  const VectorSummary same = mean_eigenvector(from_vectors({xi, xi, xi}), 1);
  CHECK((same.mean_vector - xi).norm() <= 1e-14);
  CHECK(same.dispersion == doctest::Approx(0.0).epsilon(1e-14));

  const VectorSummary flipped = mean_eigenvector(from_vectors({xi, Vector(-xi)}), 1);
  CHECK((flipped.mean_vector - xi).norm() <= 1e-14);
}

TEST_CASE("mean_eigenvector concentrates under small noise") {
  RngStream st(4, 0);
  std::vector<Vector> draws;
  const Index p = 10;
  for (int j = 0; j < 100; ++j) {
    Vector v = unit(p, 0);
    for (Index i = 1; i < p; ++i) v(i) = 0.01 * st.normal();
    v.normalize();
    if (j % 3 == 1) v = -v;
    draws.push_back(v);
  }
  const VectorSummary s = mean_eigenvector(from_vectors(draws), 1);
  CHECK(s.mean_vector.norm() == doctest::Approx(1.0).epsilon(1e-10));
  const double angle = std::acos(std::min(1.0, std::abs(s.mean_vector(0))));
  CHECK(angle <= 0.02);
}

TEST_CASE("mean_eigenvector requires vector draws") {
  PosteriorSamples ps = from_column({1.0, 2.0});
  CHECK_THROWS_AS(mean_eigenvector(ps, 1), InvalidConfiguration);
}

TEST_CASE("eigenvector_error") {
  const Vector e1 = unit(3, 0);
  const Vector e2 = unit(3, 1);
  CHECK(eigenvector_error(e1, e1) == 0.0);
  CHECK(eigenvector_error(e1, e2) == 1.0);
  Vector v(3);
  v << std::cos(M_PI / 6), std::sin(M_PI / 6), 0.0;
  CHECK(eigenvector_error(v, e1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(eigenvector_error(-v, e1) == eigenvector_error(v, e1));
  CHECK(eigenvector_error(v, -e1) == eigenvector_error(v, e1));
  CHECK_THROWS_AS(eigenvector_error(2.0 * e1, e1), InvalidConfiguration);

  RngStream st(5, 0);
  for (int t = 0; t < 200; ++t) {
    Vector a(6);
    Vector b(6);
    for (Index i = 0; i < 6; ++i) {
      a(i) = st.normal();
      b(i) = st.normal();
    }
    a.normalize();
    b.normalize();
    const double e = eigenvector_error(a, b);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    CHECK(eigenvector_error(Vector(-a), b) == e);
    CHECK(eigenvector_error(a, Vector(-b)) == e);
  }
}

TEST_CASE("relative_error") {
  CHECK(relative_error(150.0, 150.0) == 0.0);
  CHECK(relative_error(300.0, 150.0) == 1.0);
  CHECK(relative_error(165.0, 150.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(relative_error(1.0, 0.0), InvalidConfiguration);
}

TEST_CASE("coverage with closed intervals") {
  const std::vector<std::pair<double, double>> all{{0, 2}, {0.5, 1.5}};
  CHECK(coverage(all, 1.0) == 1.0);
  CHECK(coverage(all, 5.0) == 0.0);
  CHECK(coverage(all, 2.0) == 0.5);
  CHECK(coverage(std::vector<std::pair<double, double>>{{1.0, 1.0}}, 1.0) == 1.0);
}
