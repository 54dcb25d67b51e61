#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tcpkit/cone.hpp"
#include "tcpkit/fixtures.hpp"
#include "tcpkit/rng.hpp"

#include <cmath>

using namespace tcpkit;

namespace {

MatrixXd cols2(double a, double b, double c, double d) {
  MatrixXd g(2, 2);
  g << a, c, b, d;
  return g;
}

// Random pointed cone in R^3 from generators with positive first coordinate.
PolyhedralCone random_cone3(std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int k = 3 + static_cast<int>(rng.next() % 3);
  MatrixXd g(3, k);
  for (int j = 0; j < k; ++j) g.col(j) << 1.0, rng.uniform(-1, 1), rng.uniform(-1, 1);
  return PolyhedralCone::from_generators(g);
}

// Brute-force projection onto {G l : l >= 0} for at most 5 generators:
// best unconstrained least-squares fit over every support set that is feasible.
VectorXd brute_project(const MatrixXd& g, const VectorXd& z) {
  VectorXd best = VectorXd::Zero(z.size());
  const int k = static_cast<int>(g.cols());
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < k; ++j)
      if (mask >> j & 1) cols.push_back(j);
    MatrixXd s(g.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) s.col(static_cast<Eigen::Index>(c)) = g.col(cols[c]);
    const VectorXd l = s.colPivHouseholderQr().solve(z);
    if (l.minCoeff() < -1e-12) continue;
    const VectorXd p = s * l;
    if ((z - p).norm() < (z - best).norm()) best = p;
  }
  return best;
}

}  // namespace

TEST_CASE("orthant basics") {
  const auto k = PolyhedralCone::orthant(3);
  CHECK(k.is_orthant());
  CHECK(k.pointed());
  CHECK(dual(k) == k);
  const VectorXd z = (VectorXd(3) << 1, -2, 0.5).finished();
  CHECK(project(k, z) == (VectorXd(3) << 1, 0, 0.5).finished());
  CHECK(dist(k, z) == 2.0);
  CHECK(contains(k, z.cwiseAbs(), 0.0));
  CHECK_FALSE(contains(k, z, 1e-9));
  CHECK_THROWS_AS(PolyhedralCone::orthant(0), std::invalid_argument);
}

TEST_CASE("generator cones") {
  // The third generator is a positive combination of the first two.
  MatrixXd g(2, 3);
  g << 1, 1, 2, 0, 1, 1;
  const auto k = PolyhedralCone::from_generators(g);
  CHECK(k.generators().cols() == 2);
  CHECK(k.inequalities().cols() == 2);
  CHECK_THROWS_AS(PolyhedralCone::from_generators(cols2(1, 0, -1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(PolyhedralCone::from_generators(MatrixXd::Zero(2, 1)), std::invalid_argument);
  CHECK(PolyhedralCone::from_generators(MatrixXd::Identity(8, 8)).dim() == 8);
  CHECK_THROWS_AS(PolyhedralCone::from_generators(MatrixXd::Ones(8, 1)), std::invalid_argument);
}

TEST_CASE("dual of the wedge") {
  const auto wedge = fixtures::cone_by_name("wedge");
  const auto d = dual(wedge);
  // {y : y1 >= 0, y1 + y2 >= 0} has extreme rays (0,1) and (1,-1)/sqrt2.
  CHECK(contains(d, (VectorXd(2) << 0, 1).finished(), 1e-12));
  CHECK(contains(d, (VectorXd(2) << 1, -1).finished(), 1e-12));
  CHECK_FALSE(contains(d, (VectorXd(2) << -0.1, 1).finished(), 1e-12));
  CHECK_FALSE(contains(d, (VectorXd(2) << 1, -1.1).finished(), 1e-12));
  CHECK(dual(d) == wedge);
}

TEST_CASE("dual of a ray is a half-plane") {
  const auto d = dual(fixtures::cone_by_name("ray10"));
  CHECK_FALSE(d.pointed());
  CHECK(contains(d, (VectorXd(2) << 0, -5).finished(), 1e-12));
  CHECK(dist(d, (VectorXd(2) << -3, 4).finished()) == doctest::Approx(3.0));
}

TEST_CASE("property: projection matches brute force and Moreau decomposition") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto k = random_cone3(s);
    SplitMix64 rng(1000 + s);
    const VectorXd z = rng.normal_vector(3);
    const VectorXd p = project(k, z);
    CHECK((p - brute_project(k.generators(), z)).norm() <= 1e-9);
    // z = P_K(z) - P_{K*}(-z) with orthogonal parts.
    const VectorXd pd = project(dual(k), (-z).eval());
    CHECK((z - (p - pd)).norm() <= 1e-9);
    CHECK(std::abs(p.dot(pd)) <= 1e-9);
    CHECK(contains(k, p, 1e-9));
    CHECK(contains(dual(k), (p - z).eval(), 1e-9));
  }
}

TEST_CASE("property: dual generators satisfy every inequality") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto k = random_cone3(s);
    const MatrixXd prod = k.generators().transpose() * dual(k).generators();
    CHECK(prod.minCoeff() >= -1e-10);
    // Each dual extreme ray is orthogonal to at least two generators in R^3.
    for (Eigen::Index c = 0; c < prod.cols(); ++c) CHECK((prod.col(c).array().abs() <= 1e-10).count() >= 2);
  }
}

TEST_CASE("nnls on a known problem") {
  MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  const VectorXd b = (VectorXd(3) << 2, -1, 1).finished();
  const VectorXd x = nnls(a, b);
  // Minimizing over x2 = 0 gives x1 = 1.5, and the gradient in x2 is nonnegative.
  CHECK(x[0] == doctest::Approx(1.5));
  CHECK(x[1] == 0.0);
}

TEST_CASE("basis samples") {
  const auto k = fixtures::cone_by_name("wedge");
  const auto s = basis_samples(k, 50, 3);
  CHECK(s.size() == 50);
  for (const auto& v : s) {
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK(contains(k, v, 1e-12));
  }
  CHECK(basis_samples(k, 50, 3) == s);
  CHECK_THROWS_AS(basis_samples(k, 0, 3), std::invalid_argument);
}

TEST_CASE("delta metric") {
  const auto o2 = PolyhedralCone::orthant(2);
  const auto ray = fixtures::cone_by_name("ray10");
  CHECK(delta_metric(o2, o2, 100).value == 0.0);
  CHECK(delta_metric(ray, o2, 10000).value == doctest::Approx(1.0).epsilon(0.02));
  CHECK(delta_metric(ray, o2, 500, 1).value == delta_metric(o2, ray, 500, 1).value);
  // Two rays at angle theta are sin(theta) apart when theta <= pi/2.
  const auto r11 = fixtures::cone_by_name("ray11");
  CHECK(delta_metric(ray, r11, 10).value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(delta_metric(o2, PolyhedralCone::orthant(3), 10), std::invalid_argument);
}

TEST_CASE("property: delta metric triangle inequality on fixture cones") {
  const auto pairs = fixtures::cone_pairs();
  std::vector<PolyhedralCone> plane;
  for (const auto& [a, b] : pairs)
    for (const auto* c : {&a, &b})
      if (c->dim() == 2) plane.push_back(*c);
  for (const auto& a : plane)
    for (const auto& b : plane)
      for (const auto& c : plane) {
        const double ab = delta_metric(a, b, 400).value, bc = delta_metric(b, c, 400).value;
        CHECK(delta_metric(a, c, 400).value <= ab + bc + 0.02);
      }
}

TEST_CASE("tangent cones") {
  const auto o2 = PolyhedralCone::orthant(2);
  const auto interior = tangent_cone(o2, (VectorXd(2) << 1, 1).finished());
  CHECK(interior.inequalities().cols() == 0);
  const auto edge = tangent_cone(o2, (VectorXd(2) << 1, 0).finished());
  CHECK(contains(edge, (VectorXd(2) << -3, 1).finished(), 0.0));
  CHECK_FALSE(contains(edge, (VectorXd(2) << 0, -1).finished(), 1e-9));
  CHECK(tangent_cone(o2, VectorXd::Zero(2)) == o2);
  const auto wedge = fixtures::cone_by_name("wedge");
  const auto tw = tangent_cone(wedge, (VectorXd(2) << 2, 0).finished());
  CHECK(contains(tw, (VectorXd(2) << -1, 0.5).finished(), 1e-12));
  CHECK_FALSE(contains(tw, (VectorXd(2) << 0, -1).finished(), 1e-9));
  CHECK_THROWS_AS(tangent_cone(o2, (VectorXd(2) << -1, 0).finished()), std::invalid_argument);
}

TEST_CASE("dual generators of the empty system span everything") {
  const MatrixXd d = dual_generators(2, MatrixXd(2, 0));
  CHECK(d.cols() == 4);
  CHECK(dual_generators(2, MatrixXd::Identity(2, 2) * 1.0).cols() == 2);
  MatrixXd both(2, 4);
  both << 1, -1, 0, 0, 0, 0, 1, -1;
  CHECK(dual_generators(2, both).cols() == 0);
}
