#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "face_system.hpp"
#include "oracles.hpp"
#include "tcpkit/complementary.hpp"
#include "tcpkit/fixtures.hpp"
#include "tcpkit/rng.hpp"

#include <cmath>

using namespace tcpkit;

namespace {

const PolyhedralCone kO2 = PolyhedralCone::orthant(2);

VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

// Entry rule: -a when every trailing index is in alpha, 1 on the diagonal
// outside alpha, 0 otherwise.
double expected_entry(const Tensor& a, const IndexSet& alpha, const std::vector<int>& idx) {
  bool tail_in = true;
  for (std::size_t p = 1; p < idx.size(); ++p) tail_in = tail_in && alpha.contains(idx[p]);
  if (tail_in) return -oracle::entry(a, idx);
  bool diag = true;
  for (int i : idx) diag = diag && i == idx[0];
  return diag && !alpha.contains(idx[0]) ? 1.0 : 0.0;
}

}  // namespace

TEST_CASE("complementary tensor identities") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const int m = 2 + static_cast<int>(s % 3), n = 2 + static_cast<int>(s % 2);
    const Tensor a = fixtures::random_tensor(fixtures::RandomKind::general, m, n, s);
    CHECK(complementary_tensor(a, IndexSet::none(n)) == unit_tensor(m, n));
    CHECK(complementary_tensor(a, IndexSet::full(n)) == -a);
    for (const auto& alpha : subsets_by_size(n)) {
      const Tensor c = complementary_tensor(a, alpha);
      for (const auto& idx : oracle::multi_indices(m, n)) CHECK(c(idx) == expected_entry(a, alpha, idx));
    }
  }
  CHECK_THROWS_AS(complementary_tensor(fixtures::e1(), IndexSet::full(3)), std::invalid_argument);
}

TEST_CASE("complementary tensor acts blockwise") {
  const Tensor a = fixtures::random_tensor(fixtures::RandomKind::general, 3, 3, 4);
  const IndexSet alpha(3, {0, 2});
  const VectorXd u = (VectorXd(3) << 0.7, -1.2, 0.4).finished();
  const VectorXd cu = oracle::apply_m1(complementary_tensor(a, alpha), u);
  VectorXd ua(2);
  ua << u[0], u[2];
  const VectorXd top = -oracle::apply_m1(principal_subtensor(a, alpha), ua);
  CHECK(cu[0] == doctest::Approx(top[0]).epsilon(1e-12));
  CHECK(cu[2] == doctest::Approx(top[1]).epsilon(1e-12));
  CHECK(cu[1] == doctest::Approx(-apply_off(a, alpha, ua)[0] + u[1] * u[1]).epsilon(1e-12));
}

TEST_CASE("tpos membership on the third example limit") {
  const Tensor bar = fixtures::e3_limit();
  const Verdict sep = tpos_contains(kO2, bar, v2(1, 2));
  CHECK(sep.status == Status::fails);
  CHECK(sep.certificate >= 0.3);
  const Verdict in = tpos_contains(kO2, bar, v2(3, 3));
  CHECK(in.status == Status::holds);
  REQUIRE(in.witness);
  CHECK((apply_m1(bar, *in.witness) - v2(3, 3)).norm() <= 1e-6 * std::sqrt(18.0));
  CHECK(tpos_contains(kO2, fixtures::e2(), v2(5, 5)).status == Status::holds);
  CHECK(tpos_contains(kO2, bar, VectorXd::Zero(2)).status == Status::holds);
  CHECK_THROWS_AS(tpos_contains(kO2, bar, VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("property: images of the cone are found and are closed under scaling") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const int m = 2 + static_cast<int>(s % 3);
    const Tensor a = fixtures::random_tensor(fixtures::RandomKind::general, m, 2, 700 + s);
    SplitMix64 rng(s);
    const VectorXd x0 = (VectorXd(2) << rng.uniform(0, 2), rng.uniform(0, 2)).finished();
    const VectorXd y = apply_m1(a, x0);
    const Verdict v = tpos_contains(kO2, a, y);
    CHECK(v.status == Status::holds);
    if (v.status != Status::holds) continue;
    for (double t : {0.0, 0.5, 2.0, 10.0}) {
      const VectorXd xt = std::pow(t, 1.0 / (m - 1)) * *v.witness;
      CHECK((apply_m1(a, xt) - t * y).norm() <= 1e-6 * std::max(1.0, t * y.norm()));
    }
  }
}

TEST_CASE("membership examples") {
  const MembershipResult r = q_membership(fixtures::e1(), v2(-1, -1));
  CHECK(r.member == Membership::member);
  REQUIRE(r.alpha);
  CHECK(*r.alpha == IndexSet::full(2));
  const VectorXd x = solution_from_membership(r, fixtures::e1(), v2(-1, -1));
  CHECK((x - VectorXd::Constant(2, 1.0 / std::sqrt(3.0))).norm() <= 1e-12);
  CHECK(oracle::minmap_residual(fixtures::e1(), v2(-1, -1), x) <= 1e-8);

  for (const auto& name : fixtures::sample_names()) {
    const Tensor a = fixtures::by_name(name);
    const MembershipResult z = q_membership(a, VectorXd::Ones(a.dim()));
    CHECK(z.member == Membership::member);
    CHECK(z.alpha->empty());
    CHECK(solution_from_membership(z, a, VectorXd::Ones(a.dim())).isZero(0.0));
  }

  const MembershipResult none = q_membership(fixtures::e1(), v2(1, -1));
  CHECK(none.member == Membership::non_member);
  CHECK(none.subsets_examined == 4);
  CHECK_THROWS_AS(solution_from_membership(none, fixtures::e1(), v2(1, -1)), std::logic_error);

  const MembershipResult id = q_membership(fixtures::identity(3, 2), v2(-1, -4));
  CHECK(solution_from_membership(id, fixtures::identity(3, 2), v2(-1, -4)).isApprox(v2(1, 2), 1e-12));
}

TEST_CASE("the fourth example tensor solves every sampled q") {
  SplitMix64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const VectorXd q = v2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const MembershipResult r = q_membership(fixtures::e4(), q);
    CHECK(r.member == Membership::member);
    if (r.member == Membership::member)
      CHECK(oracle::minmap_residual(fixtures::e4(), q, solution_from_membership(r, fixtures::e4(), q)) <= 1e-7);
  }
}

TEST_CASE("property: members come with verified solutions") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const int m = 3 + static_cast<int>(s % 2), n = 2 + static_cast<int>(s % 2);
    const Tensor a = fixtures::random_tensor(fixtures::RandomKind::general, m, n, 900 + s);
    SplitMix64 rng(s);
    VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.uniform(-2, 2);
    const MembershipResult r = q_membership(a, q);
    if (r.member != Membership::member) continue;
    const VectorXd x = solution_from_membership(r, a, q);
    CHECK(x.minCoeff() >= 0.0);
    CHECK(oracle::minmap_residual(a, q, x) <= 1e-7);
  }
}

TEST_CASE("nonsingularity transfers to complementary tensors") {
  std::vector<Tensor> as{fixtures::e1(), fixtures::e2(), fixtures::e4(), fixtures::identity(3, 3)};
  for (std::uint64_t s = 0; s < 6; ++s) as.push_back(fixtures::random_tensor(fixtures::RandomKind::general, 3, 2, s));
  for (const auto& a : as) {
    const auto k = PolyhedralCone::orthant(a.dim());
    for (const auto& alpha : subsets_by_size(a.dim())) {
      if (alpha.empty()) continue;
      const Verdict sub = is_K_nonsingular(principal_subtensor(a, alpha), PolyhedralCone::orthant(alpha.size()));
      if (sub.status != Status::holds) continue;
      CHECK(is_K_nonsingular(complementary_tensor(a, alpha), k).status == Status::holds);
    }
  }
}

TEST_CASE("face systems") {
  using namespace tcpkit::face;
  const FaceOptions opt;
  const FaceResult pair = solve_face(fixtures::identity(3, 2), v2(-1, -4), IndexSet::full(2), opt);
  CHECK(pair.status == FaceStatus::feasible);
  REQUIRE(pair.points.size() == 1);
  CHECK(pair.points[0].u.isApprox(v2(1, 2), 1e-10));

  const VectorXd q3 = (VectorXd(3) << -1, -4, -9).finished();
  const FaceResult triple = solve_face(fixtures::identity(3, 3), q3, IndexSet::full(3), opt);
  CHECK(triple.status == FaceStatus::feasible);
  REQUIRE_FALSE(triple.points.empty());
  CHECK((triple.points[0].u - (VectorXd(3) << 1, 2, 3).finished()).norm() <= 1e-8);

  CHECK(solve_face(fixtures::identity(3, 3), VectorXd::Ones(3), IndexSet::full(3), opt).status ==
        FaceStatus::infeasible);
  CHECK(solve_face(fixtures::e1(), v2(1, -1), IndexSet::full(2), opt).status == FaceStatus::infeasible);
  CHECK(solve_face(fixtures::e1(), v2(1, -1), IndexSet(2, {0}), opt).status == FaceStatus::infeasible);
  CHECK(solve_face(fixtures::e1(), v2(1, 1), IndexSet::none(2), opt).status == FaceStatus::feasible);

  // The slack must hold off the face: x = (1, 0) gives w2 = a_211 + q2 = 1 - 2 < 0.
  const Tensor a = Tensor(3, 2, {{{0, 0, 0}, 1.0}, {{1, 0, 0}, 1.0}});
  CHECK(solve_face(a, v2(-1, -2), IndexSet(2, {0}), opt).status == FaceStatus::infeasible);
  CHECK(solve_face(a, v2(-1, -0.5), IndexSet(2, {0}), opt).status == FaceStatus::feasible);

  const SingularDirections dirs = singular_directions(fixtures::e2(), IndexSet::full(2), opt, 8);
  CHECK(dirs.complete);
  REQUIRE(dirs.directions.size() == 2);
}

TEST_CASE("property: random three-dimensional faces are solved or certified") {
  using namespace tcpkit::face;
  int solved = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Tensor a = fixtures::random_tensor(fixtures::RandomKind::general, 3, 3, 40 + s);
    SplitMix64 rng(s);
    VectorXd u(3);
    for (int i = 0; i < 3; ++i) u[i] = rng.uniform(0.2, 1.5);
    // Plant a solution: q = -A u^2.
    const VectorXd q = -apply_m1(a, u);
    const FaceResult r = solve_face(a, q, IndexSet::full(3), FaceOptions{});
    CHECK(r.status == FaceStatus::feasible);
    for (const auto& p : r.points) CHECK((apply_m1(a, p.u) + q).norm() <= 1e-8);
    solved += r.status == FaceStatus::feasible;
  }
  CHECK(solved == 20);
}
