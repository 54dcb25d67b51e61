#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tcpkit/fixtures.hpp"
#include "tcpkit/stability.hpp"

#include <cmath>

using namespace tcpkit;

namespace {

VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

TcpInstance orthant_instance(Tensor a, VectorXd q) {
  return TcpInstance{PolyhedralCone::orthant(a.dim()), std::move(q), std::move(a)};
}

const TcpInstance kIdentity = orthant_instance(fixtures::identity(3, 2), v2(-1, -1));

}  // namespace

TEST_CASE("perturbation draws") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Perturbation p = draw_perturbation(3, 2, 1e-3, s);
    CHECK(p.size() <= 1e-3 * (1 + 1e-12));
    CHECK(p.size() > 0.0);
    const Perturbation again = draw_perturbation(3, 2, 1e-3, s);
    CHECK(again.dq == p.dq);
    CHECK(again.da == p.da);
  }
  CHECK(draw_perturbation(3, 2, 1e-2, 1, PerturbTarget::q_only).da.nnz() == 0);
  CHECK(draw_perturbation(3, 2, 1e-2, 1, PerturbTarget::tensor_only).dq.isZero(0.0));
  CHECK(draw_perturbation(3, 2, 0.0, 1).size() == 0.0);
}

TEST_CASE("local uniqueness") {
  const Verdict v = local_uniqueness_certificate(kIdentity, v2(1, 1));
  CHECK(v.status == Status::holds);
  CHECK(v.certificate == doctest::Approx(1.0));

  const Verdict vac = local_uniqueness_certificate(orthant_instance(fixtures::identity(3, 2), v2(1, 1)), v2(0, 0));
  CHECK(vac.status == Status::holds);

  const Verdict sing = local_uniqueness_certificate(orthant_instance(fixtures::e2(), v2(0, 0)), v2(1, 0));
  CHECK(sing.status == Status::fails);
  CHECK(sing.certificate <= 0.0);

  CHECK_THROWS_AS(local_uniqueness_certificate(kIdentity, v2(2, 1)), std::invalid_argument);
}

TEST_CASE("local uniqueness at a boundary solution") {
  // Negated identity with q = (1, 1): x = (1, 0) has w = (0, 1), so S is
  // {v2 = 0} and T is {v2 >= 0}; the form -v1^2 is negative there.
  const auto inst = orthant_instance(fixtures::negated_identity(3, 2), v2(1, 1));
  const Verdict v = local_uniqueness_certificate(inst, v2(1, 0));
  CHECK(v.status == Status::fails);
  // At x = 0 the critical cone is {0}.
  CHECK(local_uniqueness_certificate(inst, v2(0, 0)).status == Status::holds);
}

TEST_CASE("existence under perturbation") {
  const PerturbationReport r = perturb_existence(kIdentity, 1e-3, 50, 7);
  CHECK(r.solvable_fraction == 1.0);
  CHECK(r.max_solution_norm <= std::sqrt(2.0) + 0.01);
  CHECK(r.trials == 50);

  const PerturbationReport zero = perturb_existence(kIdentity, 0.0, 10, 7);
  CHECK(zero.solvable_fraction == 1.0);
  CHECK(zero.max_solution_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  CHECK(perturb_existence(orthant_instance(fixtures::e1(), v2(1, 1)), 1e-2, 30, 1).solvable_fraction == 1.0);
  CHECK_THROWS_AS(perturb_existence(orthant_instance(fixtures::negated_identity(3, 2), v2(1, 1)), 1e-3, 5, 0),
                  PreconditionError);
  CHECK_THROWS_AS(perturb_existence(orthant_instance(fixtures::e1(), v2(-1, 1)), 1e-3, 5, 0), PreconditionError);
  CHECK_THROWS_AS(perturb_existence(TcpInstance{fixtures::cone_by_name("wedge"), v2(1, 1), fixtures::e1()}, 1e-3, 5, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(perturb_existence(kIdentity, -1.0, 5, 0), std::invalid_argument);
}

TEST_CASE("error bound") {
  const PerturbationReport a = error_bound_probe(kIdentity, v2(1, 1), 0.1, 1e-3, 50, 7);
  const PerturbationReport b = error_bound_probe(kIdentity, v2(1, 1), 0.1, 1e-4, 50, 7);
  CHECK(a.error_ratio_max <= 5.0);
  CHECK(a.error_ratio_max > 0.0);
  CHECK(a.error_ratio_max <= 2.0 * b.error_ratio_max);
  CHECK(b.error_ratio_max <= 2.0 * a.error_ratio_max);
  const PerturbationReport none = error_bound_probe(kIdentity, v2(1, 1), 0.1, 0.0, 5, 7);
  CHECK(none.skipped == 5);
  CHECK_THROWS_AS(error_bound_probe(orthant_instance(fixtures::e2(), v2(0, 0)), v2(1, 0), 0.1, 1e-3, 5, 0),
                  PreconditionError);
}

TEST_CASE("upper semicontinuity") {
  const auto inst = orthant_instance(fixtures::identity(3, 2), v2(-1, -4));
  const double big = usc_probe(inst, 1e-3, 50, 7).max_excursion;
  const double small = usc_probe(inst, 1e-4, 50, 7).max_excursion;
  CHECK(big <= 0.01);
  CHECK(big > 0.0);
  CHECK(small <= big + 1e-6);
  CHECK(usc_probe(inst, 0.0, 10, 7).max_excursion == 0.0);
  CHECK_THROWS_AS(usc_probe(orthant_instance(fixtures::e1(), v2(1, 1)), 1e-3, 5, 0), PreconditionError);
}

TEST_CASE("graph closedness") {
  std::vector<SequenceMember> seq;
  for (int l = 1; l <= 40; ++l) {
    const VectorXd q = v2(-1.0 - 1.0 / l, -4.0 + 1.0 / l);
    seq.push_back({orthant_instance(fixtures::identity(3, 2), q), (-q).cwiseSqrt()});
  }
  const SequenceMember limit{orthant_instance(fixtures::identity(3, 2), v2(-1, -4)), v2(1, 2)};
  const ClosednessResult c = graph_closedness_probe(seq, limit);
  CHECK(c.closed);
  CHECK(c.limit_residual <= c.tolerance);
  const SequenceMember wrong{limit.instance, v2(1, 2.1)};
  CHECK_FALSE(graph_closedness_probe(seq, wrong).closed);
  seq.push_back({limit.instance, v2(3, 3)});
  CHECK_THROWS_AS(graph_closedness_probe(seq, limit), std::invalid_argument);
}

TEST_CASE("unsolvable neighbourhood") {
  const PerturbationReport r = unsolvable_neighborhood_probe(fixtures::negated_identity(3, 2), v2(-1, -1), 1e-3, 30, 3);
  REQUIRE(r.fraction);
  CHECK(*r.fraction == 1.0);
  // Every q is solvable for these tensors, so no non-member exists.
  CHECK_THROWS_AS(unsolvable_neighborhood_probe(fixtures::identity(3, 2), v2(-1, -1), 1e-3, 5, 0), PreconditionError);
  CHECK_THROWS_AS(unsolvable_neighborhood_probe(fixtures::e4(), v2(-1, -1), 1e-3, 5, 0), PreconditionError);
  // E1 has a non-member q but a singular principal sub-tensor.
  CHECK_THROWS_AS(unsolvable_neighborhood_probe(fixtures::e1(), v2(1, -1), 1e-3, 5, 0), PreconditionError);
}

TEST_CASE("openness of nonsingularity") {
  const PerturbationReport r = nonsingularity_openness_probe(PolyhedralCone::orthant(2), fixtures::e1(), 1e-3, 30, 1);
  REQUIRE(r.fraction);
  CHECK(*r.fraction == 1.0);
  const PerturbationReport w =
      nonsingularity_openness_probe(fixtures::cone_by_name("wedge"), fixtures::e1(), 1e-3, 20, 1);
  CHECK(*w.fraction == 1.0);
  CHECK_THROWS_AS(nonsingularity_openness_probe(PolyhedralCone::orthant(2), fixtures::e2(), 1e-3, 5, 0),
                  PreconditionError);
}

TEST_CASE("identical seeds give identical reports") {
  const PerturbationReport a = perturb_existence(kIdentity, 1e-2, 20, 99);
  const PerturbationReport b = perturb_existence(kIdentity, 1e-2, 20, 99);
  CHECK(a.max_solution_norm == b.max_solution_norm);
  CHECK(a.failures == b.failures);
}
