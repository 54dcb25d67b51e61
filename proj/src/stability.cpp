#include "tcpkit/stability.hpp"

#include "search.hpp"
#include "tcpkit/complementary.hpp"
#include "tcpkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tcpkit {

double Perturbation::size() const { return dq.norm() + frobenius_norm(da); }

Perturbation draw_perturbation(int order, int dim, double eps, std::uint64_t trial_seed, PerturbTarget target) {
  SplitMix64 rng(trial_seed);
  std::size_t total = 1;
  for (int k = 0; k < order; ++k) total *= static_cast<std::size_t>(dim);
  VectorXd dq = rng.normal_vector(dim);
  std::vector<double> da(total);
  for (double& v : da) v = rng.normal();
  const double u = 1.0 - rng.uniform();  // (0, 1]
  if (target == PerturbTarget::q_only) std::fill(da.begin(), da.end(), 0.0);
  if (target == PerturbTarget::tensor_only) dq.setZero();
  double da_norm = 0.0;
  for (double v : da) da_norm += v * v;
  const double s = dq.norm() + std::sqrt(da_norm);
  const double scale = s > 0.0 ? eps * u / s : 0.0;
  dq *= scale;
  for (double& v : da) v *= scale;
  return {dq, Tensor::from_dense(order, dim, da)};
}

namespace {

TcpInstance perturbed(const TcpInstance& inst, const Perturbation& p) {
  return TcpInstance{inst.cone, inst.q + p.dq, inst.a + p.da};
}

void require_orthant(const TcpInstance& inst, const char* probe) {
  inst.validate();
  if (!inst.cone.is_orthant()) throw std::invalid_argument(std::string(probe) + " requires the nonnegative orthant");
}

PerturbationReport start_report(const char* probe, double eps, int trials, std::uint64_t seed) {
  if (trials < 0) throw std::invalid_argument("trial count must be nonnegative");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  PerturbationReport r;
  r.probe = probe;
  r.eps = eps;
  r.trials = trials;
  r.seed = seed;
  return r;
}

double fraction(int count, int trials) { return trials > 0 ? static_cast<double>(count) / trials : 1.0; }

// Orthonormal basis of the column span.
MatrixXd span_basis(const MatrixXd& g) {
  if (g.cols() == 0) return MatrixXd(g.rows(), 0);
  Eigen::JacobiSVD<MatrixXd> svd(g, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > 1e-10 * s[0]) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

Verdict local_uniqueness_certificate(const TcpInstance& inst, const VectorXd& xbar, const SearchBudget& budget) {
  inst.validate();
  budget.validate();
  if (!is_solution(inst, xbar, 1e-6)) throw std::invalid_argument("local_uniqueness_certificate: point is not a solution");
  const int n = inst.dim();
  Verdict v;
  v.property = "local-uniqueness";
  v.budget = budget;
  if (!is_subsymmetric(inst.a)) v.note = "tensor is not sub-symmetric; the sufficient condition assumes it is";

  const VectorXd w = apply_m1(inst.a, xbar) + inst.q;
  const PolyhedralCone t = tangent_cone(inst.cone, project(inst.cone, xbar));
  MatrixXd h = t.inequalities();
  if (w.norm() > kActiveTolerance) {
    h.conservativeResize(n, h.cols() + 2);
    h.col(h.cols() - 2) = w / w.norm();
    h.col(h.cols() - 1) = -w / w.norm();
  }
  const MatrixXd m = apply_m2(inst.a, xbar);
  const MatrixXd ms = 0.5 * (m + m.transpose());
  const MatrixXd gens = dual_generators(n, h);
  const double wtol = budget.margin * 1e-3;

  if (gens.cols() == 0) {
    v.status = Status::holds;
    v.certificate = std::numeric_limits<double>::infinity();
    v.note += v.note.empty() ? "" : "; ";
    v.note += "tangent cone meets the complementarity hyperplane only at 0";
    return v;
  }
  bool subspace = true;
  for (Eigen::Index j = 0; j < gens.cols() && subspace; ++j)
    subspace = h.cols() == 0 || (h.transpose() * gens.col(j)).maxCoeff() <= 1e-10;
  VectorXd vmin;
  if (subspace) {
    const MatrixXd basis = span_basis(gens);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(basis.transpose() * ms * basis);
    vmin = basis * es.eigenvectors().col(0);
    v.budget_used = 1;
  } else {
    search::HomogeneousObjective obj;
    obj.degree = 2;
    obj.value = [&ms](const VectorXd& y) { return y.dot(ms * y); };
    obj.gradient = [&ms](const VectorXd& y) { return VectorXd(2.0 * ms * y); };
    const int g = static_cast<int>(gens.cols());
    const int res = budget.grid_resolution > 0 ? budget.grid_resolution : search::default_resolution(g);
    const auto r = search::minimize_on_generators(gens, obj, res, budget.multistarts, budget.polish_iters);
    vmin = r.argmin;
    v.budget_used = r.evaluations;
  }
  vmin.normalize();
  v.witness = vmin;
  v.certificate = vmin.dot(m * vmin);
  if (v.certificate > budget.margin)
    v.status = Status::holds;
  else if (v.certificate <= wtol)
    v.status = Status::fails;
  else
    v.status = Status::unknown;
  return v;
}

PerturbationReport perturb_existence(const TcpInstance& inst, double eps, int trials, std::uint64_t seed,
                                     const SearchBudget& budget) {
  require_orthant(inst, "perturb_existence");
  PerturbationReport rep = start_report("existence", eps, trials, seed);
  const Verdict cop = is_copositive(inst.a, budget);
  if (cop.status != Status::holds) throw PreconditionError("base tensor is not certified copositive");
  const Verdict dual = q_in_dual_SA(inst.a, inst.q, budget);
  if (dual.status != Status::holds || !(dual.certificate > budget.margin))
    throw PreconditionError("q is not in the interior of the dual of S_A at sampling resolution");

  constexpr int kMaxRedraws = 100;
  int solved = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(t));
    Perturbation p;
    Tensor a;
    bool accepted = false;
    for (int r = 0; r <= kMaxRedraws && !accepted; ++r) {
      p = draw_perturbation(inst.a.order(), inst.dim(), eps, derive_seed(ts, static_cast<std::uint64_t>(r)));
      a = inst.a + p.da;
      accepted = p.size() == 0.0 || is_copositive(a, budget).status == Status::holds;
      if (!accepted) ++rep.resamples;
    }
    if (!accepted) {
      ++rep.shifts;
      a = a + eps * unit_tensor(inst.a.order(), inst.dim());
    }
    const VectorXd q = inst.q + p.dq;
    const MembershipResult mr = q_membership(a, q, budget);
    if (mr.member == Membership::member) {
      ++solved;
      rep.max_solution_norm = std::max(rep.max_solution_norm, solution_from_membership(mr, a, q).norm());
    } else {
      if (mr.member == Membership::unknown) ++rep.unknown;
      rep.failures.push_back(ts);
    }
  }
  rep.solvable_fraction = fraction(solved, trials);
  return rep;
}

PerturbationReport error_bound_probe(const TcpInstance& inst, const VectorXd& xbar, double radius, double eps,
                                     int trials, std::uint64_t seed, const SearchBudget& budget) {
  require_orthant(inst, "error_bound_probe");
  if (!(radius > 0.0)) throw std::invalid_argument("neighbourhood radius must be positive");
  PerturbationReport rep = start_report("error-bound", eps, trials, seed);
  const Verdict lu = local_uniqueness_certificate(inst, xbar, budget);
  if (lu.status != Status::holds) throw PreconditionError("local uniqueness is not certified at the base point");

  int found = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(t));
    const Perturbation p = draw_perturbation(inst.a.order(), inst.dim(), eps, ts);
    const double size = p.size();
    if (size < 1e-12) {
      ++rep.skipped;
      continue;
    }
    const TcpInstance pi = perturbed(inst, p);
    std::vector<VectorXd> starts{xbar};
    SplitMix64 rng(derive_seed(ts, 0x5eedULL));
    for (int s = 0; s < budget.multistarts; ++s)
      starts.push_back((xbar + radius * rng.uniform() * rng.unit_vector(inst.dim())).cwiseMax(0.0));
    double worst = -1.0;
    for (const auto& x0 : starts) {
      const RefineResult r = refine(pi, x0);
      if (!r.converged) continue;
      const double d = (r.solution.x - xbar).norm();
      if (d <= radius) {
        worst = std::max(worst, d);
        rep.max_solution_norm = std::max(rep.max_solution_norm, r.solution.x.norm());
      }
    }
    if (worst < 0.0) {
      rep.failures.push_back(ts);
      continue;
    }
    ++found;
    rep.error_ratio_max = std::max(rep.error_ratio_max, worst / size);
  }
  rep.solvable_fraction = fraction(found, trials);
  return rep;
}

PerturbationReport usc_probe(const TcpInstance& inst, double eps, int trials, std::uint64_t seed,
                             const SearchBudget& budget) {
  require_orthant(inst, "usc_probe");
  PerturbationReport rep = start_report("usc", eps, trials, seed);
  if (is_K_regular(inst.a, inst.cone, budget).status != Status::holds)
    throw PreconditionError("base tensor is not certified K-regular");
  const EnumerationResult base = solve_enumerate(inst, budget);
  if (base.solutions.empty()) throw PreconditionError("base instance has no solution to compare against");

  int solved = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(t));
    const TcpInstance pi = perturbed(inst, draw_perturbation(inst.a.order(), inst.dim(), eps, ts));
    const EnumerationResult en = solve_enumerate(pi, budget);
    if (en.unknown) ++rep.unknown;
    if (en.solutions.empty()) {
      rep.failures.push_back(ts);
      continue;
    }
    ++solved;
    for (const auto& s : en.solutions) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& b : base.solutions) d = std::min(d, (s.x - b.x).norm());
      rep.max_excursion = std::max(rep.max_excursion, d);
      rep.max_solution_norm = std::max(rep.max_solution_norm, s.x.norm());
    }
  }
  rep.solvable_fraction = fraction(solved, trials);
  return rep;
}

ClosednessResult graph_closedness_probe(const std::vector<SequenceMember>& sequence, const SequenceMember& limit) {
  std::vector<double> res;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const double r = residual(sequence[i].instance, sequence[i].x).max();
    if (!(r <= kSolutionTolerance))
      throw std::invalid_argument("sequence member " + std::to_string(i + 1) + " is not a solution");
    res.push_back(r);
  }
  const std::size_t tail = std::max<std::size_t>(1, res.size() / 4);
  double tail_max = 0.0;
  for (std::size_t i = res.size() >= tail ? res.size() - tail : 0; i < res.size(); ++i)
    tail_max = std::max(tail_max, res[i]);
  ClosednessResult out;
  out.tolerance = std::max(kSolutionTolerance, 10.0 * tail_max);
  out.limit_residual = residual(limit.instance, limit.x).max();
  out.closed = out.limit_residual <= out.tolerance;
  return out;
}

PerturbationReport unsolvable_neighborhood_probe(const Tensor& a, const VectorXd& q, double eps, int trials,
                                                 std::uint64_t seed, const SearchBudget& budget) {
  PerturbationReport rep = start_report("unsolvable", eps, trials, seed);
  if (q.size() != a.dim()) throw std::invalid_argument("unsolvable_neighborhood_probe: dimension mismatch");
  const MembershipResult base = q_membership(a, q, budget);
  if (base.member != Membership::non_member)
    throw PreconditionError(std::string("q is not a certified non-member (membership: ") + to_string(base.member) + ")");
  if (all_principal_nonsingular(a, budget).verdict.status != Status::holds)
    throw PreconditionError("principal sub-tensors are not all certified nonsingular");

  int unsolvable = 0, solvable = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(t));
    const Perturbation p = draw_perturbation(a.order(), a.dim(), eps, ts, PerturbTarget::q_only);
    const MembershipResult mr = q_membership(a, q + p.dq, budget);
    if (mr.member == Membership::non_member) {
      ++unsolvable;
    } else {
      if (mr.member == Membership::member) ++solvable;
      if (mr.member == Membership::unknown) ++rep.unknown;
      rep.failures.push_back(ts);
    }
  }
  rep.solvable_fraction = fraction(solvable, trials);
  rep.fraction = fraction(unsolvable, trials);
  return rep;
}

PerturbationReport nonsingularity_openness_probe(const PolyhedralCone& k, const Tensor& a, double eps, int trials,
                                                 std::uint64_t seed, const SearchBudget& budget) {
  PerturbationReport rep = start_report("openness", eps, trials, seed);
  if (is_K_nonsingular(a, k, budget).status != Status::holds)
    throw PreconditionError("base tensor is not certified K-nonsingular");
  int kept = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(t));
    const Perturbation p = draw_perturbation(a.order(), a.dim(), eps, ts, PerturbTarget::tensor_only);
    PolyhedralCone kt = k;
    if (!k.is_orthant() && eps > 0.0) {
      SplitMix64 rng(derive_seed(ts, 0xc0eULL));
      MatrixXd g = k.generators();
      for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j) += eps * rng.uniform() * rng.unit_vector(k.dim());
      try {
        kt = PolyhedralCone::from_generators(g);
      } catch (const std::invalid_argument&) {
        rep.failures.push_back(ts);
        continue;
      }
    }
    if (is_K_nonsingular(a + p.da, kt, budget).status == Status::holds)
      ++kept;
    else
      rep.failures.push_back(ts);
  }
  rep.solvable_fraction = fraction(kept, trials);
  rep.fraction = rep.solvable_fraction;
  return rep;
}

}  // namespace tcpkit
