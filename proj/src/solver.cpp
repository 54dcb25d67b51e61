#include "tcpkit/solver.hpp"

#include "face_system.hpp"
#include "tcpkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcpkit {

void TcpInstance::validate() const {
  if (cone.dim() != a.dim() || q.size() != a.dim())
    throw std::invalid_argument("instance dimensions disagree: cone " + std::to_string(cone.dim()) + ", q " +
                                std::to_string(q.size()) + ", tensor " + std::to_string(a.dim()));
  if (!q.allFinite()) throw std::invalid_argument("q has non-finite entries");
}

double Residual::max() const { return std::max({primal_dist, dual_dist, comp_gap}); }

Residual residual(const TcpInstance& inst, const VectorXd& x) {
  inst.validate();
  if (x.size() != inst.dim()) throw std::invalid_argument("residual: dimension mismatch");
  const VectorXd w = apply_m1(inst.a, x) + inst.q;
  Residual r;
  r.primal_dist = dist(inst.cone, x);
  r.dual_dist = inst.cone.is_orthant() ? w.cwiseMin(0.0).norm() : dist(dual(inst.cone), w);
  r.comp_gap = std::abs(x.dot(w));
  return r;
}

bool is_solution(const TcpInstance& inst, const VectorXd& x, double tol) {
  return residual(inst, x).max() <= tol;
}

TcpSolution make_solution(const TcpInstance& inst, const VectorXd& x) {
  const Residual r = residual(inst, x);
  TcpSolution s;
  s.x = x;
  s.w = apply_m1(inst.a, x) + inst.q;
  s.primal_dist = r.primal_dist;
  s.dual_dist = r.dual_dist;
  s.comp_gap = r.comp_gap;
  std::vector<int> support;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] > kSupportTolerance) support.push_back(static_cast<int>(i));
  s.alpha = IndexSet(inst.dim(), std::move(support));
  return s;
}

namespace {

void require_orthant(const TcpInstance& inst, const char* what) {
  inst.validate();
  if (!inst.cone.is_orthant())
    throw std::invalid_argument(std::string(what) + " requires the nonnegative orthant");
}

bool lex_less(const VectorXd& a, const VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

void insert_distinct(std::vector<TcpSolution>& sols, TcpSolution s) {
  for (const auto& e : sols)
    if ((e.x - s.x).norm() <= kDedupDistance) return;
  sols.push_back(std::move(s));
}

}  // namespace

EnumerationResult solve_enumerate(const TcpInstance& inst, const SearchBudget& budget) {
  require_orthant(inst, "solve_enumerate");
  budget.validate();
  const int n = inst.dim();
  if (n > kMaxSubsetDim) throw std::invalid_argument("solve_enumerate supports dimension up to 12");
  EnumerationResult out;
  if (inst.q.isZero(0.0)) {
    out.solutions.push_back(make_solution(inst, VectorXd::Zero(n)));
    return out;
  }
  const face::FaceOptions opt = face::options_from(budget);
  for (const IndexSet& alpha : subsets_by_size(n)) {
    ++out.subsets_examined;
    const face::FaceResult fr = face::solve_face(inst.a, inst.q, alpha, opt);
    if (fr.status == face::FaceStatus::inconclusive) out.unknown = true;
    if (fr.continuum) out.continuum = true;
    for (const auto& pt : fr.points) {
      VectorXd x = VectorXd::Zero(n);
      for (int i = 0; i < alpha.size(); ++i) x[alpha[i]] = pt.u[i];
      if (!is_solution(inst, x, kSolutionTolerance)) {
        out.unknown = true;
        continue;
      }
      insert_distinct(out.solutions, make_solution(inst, x));
    }
  }
  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const TcpSolution& a, const TcpSolution& b) { return lex_less(a.x, b.x); });
  return out;
}

RefineResult refine(const TcpInstance& inst, const VectorXd& x0, int iters) {
  require_orthant(inst, "refine");
  if (x0.size() != inst.dim()) throw std::invalid_argument("refine: dimension mismatch");
  const int n = inst.dim();
  auto phi = [&](const VectorXd& x) { return VectorXd(x.cwiseMin(apply_m1(inst.a, x) + inst.q)); };
  auto accept = [&](const VectorXd& x) { return residual(inst, x).max() <= kRefineTolerance; };

  RefineResult out;
  VectorXd x = x0;
  VectorXd f = phi(x);
  double merit = f.squaredNorm();
  if (accept(x)) {
    out.converged = true;
  } else {
    for (int it = 0; it < iters; ++it) {
      out.iterations = it + 1;
      const VectorXd w = apply_m1(inst.a, x) + inst.q;
      const MatrixXd jf = jacobian_m1(inst.a, x);
      MatrixXd jac(n, n);
      for (int i = 0; i < n; ++i) {
        if (x[i] <= w[i])
          jac.row(i) = MatrixXd::Identity(n, n).row(i);
        else
          jac.row(i) = jf.row(i);
      }
      Eigen::FullPivLU<MatrixXd> lu(jac);
      VectorXd d = lu.isInvertible() ? VectorXd(lu.solve(-f)) : VectorXd(-jac.transpose() * f);
      if (!d.allFinite()) break;
      double t = 1.0;
      bool stepped = false;
      for (int ls = 0; ls < 40; ++ls) {
        const VectorXd cand = x + t * d;
        const VectorXd fc = phi(cand);
        const double mc = fc.squaredNorm();
        if (std::isfinite(mc) && mc <= (1.0 - 1e-4 * t) * merit) {
          x = cand;
          f = fc;
          merit = mc;
          stepped = true;
          break;
        }
        t *= 0.5;
      }
      if (!stepped) break;
      if (std::sqrt(merit) <= 1e-14 * std::max(1.0, x.norm())) break;
    }
    // Components driven to tiny negatives by roundoff.
    const VectorXd clamped = x.cwiseMax(0.0);
    if ((clamped - x).norm() <= 1e-12) x = clamped;
    out.converged = accept(x);
  }
  out.solution = make_solution(inst, x);
  out.merit = phi(x).norm();
  return out;
}

SolutionSetReport solution_set_probe(const TcpInstance& inst, double radius, int samples, std::uint64_t seed,
                                     const SearchBudget& budget) {
  require_orthant(inst, "solution_set_probe");
  if (!(radius > 0.0) || samples < 0) throw std::invalid_argument("solution_set_probe: bad radius or sample count");
  SolutionSetReport rep;
  EnumerationResult en = solve_enumerate(inst, budget);
  rep.unknown = en.unknown;
  std::vector<TcpSolution> all = std::move(en.solutions);
  for (int s = 0; s < samples; ++s) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    VectorXd x0(inst.dim());
    for (int i = 0; i < inst.dim(); ++i) x0[i] = rng.uniform(0.0, radius);
    const RefineResult r = refine(inst, x0);
    if (r.converged && is_solution(inst, r.solution.x, kSolutionTolerance)) insert_distinct(all, r.solution);
  }
  std::sort(all.begin(), all.end(), [](const TcpSolution& a, const TcpSolution& b) { return lex_less(a.x, b.x); });
  rep.count = static_cast<int>(all.size());
  for (const auto& s : all) rep.bounded_within = std::max(rep.bounded_within, s.x.norm());
  rep.solutions = std::move(all);
  return rep;
}

}  // namespace tcpkit
