#include "tcpkit/complementary.hpp"

#include "face_system.hpp"
#include "search.hpp"
#include "tcpkit/solver.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tcpkit {

Tensor complementary_tensor(const Tensor& a, const IndexSet& alpha) {
  if (alpha.ambient() != a.dim()) throw std::invalid_argument("complementary_tensor: index set dimension mismatch");
  std::vector<Tensor::Entry> es;
  for (int k = 0; k < a.nnz(); ++k) {
    auto idx = a.index(k);
    bool tail_in = true;
    for (std::size_t p = 1; p < idx.size() && tail_in; ++p) tail_in = alpha.contains(idx[p]);
    if (tail_in) es.push_back({std::vector<int>(idx.begin(), idx.end()), -a.value(k)});
  }
  for (int i = 0; i < a.dim(); ++i)
    if (!alpha.contains(i)) es.push_back({std::vector<int>(static_cast<std::size_t>(a.order()), i), 1.0});
  return Tensor(a.order(), a.dim(), std::move(es));
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::member: return "member";
    case Membership::non_member: return "non-member";
    case Membership::unknown: return "unknown";
  }
  return "unknown";
}

namespace {

// Distance from the unit vector yhat to the ray spanned by f.
double ray_gap(const VectorXd& f, const VectorXd& yhat) {
  const double nf = f.norm();
  if (nf == 0.0) return 1.0;
  const double c = f.dot(yhat) / nf;
  return c <= 0.0 ? 1.0 : std::sqrt(std::max(0.0, 1.0 - c * c));
}

}  // namespace

Verdict tpos_contains(const PolyhedralCone& k, const Tensor& a, const VectorXd& y, const SearchBudget& budget) {
  budget.validate();
  if (a.dim() != k.dim() || y.size() != a.dim()) throw std::invalid_argument("tpos_contains: dimension mismatch");
  Verdict v;
  v.property = "tpos-contains";
  v.budget = budget;
  const double ny = y.norm();
  if (ny == 0.0) {
    v.status = Status::holds;
    v.certificate = 0.0;
    v.witness = VectorXd::Zero(a.dim());
    return v;
  }
  const VectorXd yhat = y / ny;
  const int p = a.order() - 1;
  const MatrixXd& gens = k.generators();
  const int g = static_cast<int>(gens.cols());
  const int res = budget.grid_resolution > 0 ? budget.grid_resolution : search::default_resolution(g);
  const auto grid = search::simplex_lattice(g, res);

  std::vector<double> gap(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gap[i] = ray_gap(apply_m1(a, VectorXd(gens * grid[i])), yhat);
  v.budget_used += static_cast<long>(grid.size());
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t z) { return gap[x] < gap[z]; });

  // Least squares in generator weights mu >= 0 on the normalized problem.
  search::LmProblem pr;
  pr.residual = [&](const VectorXd& mu) { return VectorXd(apply_m1(a, VectorXd(gens * mu)) - yhat); };
  pr.jacobian = [&](const VectorXd& mu) { return MatrixXd(jacobian_m1(a, VectorXd(gens * mu)) * gens); };
  pr.project = [](const VectorXd& mu) { return VectorXd(mu.cwiseMax(0.0)); };

  double best_gap = gap[order.front()];
  double best_res = std::numeric_limits<double>::infinity();
  VectorXd best_x;
  const int starts = std::min<int>(std::max(1, budget.multistarts), static_cast<int>(grid.size()));
  for (int s = 0; s < starts; ++s) {
    const VectorXd& lam = grid[order[static_cast<std::size_t>(s)]];
    const VectorXd f = apply_m1(a, VectorXd(gens * lam));
    const double dot = f.dot(yhat);
    VectorXd mu0 = lam;
    if (dot > 0.0) mu0 *= std::pow(dot / f.squaredNorm(), 1.0 / p);
    const auto r = search::levenberg_marquardt(pr, mu0, budget.polish_iters, 1e-3 * budget.margin);
    v.budget_used += r.evaluations;
    const VectorXd x = gens * r.z * std::pow(ny, 1.0 / p);
    const double actual = (apply_m1(a, x) - y).norm();
    if (actual < best_res) {
      best_res = actual;
      best_x = x;
    }
    best_gap = std::min(best_gap, ray_gap(apply_m1(a, VectorXd(gens * r.z)), yhat));
    if (actual <= budget.margin * std::max(1.0, ny)) break;
  }
  if (best_res <= budget.margin * std::max(1.0, ny)) {
    v.status = Status::holds;
    v.certificate = best_res;
    v.witness = best_x;
  } else if (best_gap > budget.margin) {
    v.status = Status::fails;
    v.certificate = best_gap;
    v.note = "separated on the normalized problem at grid resolution";
  } else {
    v.status = Status::unknown;
    v.certificate = best_gap;
    v.witness = best_x;
  }
  return v;
}

MembershipResult q_membership(const Tensor& a, const VectorXd& q, const SearchBudget& budget) {
  budget.validate();
  const int n = a.dim();
  if (q.size() != n) throw std::invalid_argument("q_membership: dimension mismatch");
  if (n > kMaxSubsetDim) throw std::invalid_argument("q_membership supports dimension up to 12");
  const face::FaceOptions opt = face::options_from(budget);
  const double p = a.order() - 1;
  MembershipResult out;
  for (const IndexSet& alpha : subsets_by_size(n)) {
    ++out.subsets_examined;
    const face::FaceResult fr = face::solve_face(a, q, alpha, opt);
    if (fr.status == face::FaceStatus::inconclusive) ++out.inconclusive;
    if (fr.status != face::FaceStatus::feasible) continue;
    const face::FacePoint& pt = fr.points.front();
    const IndexSet rest = alpha.complement();
    VectorXd u = VectorXd::Zero(n);
    for (int i = 0; i < alpha.size(); ++i) u[alpha[i]] = pt.u[i];
    for (int i = 0; i < rest.size(); ++i) u[rest[i]] = std::pow(std::max(pt.slack[i], 0.0), 1.0 / p);
    out.member = Membership::member;
    out.alpha = alpha;
    out.u = u;
    const VectorXd x = solution_from_membership(out, a, q);
    const auto r = residual(TcpInstance{PolyhedralCone::orthant(n), q, a}, x);
    out.residual = std::max({r.primal_dist, r.dual_dist, r.comp_gap});
    return out;
  }
  out.member = out.inconclusive == 0 ? Membership::non_member : Membership::unknown;
  return out;
}

VectorXd solution_from_membership(const MembershipResult& result, const Tensor& a, const VectorXd& q) {
  if (result.member != Membership::member || !result.alpha || !result.u)
    throw std::logic_error("solution_from_membership: result is not a member");
  if (q.size() != a.dim() || result.u->size() != a.dim())
    throw std::invalid_argument("solution_from_membership: dimension mismatch");
  VectorXd x = VectorXd::Zero(a.dim());
  for (int i : result.alpha->members()) x[i] = (*result.u)[i];
  return x;
}

}  // namespace tcpkit
