#include "tcpkit/classifiers.hpp"

#include "face_system.hpp"
#include "search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcpkit {

void SearchBudget::validate() const {
  if (grid_resolution < 0 || multistarts < 0 || polish_iters < 0 || refinements < 0)
    throw std::invalid_argument("search budget counts must be nonnegative");
  if (!(margin > 0.0)) throw std::invalid_argument("search budget margin must be positive");
}

SearchBudget SearchBudget::scaled(int factor) const {
  SearchBudget b = *this;
  b.grid_resolution = grid_resolution * factor;
  b.multistarts = multistarts * factor;
  b.polish_iters = polish_iters * factor;
  return b;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::unknown: return "unknown";
  }
  return "unknown";
}

namespace {

search::HomogeneousObjective make_objective(Objective f, const Tensor& a) {
  search::HomogeneousObjective o;
  switch (f) {
    case Objective::form:
      o.degree = a.order();
      o.value = [&a](const VectorXd& y) { return apply_m(a, y); };
      o.gradient = [&a](const VectorXd& y) { return grad_apply_m(a, y); };
      break;
    case Objective::abs_form:
      o.degree = a.order();
      o.value = [&a](const VectorXd& y) { return std::abs(apply_m(a, y)); };
      o.gradient = [&a](const VectorXd& y) {
        const double v = apply_m(a, y);
        return VectorXd((v < 0.0 ? -1.0 : 1.0) * grad_apply_m(a, y));
      };
      break;
    case Objective::residual_norm:
      o.degree = a.order() - 1;
      o.value = [&a](const VectorXd& y) { return apply_m1(a, y).norm(); };
      o.gradient = [&a](const VectorXd& y) {
        const VectorXd r = apply_m1(a, y);
        const double nr = r.norm();
        if (nr == 0.0) return VectorXd(VectorXd::Zero(y.size()));
        return VectorXd(jacobian_m1(a, y).transpose() * r / nr);
      };
      o.residual = [&a](const VectorXd& y) { return apply_m1(a, y); };
      o.residual_jacobian = [&a](const VectorXd& y) { return jacobian_m1(a, y); };
      break;
  }
  return o;
}

double evaluate(Objective f, const Tensor& a, const VectorXd& x) {
  switch (f) {
    case Objective::form: return apply_m(a, x);
    case Objective::abs_form: return std::abs(apply_m(a, x));
    case Objective::residual_norm: return apply_m1(a, x).norm();
  }
  return 0.0;
}

void check_dims(const Tensor& a, const PolyhedralCone& k) {
  if (a.dim() != k.dim()) throw std::invalid_argument("tensor and cone dimensions differ");
}

Verdict make_verdict(std::string property, const BasisMinimum& m, const SearchBudget& budget) {
  Verdict v;
  v.property = std::move(property);
  v.certificate = m.value;
  v.witness = m.argmin;
  v.budget_used = m.evaluations;
  v.budget = budget;
  return v;
}

// Band for properties of the form "minimum is positive".
Verdict positive_minimum(std::string property, Objective f, const Tensor& a, const PolyhedralCone& k,
                         const SearchBudget& budget) {
  budget.validate();
  check_dims(a, k);
  const BasisMinimum m = min_over_basis(f, a, k, budget);
  Verdict v = make_verdict(std::move(property), m, budget);
  // Re-evaluate at the unit witness so the certificate is checkable by one contraction.
  v.certificate = evaluate(f, a, m.argmin);
  const double wtol = budget.margin * 1e-3;
  if (v.certificate > budget.margin)
    v.status = Status::holds;
  else if (v.certificate <= wtol)
    v.status = Status::fails;
  else
    v.status = Status::unknown;
  return v;
}


}  // namespace

BasisMinimum min_over_basis(Objective f, const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget) {
  budget.validate();
  check_dims(a, k);
  const MatrixXd& v = k.generators();
  const int g = static_cast<int>(v.cols());
  const int res = budget.grid_resolution > 0 ? budget.grid_resolution : search::default_resolution(g);
  const auto obj = make_objective(f, a);
  const auto r = search::minimize_on_generators(v, obj, res, budget.multistarts, budget.polish_iters);
  return {r.value, r.argmin, r.evaluations};
}

Verdict is_K_psd(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget) {
  budget.validate();
  check_dims(a, k);
  const BasisMinimum m = min_over_basis(Objective::form, a, k, budget);
  Verdict v = make_verdict(k.is_orthant() ? "copositive" : "K-positive-semidefinite", m, budget);
  v.certificate = apply_m(a, m.argmin);
  const double wtol = budget.margin * 1e-3;
  if (v.certificate >= -wtol)
    v.status = Status::holds;
  else if (v.certificate < -budget.margin)
    v.status = Status::fails;
  else
    v.status = Status::unknown;
  return v;
}

Verdict is_copositive(const Tensor& a, const SearchBudget& budget) {
  return is_K_psd(a, PolyhedralCone::orthant(a.dim()), budget);
}

Verdict is_K_pd(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget) {
  return positive_minimum(k.is_orthant() ? "strictly-copositive" : "K-positive-definite", Objective::form, a, k,
                          budget);
}

Verdict is_strictly_copositive(const Tensor& a, const SearchBudget& budget) {
  return is_K_pd(a, PolyhedralCone::orthant(a.dim()), budget);
}

Verdict is_K_regular(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget) {
  return positive_minimum("K-regular", Objective::abs_form, a, k, budget);
}

Verdict is_K_nonsingular(const Tensor& a, const PolyhedralCone& k, const SearchBudget& budget) {
  return positive_minimum("K-nonsingular", Objective::residual_norm, a, k, budget);
}

PrincipalSweep all_principal_nonsingular(const Tensor& a, const SearchBudget& budget) {
  budget.validate();
  const int n = a.dim();
  if (n > kMaxSubsetDim)
    throw std::invalid_argument("principal sweep supports dimension up to " + std::to_string(kMaxSubsetDim));
  PrincipalSweep out;
  out.verdict.property = "all-principal-nonsingular";
  out.verdict.budget = budget;
  out.verdict.certificate = std::numeric_limits<double>::infinity();
  bool unknown = false;
  for (const IndexSet& alpha : subsets_by_size(n)) {
    if (alpha.empty()) continue;
    const Tensor sub = principal_subtensor(a, alpha);
    Verdict v = is_K_nonsingular(sub, PolyhedralCone::orthant(alpha.size()), budget);
    out.verdict.budget_used += v.budget_used;
    if (v.certificate < out.verdict.certificate) out.verdict.certificate = v.certificate;
    if (v.status == Status::fails && !out.failing_alpha) {
      out.failing_alpha = alpha;
      VectorXd w = VectorXd::Zero(n);
      for (int i = 0; i < alpha.size(); ++i) w[alpha[i]] = (*v.witness)[i];
      out.verdict.witness = w;
    }
    if (v.status == Status::unknown) unknown = true;
    out.table.push_back({alpha, std::move(v)});
  }
  if (out.failing_alpha) {
    out.verdict.status = Status::fails;
    std::string s = "singular principal sub-tensor at alpha = {";
    for (int i = 0; i < out.failing_alpha->size(); ++i) s += (i ? "," : "") + std::to_string((*out.failing_alpha)[i] + 1);
    out.verdict.note = s + "}";
  } else {
    out.verdict.status = unknown ? Status::unknown : Status::holds;
  }
  return out;
}

std::vector<VectorXd> s_cone_samples(const Tensor& a, int count, std::uint64_t seed, const SearchBudget& budget) {
  budget.validate();
  const int n = a.dim();
  if (n > kMaxSubsetDim)
    throw std::invalid_argument("S_A sampling supports dimension up to " + std::to_string(kMaxSubsetDim));
  face::FaceOptions opt = face::options_from(budget);
  opt.seed = seed;
  std::vector<VectorXd> out;
  for (const IndexSet& alpha : subsets_by_size(n)) {
    if (alpha.empty()) continue;
    const auto dirs = face::singular_directions(a, alpha, opt, count);
    for (const VectorXd& s : dirs.directions) {
      VectorXd x = VectorXd::Zero(n);
      for (int i = 0; i < alpha.size(); ++i) x[alpha[i]] = s[i];
      x /= x.norm();
      const VectorXd f = apply_m1(a, x);
      if (f.minCoeff() < -budget.margin || std::abs(x.dot(f)) > budget.margin) continue;
      bool dup = false;
      for (const auto& e : out) dup = dup || (e - x).norm() <= 1e-6;
      if (!dup) out.push_back(x);
    }
  }
  if (static_cast<int>(out.size()) > count) out.resize(static_cast<std::size_t>(std::max(count, 0)));
  return out;
}

Verdict q_in_dual_SA(const Tensor& a, const VectorXd& q, const SearchBudget& budget) {
  if (q.size() != a.dim()) throw std::invalid_argument("q_in_dual_SA: dimension mismatch");
  constexpr int kSamples = 256;
  const auto samples = s_cone_samples(a, kSamples, budget.seed, budget);
  Verdict v;
  v.property = "q-in-dual-S_A";
  v.budget = budget;
  v.budget_used = static_cast<long>(samples.size());
  v.certificate = std::numeric_limits<double>::infinity();
  for (const auto& x : samples) {
    const double t = q.dot(x);
    if (t < v.certificate) {
      v.certificate = t;
      v.witness = x;
    }
  }
  if (v.certificate < -budget.margin) {
    v.status = Status::fails;
  } else {
    v.status = Status::holds;
    v.note = "holds at sampling resolution";
  }
  return v;
}

}  // namespace tcpkit
