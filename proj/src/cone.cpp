#include "tcpkit/cone.hpp"

#include "tcpkit/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcpkit {
namespace {

constexpr double kRankTol = 1e-10;
constexpr double kSignTol = 1e-10;

MatrixXd normalize_columns(const MatrixXd& g) {
  MatrixXd out = g;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm == 0.0) throw std::invalid_argument("cone generator or normal is zero");
    // Leave unit columns untouched so that re-reading emitted cones is exact.
    if (std::abs(norm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) out.col(j) /= norm;
  }
  return out;
}

MatrixXd dedupe_columns(const MatrixXd& g) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    bool seen = false;
    for (Eigen::Index k : keep)
      if ((g.col(j) - g.col(k)).norm() <= 1e-9) seen = true;
    if (!seen) keep.push_back(j);
  }
  MatrixXd out(g.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = g.col(keep[c]);
  return out;
}

int column_rank(const MatrixXd& g) {
  if (g.cols() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(g);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > kRankTol * s[0]) ++r;
  return r;
}

bool is_standard_basis(const MatrixXd& g) {
  if (g.cols() != g.rows()) return false;
  std::vector<bool> hit(static_cast<std::size_t>(g.rows()), false);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    Eigen::Index at = -1;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      if (g(i, j) == 0.0) continue;
      if (at >= 0 || g(i, j) <= 0.0) return false;
      at = i;
    }
    if (at < 0 || hit[static_cast<std::size_t>(at)]) return false;
    hit[static_cast<std::size_t>(at)] = true;
  }
  return true;
}

// Visits all size-r subsets of {0..k-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int k, int r, Fn&& fn) {
  std::vector<int> pick(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) pick[static_cast<std::size_t>(i)] = i;
  if (r > k) return;
  while (true) {
    fn(pick);
    int j = r - 1;
    while (j >= 0 && pick[static_cast<std::size_t>(j)] == k - r + j) --j;
    if (j < 0) return;
    ++pick[static_cast<std::size_t>(j)];
    for (int l = j + 1; l < r; ++l) pick[static_cast<std::size_t>(l)] = pick[static_cast<std::size_t>(l - 1)] + 1;
  }
}

}  // namespace

MatrixXd dual_generators(int n, const MatrixXd& g) {
  if (g.cols() > 0 && g.rows() != n) throw std::invalid_argument("dual_generators: dimension mismatch");
  std::vector<VectorXd> rays;
  auto push_unique = [&rays](VectorXd v) {
    v.normalize();
    for (const auto& r : rays)
      if ((r - v).norm() <= 1e-9) return;
    rays.push_back(std::move(v));
  };

  if (g.cols() == 0) {
    for (int i = 0; i < n; ++i) {
      push_unique(VectorXd::Unit(n, i));
      push_unique(-VectorXd::Unit(n, i));
    }
  } else {
    const MatrixXd gn = normalize_columns(g);
    Eigen::JacobiSVD<MatrixXd> svd(gn, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    int d = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > kRankTol * s[0]) ++d;
    const MatrixXd range = svd.matrixU().leftCols(d);
    const MatrixXd null = svd.matrixU().rightCols(n - d);
    for (Eigen::Index j = 0; j < null.cols(); ++j) {
      push_unique(null.col(j));
      push_unique(-null.col(j));
    }
    // Pointed part lives in range(G): rows of P are the constraints in
    // range coordinates. Extreme rays have d-1 independent tight rows.
    const MatrixXd p = gn.transpose() * range;
    const int k = static_cast<int>(p.rows());
    auto try_direction = [&](const VectorXd& z) {
      const VectorXd vals = p * z;
      if (vals.minCoeff() >= -kSignTol)
        push_unique(range * z);
      else if (vals.maxCoeff() <= kSignTol)
        push_unique(-(range * z));
    };
    if (d == 1) {
      try_direction(VectorXd::Ones(1));
    } else {
      for_each_subset(k, d - 1, [&](const std::vector<int>& pick) {
        MatrixXd sub(d - 1, d);
        for (int r = 0; r < d - 1; ++r) sub.row(r) = p.row(pick[static_cast<std::size_t>(r)]);
        Eigen::JacobiSVD<MatrixXd> ssvd(sub, Eigen::ComputeFullV);
        const auto& ss = ssvd.singularValues();
        if (ss.size() < d - 1 || ss[d - 2] <= 1e-9 * std::max(1.0, ss[0])) return;
        try_direction(ssvd.matrixV().col(d - 1));
      });
    }
  }

  MatrixXd out(n, static_cast<Eigen::Index>(rays.size()));
  for (std::size_t j = 0; j < rays.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = rays[j];
  return out;
}

PolyhedralCone PolyhedralCone::orthant(int n) {
  if (n < 1) throw std::invalid_argument("orthant: dimension must be positive");
  PolyhedralCone k;
  k.dim_ = n;
  k.kind_ = ConeKind::orthant;
  k.pointed_ = true;
  k.generators_ = MatrixXd::Identity(n, n);
  k.inequalities_ = MatrixXd::Identity(n, n);
  return k;
}

PolyhedralCone PolyhedralCone::from_generators(const MatrixXd& generators) {
  const int n = static_cast<int>(generators.rows());
  if (n < 1 || generators.cols() < 1) throw std::invalid_argument("from_generators: need at least one generator");
  for (Eigen::Index j = 0; j < generators.cols(); ++j)
    if (!generators.col(j).allFinite()) throw std::invalid_argument("from_generators: non-finite generator");
  MatrixXd g = dedupe_columns(normalize_columns(generators));
  if (is_standard_basis(g)) return orthant(n);
  if (n > kMaxGeneralConeDim)
    throw std::invalid_argument("from_generators: general cones are limited to dimension " +
                                std::to_string(kMaxGeneralConeDim));

  MatrixXd h = dual_generators(n, g);
  if (column_rank(h) < n) throw std::invalid_argument("from_generators: cone is not pointed");

  // Keep only extreme generators: the normals tight at an extreme ray span
  // a hyperplane.
  std::vector<Eigen::Index> extreme;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    std::vector<Eigen::Index> tight;
    for (Eigen::Index c = 0; c < h.cols(); ++c)
      if (std::abs(h.col(c).dot(g.col(j))) <= 1e-9) tight.push_back(c);
    MatrixXd t(n, static_cast<Eigen::Index>(tight.size()));
    for (std::size_t c = 0; c < tight.size(); ++c) t.col(static_cast<Eigen::Index>(c)) = h.col(tight[c]);
    if (column_rank(t) == n - 1) extreme.push_back(j);
  }
  MatrixXd ext(n, static_cast<Eigen::Index>(extreme.size()));
  for (std::size_t c = 0; c < extreme.size(); ++c) ext.col(static_cast<Eigen::Index>(c)) = g.col(extreme[c]);

  PolyhedralCone k;
  k.dim_ = n;
  k.kind_ = ConeKind::general;
  k.pointed_ = true;
  // Derive the normals from the extreme rays alone, as a re-read cone would.
  if (ext.cols() != g.cols()) h = dual_generators(n, ext);
  k.generators_ = std::move(ext);
  k.inequalities_ = std::move(h);
  return k;
}

PolyhedralCone PolyhedralCone::from_inequalities(int n, const MatrixXd& inequalities) {
  if (n < 1) throw std::invalid_argument("from_inequalities: dimension must be positive");
  if (inequalities.cols() > 0 && inequalities.rows() != n)
    throw std::invalid_argument("from_inequalities: dimension mismatch");
  if (n > kMaxGeneralConeDim)
    throw std::invalid_argument("from_inequalities: general cones are limited to dimension " +
                                std::to_string(kMaxGeneralConeDim));
  PolyhedralCone k;
  k.dim_ = n;
  k.kind_ = ConeKind::general;
  k.inequalities_ = inequalities.cols() > 0 ? dedupe_columns(normalize_columns(inequalities)) : MatrixXd(n, 0);
  k.generators_ = dual_generators(n, k.inequalities_);
  k.pointed_ = column_rank(k.inequalities_) == n;
  return k;
}

bool PolyhedralCone::operator==(const PolyhedralCone& o) const {
  return dim_ == o.dim_ && kind_ == o.kind_ && pointed_ == o.pointed_ && generators_ == o.generators_ &&
         inequalities_ == o.inequalities_;
}

PolyhedralCone dual(const PolyhedralCone& k) {
  PolyhedralCone d;
  d.dim_ = k.dim_;
  d.kind_ = k.kind_;
  d.generators_ = k.inequalities_;
  d.inequalities_ = k.generators_;
  d.pointed_ = column_rank(d.inequalities_) == d.dim_;
  return d;
}

bool contains(const PolyhedralCone& k, const VectorXd& x, double tol) {
  if (x.size() != k.dim()) throw std::invalid_argument("contains: dimension mismatch");
  if (k.inequalities().cols() == 0) return true;
  return (k.inequalities().transpose() * x).minCoeff() >= -tol;
}

VectorXd nnls(const MatrixXd& a, const VectorXd& b) {
  const Eigen::Index k = a.cols();
  VectorXd x = VectorXd::Zero(k);
  if (k == 0) return x;
  std::vector<bool> passive(static_cast<std::size_t>(k), false);
  const double tol = 1e-12 * std::max(1.0, a.norm() * b.norm());

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < k; ++j)
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    MatrixXd ap(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
    const VectorXd sp = ap.completeOrthogonalDecomposition().solve(b);
    VectorXd s = VectorXd::Zero(k);
    for (std::size_t c = 0; c < cols.size(); ++c) s[cols[c]] = sp[static_cast<Eigen::Index>(c)];
    return s;
  };

  for (int outer = 0; outer < 3 * k + 10; ++outer) {
    const VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < k; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner < 3 * k + 10; ++inner) {
      VectorXd s = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < k; ++j)
        if (passive[static_cast<std::size_t>(j)] && s[j] <= 0.0) feasible = false;
      if (feasible) {
        x = s;
        break;
      }
      double step = 1.0;
      for (Eigen::Index j = 0; j < k; ++j)
        if (passive[static_cast<std::size_t>(j)] && s[j] <= 0.0) step = std::min(step, x[j] / (x[j] - s[j]));
      x += step * (s - x);
      for (Eigen::Index j = 0; j < k; ++j)
        if (passive[static_cast<std::size_t>(j)] && x[j] <= 1e-15) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
    }
  }
  return x;
}

VectorXd project(const PolyhedralCone& k, const VectorXd& z) {
  if (z.size() != k.dim()) throw std::invalid_argument("project: dimension mismatch");
  if (k.is_orthant()) return z.cwiseMax(0.0);
  if (contains(k, z, 0.0)) return z;
  return k.generators() * nnls(k.generators(), z);
}

double dist(const PolyhedralCone& k, const VectorXd& z) {
  if (z.size() != k.dim()) throw std::invalid_argument("dist: dimension mismatch");
  if (k.is_orthant()) return z.cwiseMin(0.0).norm();
  if (contains(k, z, 0.0)) return 0.0;
  return (z - project(k, z)).norm();
}

std::vector<VectorXd> basis_samples(const PolyhedralCone& k, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("basis_samples: count must be positive");
  const MatrixXd& g = k.generators();
  std::vector<VectorXd> out;
  out.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(count, g.cols())));
  for (Eigen::Index j = 0; j < g.cols(); ++j) out.push_back(g.col(j).normalized());
  if (g.cols() == 0) return out;
  SplitMix64 rng(seed);
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < 100 * count) {
    ++attempts;
    const VectorXd x = g * rng.dirichlet(g.cols());
    const double norm = x.norm();
    if (norm < 1e-12) continue;
    out.push_back(x / norm);
  }
  return out;
}

DeltaEstimate delta_metric(const PolyhedralCone& k1, const PolyhedralCone& k2, int samples, std::uint64_t seed) {
  if (k1.dim() != k2.dim()) throw std::invalid_argument("delta_metric: dimension mismatch");
  if (samples < 1) throw std::invalid_argument("delta_metric: samples must be positive");
  if (k1 == k2) return {0.0, samples};
  double best = 0.0;
  // Projection onto a cone is nonexpansive and fixes 0, so for z in the unit
  // ball dist(z, K cap B) = dist(z, K); the sup is attained on the sphere.
  for (const auto& z : basis_samples(k1, samples, seed)) best = std::max(best, dist(k2, z));
  for (const auto& z : basis_samples(k2, samples, seed)) best = std::max(best, dist(k1, z));
  return {best, samples};
}

PolyhedralCone tangent_cone(const PolyhedralCone& k, const VectorXd& x, double tol) {
  if (x.size() != k.dim()) throw std::invalid_argument("tangent_cone: dimension mismatch");
  if (!contains(k, x, tol)) throw std::invalid_argument("tangent_cone: point is not in the cone");
  const MatrixXd& h = k.inequalities();
  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < h.cols(); ++c)
    if (std::abs(h.col(c).dot(x)) <= tol) active.push_back(c);
  if (k.is_orthant()) {
    if (static_cast<Eigen::Index>(active.size()) == h.cols()) return k;
    // Active coordinates stay rays, the others become lines.
    const int n = k.dim();
    PolyhedralCone t;
    t.dim_ = n;
    t.kind_ = ConeKind::general;
    t.pointed_ = false;
    t.inequalities_ = MatrixXd(n, static_cast<Eigen::Index>(active.size()));
    std::vector<VectorXd> gens;
    for (int i = 0; i < n; ++i) {
      const bool is_active = std::find(active.begin(), active.end(), i) != active.end();
      gens.push_back(VectorXd::Unit(n, i));
      if (!is_active) gens.push_back(-VectorXd::Unit(n, i));
    }
    for (std::size_t c = 0; c < active.size(); ++c)
      t.inequalities_.col(static_cast<Eigen::Index>(c)) = VectorXd::Unit(n, active[c]);
    t.generators_ = MatrixXd(n, static_cast<Eigen::Index>(gens.size()));
    for (std::size_t c = 0; c < gens.size(); ++c) t.generators_.col(static_cast<Eigen::Index>(c)) = gens[c];
    return t;
  }
  MatrixXd act(k.dim(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c) act.col(static_cast<Eigen::Index>(c)) = h.col(active[c]);
  return PolyhedralCone::from_inequalities(k.dim(), act);
}

}  // namespace tcpkit
