#include "face_system.hpp"

#include "poly.hpp"
#include "search.hpp"
#include "tcpkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace tcpkit::face {

namespace {

using poly::Poly;

struct Face {
  const Tensor& a;
  IndexSet alpha;
  IndexSet rest;
  Tensor sub;
  int k;
  int p;

  Face(const Tensor& t, const IndexSet& al)
      : a(t), alpha(al), rest(al.complement()), sub(principal_subtensor(t, al)), k(al.size()), p(t.order() - 1) {}

  VectorXd g(const VectorXd& u) const { return apply_m1(sub, u); }
  VectorXd h(const VectorXd& u) const { return rest.empty() ? VectorXd() : apply_off(a, alpha, u); }
};

VectorXd restrict(const VectorXd& q, const IndexSet& s) {
  VectorXd out(s.size());
  for (int i = 0; i < s.size(); ++i) out[i] = q[s[i]];
  return out;
}

// Polynomials in theta for the segment s = (1 - theta, theta) of a 2-element face.
struct ThetaPolys {
  std::vector<Poly> g;
  std::vector<Poly> h;
};

ThetaPolys theta_polys(const Face& f) {
  const int p = f.p;
  // basis[c] = (1 - theta)^c theta^(p - c)
  std::vector<Poly> basis(static_cast<std::size_t>(p + 1));
  for (int c = 0; c <= p; ++c) {
    Poly b{1.0};
    for (int r = 0; r < c; ++r) b = poly::multiply(b, {1.0, -1.0});
    for (int r = c; r < p; ++r) b = poly::multiply(b, {0.0, 1.0});
    basis[static_cast<std::size_t>(c)] = b;
  }
  ThetaPolys out;
  out.g.assign(2, Poly(static_cast<std::size_t>(p + 1), 0.0));
  out.h.assign(static_cast<std::size_t>(f.rest.size()), Poly(static_cast<std::size_t>(p + 1), 0.0));
  std::vector<int> rest_pos(static_cast<std::size_t>(f.a.dim()), -1);
  for (int r = 0; r < f.rest.size(); ++r) rest_pos[static_cast<std::size_t>(f.rest[r])] = r;
  for (int e = 0; e < f.a.nnz(); ++e) {
    auto idx = f.a.index(e);
    int c = 0;
    bool inside = true;
    for (std::size_t r = 1; r < idx.size(); ++r) {
      if (idx[r] == f.alpha[0])
        ++c;
      else if (idx[r] != f.alpha[1])
        inside = false;
    }
    if (!inside) continue;
    Poly* target = nullptr;
    if (idx[0] == f.alpha[0])
      target = &out.g[0];
    else if (idx[0] == f.alpha[1])
      target = &out.g[1];
    else
      target = &out.h[static_cast<std::size_t>(rest_pos[static_cast<std::size_t>(idx[0])])];
    *target = poly::add(*target, poly::scale(basis[static_cast<std::size_t>(c)], f.a.value(e)));
  }
  return out;
}

VectorXd segment_point(double theta) {
  VectorXd s(2);
  s << 1.0 - theta, theta;
  return s;
}

// Breakpoints plus midpoints and endpoints, sorted.
std::vector<double> sweep_points(const std::vector<Poly>& polys) {
  std::vector<double> br{0.0, 1.0};
  for (const Poly& q : polys) {
    auto r = poly::real_roots(q, 0.0, 1.0);
    br.insert(br.end(), r.begin(), r.end());
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12; }), br.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < br.size(); ++i) {
    out.push_back(br[i]);
    if (i + 1 < br.size()) out.push_back(0.5 * (br[i] + br[i + 1]));
  }
  return out;
}

// Sign analysis: a row whose coefficients all share a sign cannot reach a
// right-hand side of the opposite sign on the orthant.
std::optional<std::string> sign_infeasible(const Face& f, const VectorXd& qa) {
  std::vector<double> lo(static_cast<std::size_t>(f.k), 0.0), hi(static_cast<std::size_t>(f.k), 0.0);
  for (int e = 0; e < f.sub.nnz(); ++e) {
    const auto row = static_cast<std::size_t>(f.sub.index(e)[0]);
    lo[row] = std::min(lo[row], f.sub.value(e));
    hi[row] = std::max(hi[row], f.sub.value(e));
  }
  for (int i = 0; i < f.k; ++i) {
    const auto r = static_cast<std::size_t>(i);
    if (lo[r] >= 0.0 && qa[i] > 0.0)
      return "row " + std::to_string(f.alpha[i] + 1) + " is nonnegative on the orthant but must equal a negative value";
    if (hi[r] <= 0.0 && qa[i] < 0.0)
      return "row " + std::to_string(f.alpha[i] + 1) + " is nonpositive on the orthant but must equal a positive value";
  }
  return std::nullopt;
}

struct Solver {
  const Face& f;
  const VectorXd& qa;
  const VectorXd& qb;
  const FaceOptions& opt;
  long evaluations = 0;

  double system_tol() const { return opt.system_tol * std::max(1.0, qa.norm()); }

  search::LmResult polish(const VectorXd& u0) {
    search::LmProblem pr;
    pr.residual = [&](const VectorXd& u) { return VectorXd(f.g(u) + qa); };
    pr.jacobian = [&](const VectorXd& u) { return MatrixXd(jacobian_m1(f.sub, u)); };
    pr.project = [](const VectorXd& u) { return VectorXd(u.cwiseMax(0.0)); };
    auto r = search::levenberg_marquardt(pr, u0, opt.polish_iters, 1e-3 * system_tol());
    evaluations += r.evaluations;
    return r;
  }

  std::optional<FacePoint> finish(VectorXd u) {
    ++evaluations;
    double res = (f.g(u) + qa).norm();
    if (!(res <= 1e-3 * system_tol())) {
      auto r = polish(u);
      if (r.residual_norm < res) {
        u = r.z;
        res = r.residual_norm;
      }
    }
    if (!(res <= system_tol())) return std::nullopt;
    FacePoint pt;
    pt.slack = f.h(u) + qb;
    if (pt.slack.size() > 0 && pt.slack.minCoeff() < -opt.slack_tol) return std::nullopt;
    pt.u = std::move(u);
    pt.residual = res;
    return pt;
  }

  // Direction s >= 0 whose image is a positive multiple of -q_alpha.
  std::optional<FacePoint> try_direction(const VectorXd& s) {
    ++evaluations;
    const VectorXd g = f.g(s);
    const double dot = -g.dot(qa);
    if (!(dot > 1e-14 * g.norm() * qa.norm())) return std::nullopt;
    const double tp = dot / g.squaredNorm();
    return finish(std::pow(tp, 1.0 / f.p) * s);
  }

  // Singular direction s: admissible scalings t = tau^p form [lo, hi].
  struct Interval {
    double lo = 0.0;
    double hi = 0.0;
  };
  std::optional<Interval> scaling_interval(const VectorXd& hs) const {
    Interval iv{0.0, std::numeric_limits<double>::infinity()};
    for (Eigen::Index j = 0; j < qb.size(); ++j) {
      const double hj = hs[j], qj = qb[j];
      if (hj > 0.0) {
        if (qj < 0.0) iv.lo = std::max(iv.lo, -qj / hj);
      } else if (hj < 0.0) {
        if (qj < -opt.slack_tol) return std::nullopt;
        iv.hi = std::min(iv.hi, std::max(qj, 0.0) / -hj);
      } else if (qj < -opt.slack_tol) {
        return std::nullopt;
      }
    }
    if (iv.lo > iv.hi * (1.0 + 1e-12)) return std::nullopt;
    return iv;
  }

  // Nonzero point on a singular ray, smallest admissible norm. Rays whose
  // admissible scalings reach 0 are represented by u = 0 instead.
  std::optional<FacePoint> try_singular(const VectorXd& s, bool& continuum) {
    ++evaluations;
    const VectorXd g = f.g(s);
    if (!(g.norm() <= opt.system_tol)) return std::nullopt;
    const auto iv = scaling_interval(f.h(s));
    if (!iv) return std::nullopt;
    if (iv->hi > iv->lo) continuum = true;
    if (iv->lo <= 0.0) return std::nullopt;
    const VectorXd u = std::pow(iv->lo, 1.0 / f.p) * s;
    FacePoint pt;
    pt.u = u;
    pt.slack = f.h(u) + qb;
    pt.residual = (f.g(u) + qa).norm();
    if (pt.slack.size() > 0 && pt.slack.minCoeff() < -opt.slack_tol) return std::nullopt;
    return pt;
  }
};

void add_distinct(std::vector<FacePoint>& pts, FacePoint pt) {
  for (const auto& e : pts)
    if ((e.u - pt.u).norm() <= 1e-6) return;
  pts.push_back(std::move(pt));
}

int resolution_for(const FaceOptions& opt, int k) {
  return opt.grid_resolution > 0 ? opt.grid_resolution : search::default_resolution(k);
}

// Unit direction d = -q_alpha / |q_alpha|; psi(s) = dist(G(s), ray d) is
// continuous and vanishes exactly where G(s) lies on the ray (or is zero).
double ray_distance(const VectorXd& g, const VectorXd& d) {
  const double t = std::max(0.0, g.dot(d));
  return (g - t * d).norm();
}

void solve_numeric(Solver& sv, const FaceOptions& opt, FaceResult& out) {
  const Face& f = sv.f;
  const VectorXd d = -sv.qa / sv.qa.norm();
  SplitMix64 rng(derive_seed(opt.seed, f.alpha.mask()));
  int res = resolution_for(opt, f.k);
  for (int level = 0;; ++level) {
    const auto grid = search::simplex_lattice(f.k, res);
    std::vector<double> psi(grid.size()), rank(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const VectorXd g = f.g(grid[i]);
      psi[i] = ray_distance(g, d);
      const double ng = g.norm();
      rank[i] = ng > 0.0 ? (g / ng - d).norm() : 2.0;
    }
    sv.evaluations += static_cast<long>(grid.size());

    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; });

    std::vector<VectorXd> starts;
    for (int s = 0; s < opt.multistarts && s < static_cast<int>(order.size()); ++s)
      starts.push_back(grid[order[static_cast<std::size_t>(s)]]);
    if (level == 0)
      for (int s = 0; s < opt.multistarts; ++s) starts.push_back(rng.dirichlet(f.k));

    for (const auto& s : starts) {
      if (auto pt = sv.try_direction(s)) {
        add_distinct(out.points, std::move(*pt));
      }
    }
    if (!out.points.empty()) {
      out.status = FaceStatus::feasible;
      return;
    }
    const double lo = *std::min_element(psi.begin(), psi.end());
    const double gap = search::max_neighbour_gap(grid, res, psi);
    if (lo > 2.0 * gap) {
      out.status = FaceStatus::infeasible;
      out.reason = "grid certificate: image stays away from the required ray";
      return;
    }
    if (level >= opt.refinements || search::lattice_size(f.k, 2 * res) > kMaxRefinedLattice) break;
    res *= 2;
  }
  out.status = FaceStatus::inconclusive;
  out.reason = "grid and multistart search exhausted without a certificate";
}

void solve_pair(Solver& sv, FaceResult& out) {
  const Face& f = sv.f;
  const ThetaPolys tp = theta_polys(f);
  const VectorXd& qa = sv.qa;
  // Cross product of G(theta) with -q_alpha.
  const Poly c = poly::add(poly::scale(tp.g[0], -qa[1]), poly::scale(tp.g[1], qa[0]));
  const double ref = std::max(poly::max_abs_coeff(tp.g[0]), poly::max_abs_coeff(tp.g[1])) * qa.norm();
  if (!poly::is_zero(c, ref)) {
    for (double th : poly::real_roots(c, 0.0, 1.0))
      if (auto pt = sv.try_direction(segment_point(th))) add_distinct(out.points, std::move(*pt));
    out.status = out.points.empty() ? FaceStatus::infeasible : FaceStatus::feasible;
    if (out.points.empty()) out.reason = "no root of the direction equation satisfies the face system";
    return;
  }
  // G(theta) is parallel to q_alpha for every theta: G = gamma(theta) d.
  const VectorXd d = -qa / qa.norm();
  const Poly gamma = poly::add(poly::scale(tp.g[0], d[0]), poly::scale(tp.g[1], d[1]));
  std::vector<Poly> breaks{gamma};
  for (std::size_t j = 0; j < tp.h.size(); ++j)
    breaks.push_back(poly::add(poly::scale(tp.h[j], qa.norm()), poly::scale(gamma, sv.qb[static_cast<Eigen::Index>(j)])));
  bool previous = false;
  const auto pts = sweep_points(breaks);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto pt = sv.try_direction(segment_point(pts[i]));
    if (pt && i % 2 == 1) out.continuum = true;
    if (pt && !previous) add_distinct(out.points, std::move(*pt));
    previous = pt.has_value();
  }
  out.status = out.points.empty() ? FaceStatus::infeasible : FaceStatus::feasible;
  if (out.points.empty()) out.reason = "direction sweep found no admissible segment point";
}

// Homogeneous face (q_alpha = 0): singular directions of the sub-tensor.
void solve_homogeneous(Solver& sv, const FaceOptions& opt, FaceResult& out) {
  const Face& f = sv.f;
  bool complete = false;
  auto record = [&](const VectorXd& s) {
    if (auto pt = sv.try_singular(s, out.continuum)) add_distinct(out.points, std::move(*pt));
  };
  if (f.k == 1) {
    record(VectorXd::Ones(1));
    complete = true;
  } else if (f.k == 2) {
    const ThetaPolys tp = theta_polys(f);
    const double ref = std::max(poly::max_abs_coeff(tp.g[0]), poly::max_abs_coeff(tp.g[1]));
    const bool z0 = poly::is_zero(tp.g[0], std::max(ref, 1.0)), z1 = poly::is_zero(tp.g[1], std::max(ref, 1.0));
    if (z0 && z1) {
      std::vector<Poly> breaks = tp.h;
      for (std::size_t i = 0; i < tp.h.size(); ++i)
        for (std::size_t j = 0; j < tp.h.size(); ++j)
          if (i != j)
            breaks.push_back(poly::add(poly::scale(tp.h[j], sv.qb[static_cast<Eigen::Index>(i)]),
                                       poly::scale(tp.h[i], -sv.qb[static_cast<Eigen::Index>(j)])));
      bool previous = false;
      for (double th : sweep_points(breaks)) {
        const VectorXd s = segment_point(th);
        auto pt = sv.try_singular(s / s.norm(), out.continuum);
        if (pt && !previous) add_distinct(out.points, std::move(*pt));
        previous = pt.has_value();
      }
    } else {
      for (double th : poly::real_roots(z0 ? tp.g[1] : tp.g[0], 0.0, 1.0)) {
        const VectorXd s = segment_point(th);
        record(s / s.norm());
      }
    }
    complete = true;
  } else {
    const int res = resolution_for(opt, f.k);
    const auto grid = search::simplex_lattice(f.k, res);
    std::vector<double> phi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) phi[i] = f.g(grid[i]).norm();
    sv.evaluations += static_cast<long>(grid.size());
    const double lo = *std::min_element(phi.begin(), phi.end());
    if (lo > 2.0 * search::max_neighbour_gap(grid, res, phi)) {
      complete = true;
    } else {
      std::vector<std::size_t> order(grid.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return phi[x] < phi[y]; });
      for (int s = 0; s < opt.multistarts && s < static_cast<int>(order.size()); ++s) {
        search::LmProblem pr;
        pr.residual = [&](const VectorXd& l) { return f.g(l); };
        pr.jacobian = [&](const VectorXd& l) { return MatrixXd(jacobian_m1(f.sub, l)); };
        pr.project = [](const VectorXd& l) { return search::project_simplex(l); };
        auto r = search::levenberg_marquardt(pr, grid[order[static_cast<std::size_t>(s)]], opt.polish_iters, 1e-14);
        sv.evaluations += r.evaluations;
        record(r.z / r.z.norm());
      }
    }
  }
  if (!out.points.empty()) {
    out.status = FaceStatus::feasible;
  } else if (complete) {
    out.status = FaceStatus::infeasible;
    out.reason = "no admissible singular direction";
  } else {
    out.status = FaceStatus::inconclusive;
    out.reason = "singular directions could not be excluded";
  }
}

}  // namespace

FaceResult solve_face(const Tensor& a, const VectorXd& q, const IndexSet& alpha, const FaceOptions& opt) {
  if (q.size() != a.dim()) throw std::invalid_argument("solve_face: dimension mismatch");
  FaceResult out;
  if (alpha.empty()) {
    if (q.minCoeff() >= -opt.slack_tol) {
      out.status = FaceStatus::feasible;
      out.points.push_back({VectorXd(0), q, 0.0});
    } else {
      out.status = FaceStatus::infeasible;
      out.reason = "q has a negative component";
    }
    return out;
  }
  const Face f(a, alpha);
  const VectorXd qa = restrict(q, alpha);
  const VectorXd qb = restrict(q, f.rest);
  Solver sv{f, qa, qb, opt};

  if (qa.isZero(0.0)) {
    if (qb.size() == 0 || qb.minCoeff() >= -opt.slack_tol) out.points.push_back({VectorXd::Zero(f.k), qb, 0.0});
    solve_homogeneous(sv, opt, out);
  } else if (auto why = sign_infeasible(f, qa)) {
    out.status = FaceStatus::infeasible;
    out.reason = *why;
  } else if (f.k == 1) {
    if (auto pt = sv.try_direction(VectorXd::Ones(1))) out.points.push_back(std::move(*pt));
    out.status = out.points.empty() ? FaceStatus::infeasible : FaceStatus::feasible;
    if (out.points.empty()) out.reason = "off-face slack is negative";
  } else if (f.k == 2) {
    solve_pair(sv, out);
  } else {
    solve_numeric(sv, opt, out);
  }
  out.evaluations = sv.evaluations;
  return out;
}

SingularDirections singular_directions(const Tensor& a, const IndexSet& alpha, const FaceOptions& opt,
                                       int continuum_samples) {
  SingularDirections out;
  const Face f(a, alpha);
  const double tol = opt.system_tol;
  std::vector<VectorXd> found;
  auto consider = [&](VectorXd s) {
    ++out.evaluations;
    s /= s.norm();
    if (!(f.g(s).norm() <= tol)) return;
    const VectorXd h = f.h(s);
    if (h.size() > 0 && h.minCoeff() < -opt.slack_tol) return;
    for (const auto& e : found)
      if ((e - s).norm() <= 1e-6) return;
    found.push_back(s);
  };
  if (f.k == 1) {
    consider(VectorXd::Ones(1));
    out.complete = true;
  } else if (f.k == 2) {
    const ThetaPolys tp = theta_polys(f);
    const double ref = std::max({poly::max_abs_coeff(tp.g[0]), poly::max_abs_coeff(tp.g[1]), 1.0});
    const bool z0 = poly::is_zero(tp.g[0], ref), z1 = poly::is_zero(tp.g[1], ref);
    if (z0 && z1) {
      out.continuum = true;
      for (double th : sweep_points(tp.h)) consider(segment_point(th));
      for (int i = 0; i <= continuum_samples; ++i)
        consider(segment_point(static_cast<double>(i) / std::max(1, continuum_samples)));
    } else {
      for (double th : poly::real_roots(z0 ? tp.g[1] : tp.g[0], 0.0, 1.0)) consider(segment_point(th));
    }
    out.complete = true;
  } else {
    const int res = resolution_for(opt, f.k);
    const auto grid = search::simplex_lattice(f.k, res);
    std::vector<double> phi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) phi[i] = f.g(grid[i]).norm();
    out.evaluations += static_cast<long>(grid.size());
    if (*std::min_element(phi.begin(), phi.end()) > 2.0 * search::max_neighbour_gap(grid, res, phi)) {
      out.complete = true;
    } else {
      std::vector<std::size_t> order(grid.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return phi[x] < phi[y]; });
      const int starts = std::max(opt.multistarts, continuum_samples);
      for (int s = 0; s < starts && s < static_cast<int>(order.size()); ++s) {
        search::LmProblem pr;
        pr.residual = [&](const VectorXd& l) { return f.g(l); };
        pr.jacobian = [&](const VectorXd& l) { return MatrixXd(jacobian_m1(f.sub, l)); };
        pr.project = [](const VectorXd& l) { return search::project_simplex(l); };
        auto r = search::levenberg_marquardt(pr, grid[order[static_cast<std::size_t>(s)]], opt.polish_iters, 1e-14);
        out.evaluations += r.evaluations;
        consider(r.z);
      }
    }
  }
  out.directions = std::move(found);
  return out;
}

}  // namespace tcpkit::face
