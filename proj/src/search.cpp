#include "search.hpp"

#include "tcpkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace tcpkit::search {

double lattice_size(int k, int resolution) {
  double c = 1.0;
  for (int i = 1; i < k; ++i) c = c * (resolution + i) / i;
  return c;
}

int default_resolution(int k) {
  if (k <= 3) return 64;
  if (k == 4) return 16;
  int r = 1;
  while (lattice_size(k, r + 1) <= kMaxLatticePoints) ++r;
  return r;
}

std::vector<VectorXd> simplex_lattice(int k, int resolution) {
  if (k < 1 || resolution < 1) throw std::invalid_argument("simplex_lattice: bad arguments");
  std::vector<VectorXd> out;
  out.reserve(static_cast<std::size_t>(lattice_size(k, resolution)));
  std::vector<int> c(static_cast<std::size_t>(k), 0);
  // Recursive descent over compositions, largest first coordinate first.
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == k - 1) {
      c[static_cast<std::size_t>(pos)] = remaining;
      VectorXd p(k);
      for (int i = 0; i < k; ++i) p[i] = static_cast<double>(c[static_cast<std::size_t>(i)]) / resolution;
      out.push_back(std::move(p));
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      c[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, resolution);
  return out;
}

double max_neighbour_gap(const std::vector<VectorXd>& lattice, int resolution, const std::vector<double>& values) {
  if (lattice.empty()) return 0.0;
  const Eigen::Index k = lattice.front().size();
  auto key = [&](const VectorXd& p) {
    std::vector<int> c(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(p[i] * resolution));
    return c;
  };
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < lattice.size(); ++i) index.emplace(key(lattice[i]), i);
  double gap = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    std::vector<int> c = key(lattice[i]);
    for (Eigen::Index from = 0; from < k; ++from) {
      if (c[static_cast<std::size_t>(from)] == 0) continue;
      for (Eigen::Index to = from + 1; to < k; ++to) {
        --c[static_cast<std::size_t>(from)];
        ++c[static_cast<std::size_t>(to)];
        auto it = index.find(c);
        if (it != index.end()) gap = std::max(gap, std::abs(values[i] - values[it->second]));
        ++c[static_cast<std::size_t>(from)];
        --c[static_cast<std::size_t>(to)];
      }
    }
  }
  return gap;
}

VectorXd project_simplex(const VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    css += u[static_cast<std::size_t>(i)];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

LmResult levenberg_marquardt(const LmProblem& problem, VectorXd z0, int max_iters, double target) {
  LmResult res;
  if (problem.project) z0 = problem.project(z0);
  res.z = z0;
  VectorXd r = problem.residual(res.z);
  ++res.evaluations;
  double norm = r.norm();
  double mu = 1e-3;
  for (int it = 0; it < max_iters && norm > target; ++it) {
    res.iterations = it + 1;
    const MatrixXd j = problem.jacobian(res.z);
    const MatrixXd jtj = j.transpose() * j;
    const VectorXd g = j.transpose() * r;
    const double scale = std::max(1e-12, jtj.diagonal().maxCoeff());
    bool accepted = false;
    for (int tries = 0; tries < 30; ++tries) {
      MatrixXd lhs = jtj;
      lhs.diagonal().array() += mu * scale;
      const VectorXd step = lhs.ldlt().solve(-g);
      if (!step.allFinite()) {
        mu *= 10.0;
        continue;
      }
      VectorXd cand = res.z + step;
      if (problem.project) cand = problem.project(cand);
      const VectorXd rc = problem.residual(cand);
      ++res.evaluations;
      const double nc = rc.norm();
      if (std::isfinite(nc) && nc < norm) {
        res.z = std::move(cand);
        r = rc;
        norm = nc;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) break;
  }
  res.residual_norm = norm;
  return res;
}

}  // namespace tcpkit::search

namespace tcpkit::search {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Evaluator {
  const MatrixXd& v;
  const HomogeneousObjective& obj;
  long evaluations = 0;

  double operator()(const VectorXd& lambda) {
    ++evaluations;
    const VectorXd y = v * lambda;
    const double ny = y.norm();
    if (ny <= 1e-300) return kInf;
    return obj.value(y) / std::pow(ny, obj.degree);
  }

  VectorXd gradient(const VectorXd& lambda) {
    const VectorXd y = v * lambda;
    const double ny = y.norm();
    const double h = obj.value(y);
    const VectorXd gy = obj.gradient(y) / std::pow(ny, obj.degree) -
                        (obj.degree * h / std::pow(ny, obj.degree + 2)) * y;
    return v.transpose() * gy;
  }
};

VectorXd projected_gradient(Evaluator& eval, VectorXd lambda, int iters) {
  double f = eval(lambda);
  double step = 1.0;
  for (int it = 0; it < iters && std::isfinite(f); ++it) {
    const VectorXd g = eval.gradient(lambda);
    if (!g.allFinite()) break;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const VectorXd cand = project_simplex(lambda - step * g);
      const double diff2 = (cand - lambda).squaredNorm();
      if (diff2 == 0.0) break;
      const double fc = eval(cand);
      if (fc <= f - 1e-4 * diff2 / step) {
        moved = diff2 > 1e-30;
        lambda = cand;
        f = fc;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return lambda;
}

VectorXd lm_polish(Evaluator& eval, const VectorXd& lambda, int iters) {
  LmProblem p;
  const MatrixXd& v = eval.v;
  const HomogeneousObjective& obj = eval.obj;
  p.residual = [&](const VectorXd& l) { return obj.residual(v * l); };
  p.jacobian = [&](const VectorXd& l) { return MatrixXd(obj.residual_jacobian(v * l) * v); };
  p.project = [](const VectorXd& l) { return project_simplex(l); };
  LmResult r = levenberg_marquardt(p, lambda, iters, 1e-300);
  eval.evaluations += r.evaluations;
  return r.z;
}

}  // namespace

ConeMinimum minimize_on_generators(const MatrixXd& generators, const HomogeneousObjective& objective,
                                   int resolution, int multistarts, int polish_iters) {
  const int k = static_cast<int>(generators.cols());
  if (k == 0) throw std::invalid_argument("minimize_on_generators: no generators");
  Evaluator eval{generators, objective};
  const std::vector<VectorXd> grid = simplex_lattice(k, resolution);
  std::vector<double> values(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    Evaluator local{generators, objective};
    values[static_cast<std::size_t>(i)] = local(grid[static_cast<std::size_t>(i)]);
  });
  eval.evaluations += static_cast<long>(grid.size());

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = std::isnan(values[a]) ? kInf : values[a];
    const double vb = std::isnan(values[b]) ? kInf : values[b];
    return va < vb;
  });

  ConeMinimum best;
  best.value = values[order[0]];
  VectorXd best_lambda = grid[order[0]];

  const int starts = std::min<int>(multistarts, static_cast<int>(grid.size()));
  for (int s = 0; s < starts; ++s) {
    const VectorXd& start = grid[order[static_cast<std::size_t>(s)]];
    if (!std::isfinite(values[order[static_cast<std::size_t>(s)]])) break;
    VectorXd lam = objective.residual ? lm_polish(eval, start, polish_iters)
                                      : projected_gradient(eval, start, polish_iters);
    const double v = eval(lam);
    if (v < best.value - 1e-12 * (1.0 + std::abs(best.value))) {
      best.value = v;
      best_lambda = lam;
    }
  }
  const VectorXd y = generators * best_lambda;
  best.argmin = y / y.norm();
  best.evaluations = eval.evaluations;
  return best;
}

}  // namespace tcpkit::search
