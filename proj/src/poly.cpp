#include "poly.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace tcpkit::poly {

Poly multiply(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly scale(const Poly& a, double t) {
  Poly out = a;
  for (auto& c : out) c *= t;
  return out;
}

Poly derivative(const Poly& a) {
  if (a.size() <= 1) return {0.0};
  Poly out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * static_cast<double>(i);
  return out;
}

double eval(const Poly& a, double t) {
  double v = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * t + *it;
  return v;
}

double max_abs_coeff(const Poly& a) {
  double m = 0.0;
  for (double c : a) m = std::max(m, std::abs(c));
  return m;
}

bool is_zero(const Poly& a, double reference) {
  return max_abs_coeff(a) <= 1e-13 * std::max(reference, 1e-300);
}

std::vector<double> real_roots(const Poly& a, double lo, double hi) {
  Poly p = a;
  const double big = max_abs_coeff(p);
  if (big == 0.0) return {};
  while (!p.empty() && std::abs(p.back()) <= 1e-14 * big) p.pop_back();
  std::vector<double> cand;
  const int deg = static_cast<int>(p.size()) - 1;
  if (deg <= 0) return {};
  if (deg == 1) {
    cand.push_back(-p[0] / p[1]);
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[static_cast<std::size_t>(i)] / p.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-6 * std::max(1.0, std::abs(z))) cand.push_back(z.real());
    }
  }
  const Poly dp = derivative(p);
  std::vector<double> out;
  const double span = hi - lo;
  for (double t : cand) {
    for (int it = 0; it < 50; ++it) {
      const double d = eval(dp, t);
      if (d == 0.0) break;
      const double step = eval(p, t) / d;
      if (!std::isfinite(step)) break;
      t -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(t))) break;
    }
    if (t < lo - 1e-9 * span || t > hi + 1e-9 * span) continue;
    t = std::clamp(t, lo, hi);
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double t : out)
    if (uniq.empty() || std::abs(t - uniq.back()) > 1e-10) uniq.push_back(t);
  return uniq;
}

}  // namespace tcpkit::poly
