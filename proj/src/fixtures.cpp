#include "tcpkit/fixtures.hpp"

#include "tcpkit/rng.hpp"

#include <cctype>
#include <map>
#include <stdexcept>

namespace tcpkit::fixtures {

namespace {

Tensor order3_dim2(std::vector<std::pair<std::vector<int>, double>> one_based) {
  std::vector<Tensor::Entry> es;
  for (auto& [idx, v] : one_based) {
    for (int& i : idx) --i;
    es.push_back({idx, v});
  }
  return Tensor(3, 2, std::move(es));
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

int parse_int(const std::string& s, const std::string& whole) {
  if (!all_digits(s)) throw std::invalid_argument("unknown fixture: " + whole);
  return std::stoi(s);
}

// "<m><n>" with single digits, or "<m>,<n>".
std::pair<int, int> order_dim(const std::string& s, const std::string& whole) {
  const auto comma = s.find(',');
  if (comma != std::string::npos) return {parse_int(s.substr(0, comma), whole), parse_int(s.substr(comma + 1), whole)};
  if (s.size() != 2 || !all_digits(s)) throw std::invalid_argument("unknown fixture: " + whole);
  return {s[0] - '0', s[1] - '0'};
}

}  // namespace

Tensor e1() {
  return order3_dim2({{{1, 1, 2}, 1}, {{1, 2, 1}, 1}, {{1, 2, 2}, 1}, {{2, 1, 1}, 1}, {{2, 1, 2}, 1}, {{2, 2, 1}, 1}});
}

Tensor e2() { return order3_dim2({{{1, 1, 2}, 1}, {{1, 2, 1}, 1}, {{2, 2, 1}, 1}, {{2, 1, 2}, 1}}); }

Tensor e3_limit() {
  MatrixXd m(2, 2);
  m << 1, -2, 1, -2;
  return Tensor::from_matrix(m);
}

Tensor e3_member(int l) {
  if (l < 1) throw std::invalid_argument("e3_member: l must be positive");
  MatrixXd m(2, 2);
  m << 1, -2 - 1.0 / l, 1, -2;
  return Tensor::from_matrix(m);
}

VectorXd e3_point(int l) {
  VectorXd x(2);
  x << 2.0 + 2.0 * l, static_cast<double>(l);
  return x;
}

Tensor e4() { return order3_dim2({{{1, 1, 1}, 1}, {{2, 2, 2}, 1}, {{1, 1, 2}, -1}, {{1, 2, 2}, -1}}); }

Tensor identity(int order, int dim) { return unit_tensor(order, dim); }

Tensor negated_identity(int order, int dim) { return -unit_tensor(order, dim); }

Tensor random_tensor(RandomKind kind, int order, int dim, std::uint64_t seed, double lo, double hi) {
  SplitMix64 rng(seed);
  std::size_t total = 1;
  for (int k = 0; k < order; ++k) total *= static_cast<std::size_t>(dim);
  std::vector<double> values(total);
  std::map<std::vector<int>, double> orbit;
  std::vector<int> idx(static_cast<std::size_t>(order), 0);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::vector<int> key = idx;
    if (kind == RandomKind::symmetric) std::sort(key.begin(), key.end());
    if (kind == RandomKind::subsymmetric) std::sort(key.begin() + 1, key.end());
    if (kind == RandomKind::symmetric || kind == RandomKind::subsymmetric) {
      auto it = orbit.find(key);
      if (it == orbit.end()) it = orbit.emplace(key, rng.uniform(lo, hi)).first;
      values[lin] = it->second;
    } else {
      values[lin] = rng.uniform(lo, hi);
    }
    for (int p = order - 1; p >= 0; --p) {
      if (++idx[static_cast<std::size_t>(p)] < dim) break;
      idx[static_cast<std::size_t>(p)] = 0;
    }
  }
  Tensor t = Tensor::from_dense(order, dim, values);
  if (kind == RandomKind::copositive_shifted) {
    double mass = 0.0;
    for (double v : values) mass += std::abs(v);
    t = t + mass * unit_tensor(order, dim);
  }
  return t;
}

Tensor by_name(const std::string& name) {
  if (name == "E1") return e1();
  if (name == "E2") return e2();
  if (name == "E3") return e3_limit();
  if (name == "E4") return e4();
  if (name.rfind("E3:", 0) == 0) return e3_member(parse_int(name.substr(3), name));
  if (name.rfind("negidentity", 0) == 0) {
    auto [m, n] = order_dim(name.substr(11), name);
    return negated_identity(m, n);
  }
  if (name.rfind("identity", 0) == 0) {
    auto [m, n] = order_dim(name.substr(8), name);
    return identity(m, n);
  }
  if (name.rfind("random:", 0) == 0) {
    std::vector<std::string> parts;
    std::size_t start = 7;
    while (true) {
      const auto colon = name.find(':', start);
      parts.push_back(name.substr(start, colon == std::string::npos ? std::string::npos : colon - start));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 4) throw std::invalid_argument("random fixture needs random:<kind>:<m>:<n>:<seed>");
    static const std::map<std::string, RandomKind> kinds{{"general", RandomKind::general},
                                                         {"symmetric", RandomKind::symmetric},
                                                         {"subsymmetric", RandomKind::subsymmetric},
                                                         {"copositive", RandomKind::copositive_shifted}};
    const auto it = kinds.find(parts[0]);
    if (it == kinds.end()) throw std::invalid_argument("unknown random kind: " + parts[0]);
    return random_tensor(it->second, parse_int(parts[1], name), parse_int(parts[2], name),
                         std::stoull(parts[3]));
  }
  throw std::invalid_argument("unknown fixture: " + name);
}

std::vector<std::string> names() {
  return {"E1", "E2", "E3", "E3:<l>", "E4", "identity<m><n>", "negidentity<m><n>", "random:<kind>:<m>:<n>:<seed>"};
}

std::vector<std::string> sample_names() {
  return {"E1", "E2", "E3", "E3:7", "E4", "identity32", "negidentity43", "random:general:3:3:1"};
}

PolyhedralCone cone_by_name(const std::string& name) {
  if (name.rfind("orthant", 0) == 0) return PolyhedralCone::orthant(parse_int(name.substr(7), name));
  if (name.rfind("ray", 0) == 0) {
    const std::string digits = name.substr(3);
    if (!all_digits(digits)) throw std::invalid_argument("unknown cone: " + name);
    MatrixXd g(static_cast<Eigen::Index>(digits.size()), 1);
    for (std::size_t i = 0; i < digits.size(); ++i) g(static_cast<Eigen::Index>(i), 0) = digits[i] - '0';
    return PolyhedralCone::from_generators(g);
  }
  if (name == "wedge") {
    MatrixXd g(2, 2);
    g << 1, 1, 0, 1;
    return PolyhedralCone::from_generators(g);
  }
  throw std::invalid_argument("unknown cone: " + name);
}

std::vector<std::pair<PolyhedralCone, PolyhedralCone>> cone_pairs() {
  auto gens = [](int rows, std::initializer_list<double> cols_major) {
    const auto cols = static_cast<Eigen::Index>(cols_major.size()) / rows;
    MatrixXd g(rows, cols);
    auto it = cols_major.begin();
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = *it++;
    return PolyhedralCone::from_generators(g);
  };
  const PolyhedralCone o2 = PolyhedralCone::orthant(2), o3 = PolyhedralCone::orthant(3);
  const PolyhedralCone wedge = gens(2, {1, 0, 1, 1});
  const PolyhedralCone narrow = gens(2, {1, 0.2, 1, -0.2});
  const PolyhedralCone wide = gens(2, {1, 2, 1, -2});
  const PolyhedralCone tilted = gens(2, {1, 1, -1, 1});
  const PolyhedralCone ray = gens(2, {1, 0});
  const PolyhedralCone c3a = gens(3, {1, 0, 0, 1, 1, 0, 1, 1, 1});
  const PolyhedralCone c3b = gens(3, {1, 0.1, 0.1, 0.1, 1, 0.1, 0.1, 0.1, 1});
  const PolyhedralCone c3c = gens(3, {1, 1, 0, 0, 1, 1, 1, 0, 1, 1, 1, 1});
  return {{o2, wedge},  {o2, narrow},   {wedge, narrow}, {o2, wide}, {tilted, o2},
          {wide, tilted}, {ray, wedge}, {o3, c3a},       {o3, c3b},  {c3a, c3c}};
}

}  // namespace tcpkit::fixtures
