#include "tcpkit/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tcpkit::io {

ParseError::ParseError(const std::string& message, int line, int column, std::string path)
    : std::runtime_error(message), line_(line), column_(column), path_(std::move(path)) {}

namespace {

[[noreturn]] void structural(const std::string& path, const std::string& what) {
  throw ParseError((path.empty() ? std::string("/") : path) + ": " + what, 0, 0, path.empty() ? "/" : path);
}

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) structural(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) structural(path, std::string("missing key \"") + key + "\"");
  return *it;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) structural(path, "expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) structural(path, "expected a number");
  return j.get<double>();
}

}  // namespace

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset -> 1-based line and column.
    const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto colon = msg.find(": ", msg.find("parse error"));
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg, line, col);
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_text(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column(), e.path());
  }
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

VectorXd vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) structural(path, "expected an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_double(j[i], path + "/" + std::to_string(i));
  return v;
}

json to_json(const Tensor& a) {
  json entries = json::array();
  for (int k = 0; k < a.nnz(); ++k) {
    json idx = json::array();
    for (int i : a.index(k)) idx.push_back(i + 1);
    entries.push_back(json{{"idx", idx}, {"val", a.value(k)}});
  }
  return json{{"order", a.order()}, {"dim", a.dim()}, {"entries", entries}};
}

Tensor tensor_from_json(const json& j, const std::string& path) {
  const int order = as_int(member(j, "order", path), path + "/order");
  const int dim = as_int(member(j, "dim", path), path + "/dim");
  const json& entries = member(j, "entries", path);
  if (!entries.is_array()) structural(path + "/entries", "expected an array");
  std::vector<Tensor::Entry> es;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string ep = path + "/entries/" + std::to_string(k);
    const json& idx = member(entries[k], "idx", ep);
    if (!idx.is_array()) structural(ep + "/idx", "expected an array of indices");
    Tensor::Entry e;
    for (std::size_t p = 0; p < idx.size(); ++p) e.index.push_back(as_int(idx[p], ep + "/idx/" + std::to_string(p)) - 1);
    e.value = as_double(member(entries[k], "val", ep), ep + "/val");
    es.push_back(std::move(e));
  }
  try {
    return Tensor(order, dim, std::move(es));
  } catch (const std::invalid_argument& e) {
    structural(path, e.what());
  }
}

json to_json(const PolyhedralCone& k) {
  json gens = json::array();
  for (Eigen::Index c = 0; c < k.generators().cols(); ++c) gens.push_back(to_json(VectorXd(k.generators().col(c))));
  return json{{"dim", k.dim()}, {"kind", k.is_orthant() ? "orthant" : "general"}, {"generators", gens}};
}

PolyhedralCone cone_from_json(const json& j, const std::string& path) {
  const int dim = as_int(member(j, "dim", path), path + "/dim");
  const json& kind = member(j, "kind", path);
  if (!kind.is_string()) structural(path + "/kind", "expected \"orthant\" or \"general\"");
  try {
    if (kind == "orthant") return PolyhedralCone::orthant(dim);
    if (kind != "general") structural(path + "/kind", "expected \"orthant\" or \"general\"");
    const json& gens = member(j, "generators", path);
    if (!gens.is_array() || gens.empty()) structural(path + "/generators", "expected a nonempty array");
    MatrixXd g(dim, static_cast<Eigen::Index>(gens.size()));
    for (std::size_t c = 0; c < gens.size(); ++c) {
      const VectorXd v = vector_from_json(gens[c], path + "/generators/" + std::to_string(c));
      if (v.size() != dim) structural(path + "/generators/" + std::to_string(c), "length differs from dim");
      g.col(static_cast<Eigen::Index>(c)) = v;
    }
    return PolyhedralCone::from_generators(g);
  } catch (const std::invalid_argument& e) {
    structural(path, e.what());
  }
}

json to_json(const TcpInstance& inst) {
  return json{{"cone", to_json(inst.cone)}, {"q", to_json(inst.q)}, {"tensor", to_json(inst.a)}};
}

TcpInstance instance_from_json(const json& j) {
  TcpInstance inst{cone_from_json(member(j, "cone", ""), "/cone"), vector_from_json(member(j, "q", ""), "/q"),
                   tensor_from_json(member(j, "tensor", ""), "/tensor")};
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    structural("/", e.what());
  }
  return inst;
}

json to_json(const IndexSet& s) {
  json a = json::array();
  for (int i : s.members()) a.push_back(i + 1);
  return a;
}

json to_json(const SearchBudget& b) {
  return json{{"grid_resolution", b.grid_resolution},
              {"multistarts", b.multistarts},
              {"polish_iters", b.polish_iters},
              {"refinements", b.refinements},
              {"seed", b.seed},
              {"margin", b.margin}};
}

json to_json(const Verdict& v) {
  json j{{"property", v.property},
         {"status", to_string(v.status)},
         {"certificate", number(v.certificate)},
         {"witness", v.witness ? to_json(*v.witness) : json(nullptr)},
         {"budget", to_json(v.budget)},
         {"evaluations", v.budget_used}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const PrincipalSweep& s) {
  json j = to_json(s.verdict);
  j["failing_alpha"] = s.failing_alpha ? to_json(*s.failing_alpha) : json(nullptr);
  json table = json::array();
  for (const auto& e : s.table)
    table.push_back(json{{"alpha", to_json(e.alpha)},
                         {"status", to_string(e.verdict.status)},
                         {"certificate", number(e.verdict.certificate)}});
  j["table"] = table;
  return j;
}

json to_json(const MembershipResult& m) {
  return json{{"member", m.member == Membership::member       ? json(true)
                         : m.member == Membership::non_member ? json(false)
                                                              : json("unknown")},
              {"alpha", m.alpha ? to_json(*m.alpha) : json(nullptr)},
              {"u", m.u ? to_json(*m.u) : json(nullptr)},
              {"residual", number(m.residual)},
              {"subsets_examined", m.subsets_examined},
              {"inconclusive_subsets", m.inconclusive}};
}

json to_json(const TcpSolution& s) {
  return json{{"x", to_json(s.x)},
              {"w", to_json(s.w)},
              {"residual", json{{"primal_dist", number(s.primal_dist)},
                                {"dual_dist", number(s.dual_dist)},
                                {"comp_gap", number(s.comp_gap)}}},
              {"support", to_json(s.alpha)}};
}

json to_json(const PerturbationReport& r) {
  json j{{"probe", r.probe},
         {"trials", r.trials},
         {"eps", number(r.eps)},
         {"seed", r.seed},
         {"solvable_fraction", number(r.solvable_fraction)},
         {"max_solution_norm", number(r.max_solution_norm)},
         {"error_ratio_max", number(r.error_ratio_max)},
         {"max_excursion", number(r.max_excursion)}};
  if (r.fraction) j["fraction"] = number(*r.fraction);
  j["failures"] = r.failures;
  j["resamples"] = r.resamples;
  j["shifts"] = r.shifts;
  j["skipped"] = r.skipped;
  j["unknown"] = r.unknown;
  return j;
}

}  // namespace tcpkit::io
