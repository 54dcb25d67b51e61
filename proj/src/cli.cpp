#include "tcpkit/cli.hpp"

#include "tcpkit/classifiers.hpp"
#include "tcpkit/complementary.hpp"
#include "tcpkit/fixtures.hpp"
#include "tcpkit/io.hpp"
#include "tcpkit/solver.hpp"
#include "tcpkit/stability.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iomanip>
#include <sstream>

namespace tcpkit::cli {

namespace {

using io::json;

// Input problems that should map to the parse exit code.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string fixture, tensor_file, cone_spec, instance_file, q_text, x_text;
  std::string cone1, cone2;
  std::string probe;
  SearchBudget budget;
  double eps = 1e-3;
  int trials = 50;
  double radius = 0.1;
  int samples = 10000;
  double tol = kSolutionTolerance;
  bool principal = false;
  bool all = false;
  bool dual = false;
  bool pretty = false;
  std::string show;
};

VectorXd parse_vector(const std::string& text, const char* what) {
  VectorXd v(0);
  std::string item;
  std::stringstream ss(text);
  std::vector<double> vals;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError(std::string("cannot parse ") + what + " component \"" + item + "\"");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw InputError(std::string("cannot parse ") + what + " component \"" + item + "\"");
    vals.push_back(d);
  }
  if (vals.empty()) throw InputError(std::string(what) + " is empty");
  v.resize(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

Tensor load_tensor(const Options& o) {
  if (!o.fixture.empty() && !o.tensor_file.empty()) throw InputError("give either --fixture or --tensor, not both");
  if (!o.tensor_file.empty()) return io::tensor_from_json(io::read_file(o.tensor_file));
  if (o.fixture.empty()) throw InputError("a tensor is required (--fixture or --tensor)");
  try {
    return fixtures::by_name(o.fixture);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

PolyhedralCone load_cone(const std::string& spec, int dim) {
  if (spec.empty()) return PolyhedralCone::orthant(dim);
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") return io::cone_from_json(io::read_file(spec));
  try {
    return fixtures::cone_by_name(spec);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

TcpInstance load_instance(const Options& o) {
  if (!o.instance_file.empty()) return io::instance_from_json(io::read_file(o.instance_file));
  Tensor a = load_tensor(o);
  if (o.q_text.empty()) throw InputError("--q is required without --instance");
  TcpInstance inst{load_cone(o.cone_spec, a.dim()), parse_vector(o.q_text, "q"), std::move(a)};
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return inst;
}

json source_config(const Options& o) {
  json c;
  if (!o.instance_file.empty()) c["instance"] = o.instance_file;
  if (!o.fixture.empty()) c["fixture"] = o.fixture;
  if (!o.tensor_file.empty()) c["tensor"] = o.tensor_file;
  if (!o.cone_spec.empty()) c["cone"] = o.cone_spec;
  if (!o.q_text.empty()) c["q"] = o.q_text;
  c["budget"] = io::to_json(o.budget);
  return c;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

void emit(const json& j, const Options& o, std::ostream& out) {
  if (!o.pretty) {
    out << j.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& r : rows) out << std::left << std::setw(static_cast<int>(width + 2)) << r.first << r.second << "\n";
}

int cmd_classify(const Options& o, std::ostream& out) {
  const Tensor a = load_tensor(o);
  const PolyhedralCone k = load_cone(o.cone_spec, a.dim());
  if (k.dim() != a.dim()) throw InputError("cone and tensor dimensions differ");
  json j;
  j["command"] = "classify";
  j["config"] = source_config(o);
  j["config"]["principal"] = o.principal;
  j["tensor"] = json{{"order", a.order()},
                     {"dim", a.dim()},
                     {"nnz", a.nnz()},
                     {"symmetric", is_symmetric(a)},
                     {"subsymmetric", is_subsymmetric(a)}};
  json verdicts = json::array();
  verdicts.push_back(io::to_json(is_K_psd(a, k, o.budget)));
  verdicts.push_back(io::to_json(is_K_pd(a, k, o.budget)));
  verdicts.push_back(io::to_json(is_K_regular(a, k, o.budget)));
  json ns = io::to_json(is_K_nonsingular(a, k, o.budget));
  ns["reading"] = ns["status"] == "holds" ? "nonsingular" : ns["status"] == "fails" ? "singular" : "unknown";
  verdicts.push_back(ns);
  j["verdicts"] = verdicts;
  if (o.principal) j["principal"] = io::to_json(all_principal_nonsingular(a, o.budget));
  emit(j, o, out);
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const TcpInstance inst = load_instance(o);
  json j;
  j["command"] = "solve";
  j["config"] = source_config(o);
  j["config"]["tol"] = o.tol;
  j["config"]["all"] = o.all;
  if (!o.x_text.empty()) {
    const VectorXd x = parse_vector(o.x_text, "x");
    if (x.size() != inst.dim()) throw InputError("x has the wrong length");
    j["config"]["x"] = o.x_text;
    const TcpSolution s = make_solution(inst, x);
    j["status"] = is_solution(inst, x, o.tol) ? "verified" : "not-a-solution";
    j["solutions"] = json::array({io::to_json(s)});
    emit(j, o, out);
    return kExitOk;
  }
  EnumerationResult en = solve_enumerate(inst, o.budget);
  std::vector<TcpSolution> sols;
  for (auto& s : en.solutions) {
    const RefineResult r = refine(inst, s.x);
    sols.push_back(r.converged && (r.solution.x - s.x).norm() <= kDedupDistance ? r.solution : s);
  }
  for (const auto& s : sols)
    if (!is_solution(inst, s.x, o.tol)) throw std::runtime_error("internal: enumerated point failed verification");
  j["member"] = !sols.empty() ? json(true) : en.unknown ? json("unknown") : json(false);
  j["count"] = sols.size();
  j["continuum"] = en.continuum;
  j["subsets_examined"] = en.subsets_examined;
  json list = json::array();
  for (std::size_t i = 0; i < sols.size() && (o.all || i == 0); ++i) list.push_back(io::to_json(sols[i]));
  j["solutions"] = list;
  int code = kExitOk;
  if (!sols.empty()) {
    j["status"] = "solved";
  } else if (!en.unknown) {
    j["status"] = "no-solution";
    j["note"] = "no solution (certified at grid resolution)";
  } else {
    j["status"] = "unknown";
    j["note"] = "some index sets were inconclusive and no solution was found";
    code = kExitUnknown;
  }
  emit(j, o, out);
  return code;
}

int cmd_membership(const Options& o, std::ostream& out) {
  const Tensor a = load_tensor(o);
  if (o.q_text.empty()) throw InputError("--q is required");
  const VectorXd q = parse_vector(o.q_text, "q");
  if (q.size() != a.dim()) throw InputError("q length differs from the tensor dimension");
  const MembershipResult m = q_membership(a, q, o.budget);
  json j;
  j["command"] = "membership";
  j["config"] = source_config(o);
  j["result"] = io::to_json(m);
  j["x"] = m.member == Membership::member ? io::to_json(solution_from_membership(m, a, q)) : json(nullptr);
  emit(j, o, out);
  return kExitOk;
}

int cmd_perturb(const Options& o, std::ostream& out) {
  json j;
  j["command"] = "perturb";
  j["probe"] = o.probe;
  j["config"] = source_config(o);
  j["config"]["eps"] = o.eps;
  j["config"]["trials"] = o.trials;
  j["config"]["seed"] = o.budget.seed;
  const std::uint64_t seed = o.budget.seed;
  if (o.probe == "existence") {
    j["report"] = io::to_json(perturb_existence(load_instance(o), o.eps, o.trials, seed, o.budget));
  } else if (o.probe == "error-bound" || o.probe == "uniqueness") {
    const TcpInstance inst = load_instance(o);
    if (o.x_text.empty()) throw InputError("--xbar is required");
    const VectorXd xbar = parse_vector(o.x_text, "xbar");
    if (xbar.size() != inst.dim()) throw InputError("xbar has the wrong length");
    j["config"]["xbar"] = o.x_text;
    if (o.probe == "uniqueness") {
      j["verdict"] = io::to_json(local_uniqueness_certificate(inst, xbar, o.budget));
    } else {
      j["config"]["radius"] = o.radius;
      j["report"] = io::to_json(error_bound_probe(inst, xbar, o.radius, o.eps, o.trials, seed, o.budget));
    }
  } else if (o.probe == "usc") {
    j["report"] = io::to_json(usc_probe(load_instance(o), o.eps, o.trials, seed, o.budget));
  } else if (o.probe == "unsolvable") {
    const Tensor a = load_tensor(o);
    if (o.q_text.empty()) throw InputError("--q is required");
    const VectorXd q = parse_vector(o.q_text, "q");
    if (q.size() != a.dim()) throw InputError("q length differs from the tensor dimension");
    j["report"] = io::to_json(unsolvable_neighborhood_probe(a, q, o.eps, o.trials, seed, o.budget));
  } else if (o.probe == "openness") {
    const Tensor a = load_tensor(o);
    j["report"] = io::to_json(nonsingularity_openness_probe(load_cone(o.cone_spec, a.dim()), a, o.eps, o.trials, seed, o.budget));
  } else {
    throw InputError("unknown probe: " + o.probe);
  }
  emit(j, o, out);
  return kExitOk;
}

int cmd_distance(const Options& o, std::ostream& out) {
  if (o.cone1.empty() || o.cone2.empty()) throw InputError("--cone1 and --cone2 are required");
  const PolyhedralCone k1 = load_cone(o.cone1, 0), k2 = load_cone(o.cone2, 0);
  json j;
  j["command"] = "distance";
  j["config"] = json{{"cone1", o.cone1}, {"cone2", o.cone2}, {"samples", o.samples}, {"seed", o.budget.seed}, {"dual", o.dual}};
  const DeltaEstimate d = delta_metric(k1, k2, o.samples, o.budget.seed);
  j["delta"] = io::number(d.value);
  j["samples"] = d.samples;
  if (o.dual) {
    const DeltaEstimate dd = delta_metric(dual(k1), dual(k2), o.samples, o.budget.seed);
    j["dual_delta"] = io::number(dd.value);
  }
  emit(j, o, out);
  return kExitOk;
}

int cmd_fixtures(const Options& o, std::ostream& out) {
  json j;
  j["command"] = "fixtures";
  if (o.show.empty()) {
    j["tensors"] = fixtures::names();
    j["cones"] = json::array({"orthant<n>", "ray<digits>", "wedge"});
  } else {
    Tensor a = [&] {
      try {
        return fixtures::by_name(o.show);
      } catch (const std::exception& e) {
        throw InputError(e.what());
      }
    }();
    j["name"] = o.show;
    j["tensor"] = io::to_json(a);
  }
  emit(j, o, out);
  return kExitOk;
}

void add_budget(CLI::App* app, Options& o) {
  app->add_option("--grid", o.budget.grid_resolution, "lattice resolution (0 = automatic)");
  app->add_option("--multistarts", o.budget.multistarts, "local polish starts");
  app->add_option("--polish-iters", o.budget.polish_iters, "iterations per polish");
  app->add_option("--refinements", o.budget.refinements, "lattice doublings for uncertified faces");
  app->add_option("--margin", o.budget.margin, "decision margin");
  app->add_option("--seed", o.budget.seed, "random seed");
}

void add_tensor(CLI::App* app, Options& o) {
  app->add_option("--fixture", o.fixture, "named tensor (see `fixtures`)");
  app->add_option("--tensor", o.tensor_file, "tensor JSON file");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Tensor complementarity toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--pretty", o.pretty, "human-readable table instead of JSON");

  auto* classify = app.add_subcommand("classify", "classify a tensor on a cone");
  add_tensor(classify, o);
  classify->add_option("--cone", o.cone_spec, "cone spec or JSON file (default: orthant)");
  classify->add_flag("--principal", o.principal, "also sweep all principal sub-tensors");
  add_budget(classify, o);

  auto* solve = app.add_subcommand("solve", "solve or verify a complementarity instance");
  solve->add_option("--instance", o.instance_file, "instance JSON file");
  add_tensor(solve, o);
  solve->add_option("--cone", o.cone_spec, "cone spec or JSON file");
  solve->add_option("--q", o.q_text, "comma-separated q");
  solve->add_option("--x", o.x_text, "verify this point instead of solving");
  solve->add_option("--tol", o.tol, "verification tolerance");
  solve->add_flag("--all", o.all, "list every solution found");
  add_budget(solve, o);

  auto* membership = app.add_subcommand("membership", "decide q in Q(R^n_+, A)");
  add_tensor(membership, o);
  membership->add_option("--q", o.q_text, "comma-separated q")->required();
  add_budget(membership, o);

  auto* perturb = app.add_subcommand("perturb", "stability probes");
  perturb->add_option("probe", o.probe, "existence | error-bound | usc | unsolvable | openness | uniqueness")
      ->required()
      ->check(CLI::IsMember({"existence", "error-bound", "usc", "unsolvable", "openness", "uniqueness"}));
  perturb->add_option("--instance", o.instance_file, "instance JSON file");
  add_tensor(perturb, o);
  perturb->add_option("--cone", o.cone_spec, "cone spec or JSON file");
  perturb->add_option("--q", o.q_text, "comma-separated q");
  perturb->add_option("--xbar", o.x_text, "base solution (error-bound, uniqueness)");
  perturb->add_option("--radius", o.radius, "neighbourhood radius (error-bound)");
  perturb->add_option("--eps", o.eps, "perturbation size");
  perturb->add_option("--trials", o.trials, "number of perturbations");
  add_budget(perturb, o);

  auto* distance = app.add_subcommand("distance", "sampled Hausdorff distance of unit-ball sections");
  distance->add_option("--cone1", o.cone1, "first cone")->required();
  distance->add_option("--cone2", o.cone2, "second cone")->required();
  distance->add_option("--samples", o.samples, "sample count per cone");
  distance->add_option("--seed", o.budget.seed, "random seed");
  distance->add_flag("--dual", o.dual, "also measure the dual pair");

  auto* fixture_cmd = app.add_subcommand("fixtures", "list or print named fixtures");
  fixture_cmd->add_option("--show", o.show, "print one fixture as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  int failure = kExitSolve;
  std::function<int()> action;
  if (*classify) {
    action = [&] { return cmd_classify(o, out); };
  } else if (*solve) {
    action = [&] { return cmd_solve(o, out); };
  } else if (*membership) {
    action = [&] { return cmd_membership(o, out); };
  } else if (*perturb) {
    failure = kExitPerturb;
    action = [&] { return cmd_perturb(o, out); };
  } else if (*distance) {
    failure = kExitDistance;
    action = [&] { return cmd_distance(o, out); };
  } else {
    action = [&] { return cmd_fixtures(o, out); };
  }
  try {
    o.budget.validate();
    return action();
  } catch (const io::ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failure;
  }
}

}  // namespace tcpkit::cli
