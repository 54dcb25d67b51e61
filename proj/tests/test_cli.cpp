#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tcpkit/cli.hpp"
#include "tcpkit/fixtures.hpp"
#include "tcpkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace tcpkit;
using io::json;

namespace {

struct Run {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "tcpkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const std::string path = std::string(P_tmpdir) + "/tcpkit_test_" + name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST_CASE("classify") {
  const Run e1 = run({"classify", "--fixture", "E1"});
  REQUIRE(e1.code == 0);
  const json r = e1.report();
  CHECK(r["verdicts"][0]["status"] == "holds");
  CHECK(r["verdicts"][1]["status"] == "fails");
  CHECK(r["verdicts"][3]["reading"] == "nonsingular");
  CHECK(r["config"]["fixture"] == "E1");

  const json e2 = run({"classify", "--fixture", "E2"}).report();
  CHECK(e2["verdicts"][3]["reading"] == "singular");
  CHECK(e2["verdicts"][3]["witness"] == json::array({1.0, 0.0}));

  const json e4 = run({"classify", "--fixture", "E4", "--principal"}).report();
  CHECK(e4["principal"]["status"] == "holds");

  const Run pretty = run({"classify", "--fixture", "E1", "--pretty"});
  CHECK(pretty.code == 0);
  CHECK(pretty.out.find("verdicts[0].status") != std::string::npos);
}

TEST_CASE("solve") {
  const json one = run({"solve", "--fixture", "E1", "--q=-1,-1"}).report();
  CHECK(one["status"] == "solved");
  REQUIRE(one["solutions"].size() == 1);
  CHECK(std::abs(one["solutions"][0]["x"][0].get<double>() - 1.0 / std::sqrt(3.0)) <= 1e-10);

  const Run none = run({"solve", "--fixture", "E1", "--q=1,-1"});
  CHECK(none.code == 0);
  CHECK(none.report()["member"] == false);
  CHECK(none.report()["note"] == "no solution (certified at grid resolution)");

  const json zero = run({"solve", "--fixture", "E2", "--q", "1,1"}).report();
  CHECK(zero["solutions"][0]["x"] == json::array({0.0, 0.0}));

  const json all = run({"solve", "--fixture", "negidentity32", "--q", "1,1", "--all"}).report();
  CHECK(all["solutions"].size() == 4);
  CHECK(run({"solve", "--fixture", "negidentity32", "--q", "1,1"}).report()["solutions"].size() == 1);

  const json verify = run({"solve", "--fixture", "identity22", "--cone", "wedge", "--q=-1,-1", "--x", "0,0"}).report();
  CHECK(verify["status"] == "not-a-solution");

  const std::string inst = temp_file(
      "instance.json", io::to_json(TcpInstance{PolyhedralCone::orthant(2), (VectorXd(2) << -1, -4).finished(),
                                               fixtures::identity(3, 2)})
                           .dump());
  const json fromfile = run({"solve", "--instance", inst}).report();
  CHECK(std::abs(fromfile["solutions"][0]["x"][0].get<double>() - 1.0) <= 1e-12);
  CHECK(std::abs(fromfile["solutions"][0]["x"][1].get<double>() - 2.0) <= 1e-12);
  std::remove(inst.c_str());
}

TEST_CASE("membership, perturb and distance") {
  const json m = run({"membership", "--fixture", "E1", "--q=-1,-1"}).report();
  CHECK(m["result"]["member"] == true);
  CHECK(m["result"]["alpha"] == json::array({1, 2}));

  const json p = run({"perturb", "existence", "--fixture", "identity32", "--q=-1,-1", "--eps", "1e-3", "--trials",
                      "50", "--seed", "7"})
                     .report();
  CHECK(p["report"]["solvable_fraction"] == 1.0);
  CHECK(p["config"]["seed"] == 7);
  CHECK(p["config"]["trials"] == 50);

  const json d = run({"distance", "--cone1", "orthant2", "--cone2", "ray10", "--samples", "10000"}).report();
  CHECK(std::abs(d["delta"].get<double>() - 1.0) <= 0.02);

  const json f = run({"fixtures"}).report();
  CHECK(f["tensors"].size() >= 4);
  CHECK(run({"fixtures", "--show", "E3:5"}).report()["tensor"]["order"] == 2);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitParse);
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"classify", "--bogus"}).code == cli::kExitParse);
  CHECK(run({"classify", "--fixture", "E9"}).code == cli::kExitParse);
  CHECK(run({"solve", "--fixture", "E1", "--q", "1,abc"}).code == cli::kExitParse);
  CHECK(run({"solve", "--fixture", "E1", "--q", "1,2,3"}).code == cli::kExitParse);
  CHECK(run({"classify", "--fixture", "E1", "--margin", "-1"}).code == cli::kExitSolve);

  const std::string broken = temp_file("broken.json", "{\n  \"order\": 3,\n  \"dim\" 2\n}");
  const Run parse = run({"classify", "--tensor", broken});
  CHECK(parse.code == cli::kExitParse);
  CHECK(parse.err.find("line 3, column 9") != std::string::npos);
  std::remove(broken.c_str());

  CHECK(run({"solve", "--fixture", "E1", "--cone", "wedge", "--q", "1,1"}).code == cli::kExitSolve);
  const Run pre = run({"perturb", "unsolvable", "--fixture", "identity32", "--q=-1,-1", "--trials", "3"});
  CHECK(pre.code == cli::kExitPerturb);
  CHECK(pre.err.find("non-member") != std::string::npos);
  CHECK(run({"perturb", "nosuch"}).code == cli::kExitParse);
  CHECK(run({"distance", "--cone1", "orthant2", "--cone2", "orthant3"}).code == cli::kExitDistance);
  CHECK(run({"distance", "--cone1", "orthant2", "--cone2", "ray10", "--samples", "0"}).code == cli::kExitDistance);
}

TEST_CASE("unknown outcome exits 3") {
  // The full face of this instance is infeasible, but its image approaches the
  // required ray too closely for the base lattice to certify that.
  const std::vector<std::string> base{"solve", "--fixture", "random:general:3:3:8", "--q=-1,0.4,-0.3", "--all"};
  auto coarse = base;
  coarse.insert(coarse.end(), {"--refinements", "0"});
  const Run r = run(coarse);
  CHECK(r.code == cli::kExitUnknown);
  CHECK(r.report()["status"] == "unknown");

  const Run refined = run(base);
  CHECK(refined.code == cli::kExitOk);
  CHECK(refined.report()["status"] != "unknown");
}

TEST_CASE("identical commands give byte-identical reports") {
  const std::vector<std::vector<std::string>> commands{
      {"classify", "--fixture", "E4", "--principal", "--seed", "3"},
      {"solve", "--fixture", "random:general:3:3:11", "--q=-1,0.5,-0.2", "--all", "--seed", "3"},
      {"membership", "--fixture", "E1", "--q=-1,-1", "--seed", "3"},
      {"perturb", "existence", "--fixture", "identity32", "--q=-1,-1", "--trials", "20", "--seed", "3"},
      {"perturb", "usc", "--fixture", "identity32", "--q=-1,-4", "--trials", "20", "--seed", "3"},
      {"distance", "--cone1", "wedge", "--cone2", "orthant2", "--samples", "500", "--seed", "3", "--dual"},
  };
  for (const auto& c : commands) {
    const Run a = run(c), b = run(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}
