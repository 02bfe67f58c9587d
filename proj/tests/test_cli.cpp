#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "doctest.h"
#include "fedosov/cli.hpp"

using namespace fedosov;
using namespace fedosov::cli;

namespace {

std::string geometry_path(const std::string& name) { return std::string(FEDOSOV_GEOMETRY_DIR) + "/" + name; }

Options with_file(const std::string& name) {
  Options o;
  o.geometry_path = geometry_path(name);
  return o;
}

const Dump& dump_named(const Report& r, const std::string& label) {
  for (const auto& d : r.dumps) {
    if (d.label == label) return d;
  }
  FAIL("no dump " << label);
  static Dump none;
  return none;
}

/// Rows of a dump without the validity row.
std::vector<std::pair<std::string, std::string>> rows(const Dump& d) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& row : d.rows) {
    if (row.first != "valid_order") out.push_back(row);
  }
  return out;
}

using Rows = std::vector<std::pair<std::string, std::string>>;

}  // namespace

TEST_CASE("geometry file schema errors carry a location") {
  auto error_of = [](const std::string& text) {
    try {
      GeometryFile::parse(text, "t.json");
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("{\"kind\": \"flat\", \"n\": 1").find("t.json") != std::string::npos);
  CHECK(error_of(R"({"kind": "torus", "n": 1, "order": 3})").find("/kind") != std::string::npos);
  CHECK(error_of(R"({"kind": "flat", "n": 7, "order": 3})").find("/n") != std::string::npos);
  CHECK(error_of(R"({"kind": "flat", "n": 1})").find("/order") != std::string::npos);
  CHECK(error_of(R"({"kind": "flat", "n": 1, "order": 3, "base_point": ["0"]})").find("/base_point") != std::string::npos);
  CHECK(error_of(R"({"kind": "cotangent", "n": 1, "order": 3, "metric": [["1", "0"]]})").find("/metric/0") !=
        std::string::npos);
  CHECK(error_of(R"({"kind": "darboux", "n": 1, "order": 3, "gamma": {"113": "q"}})").find("/gamma/113") !=
        std::string::npos);
  CHECK(error_of(R"({"kind": "flat", "n": 1, "order": 3, "potential": "z"})").find("/potential") != std::string::npos);
  CHECK(error_of(R"({"kind": "flat", "n": 1, "order": 3, "base_point": [0.5, 0]})").find("/base_point/0") !=
        std::string::npos);
  // bad expressions are reported when the geometry is built
  auto f = GeometryFile::parse(R"({"kind": "cotangent", "n": 1, "order": 3, "metric": [["1 + x"]]})");
  CHECK_THROWS_WITH_AS(build_geometry(f), doctest::Contains("/metric/0/0"), InputError);
  auto asym = GeometryFile::parse(
      R"({"kind": "cotangent", "n": 2, "order": 3, "metric": [["1", "q1"], ["q2", "1"]]})");
  CHECK_THROWS_WITH_AS(build_geometry(asym), doctest::Contains("not symmetric"), InputError);
}

TEST_CASE("geometry files round-trip and digest deterministically") {
  const GeometryFile a = GeometryFile::load(geometry_path("sphere.json"));
  const GeometryFile b = GeometryFile::parse(a.to_json().dump());
  CHECK(a.to_json() == b.to_json());
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);
  CHECK(a.digest() != GeometryFile::load(geometry_path("flat.json")).digest());
}

TEST_CASE("validate") {
  Report flat = cmd_validate(with_file("flat.json"));
  CHECK(flat.passed());
  CHECK(exit_code(flat) == 0);
  Report sphere = cmd_validate(with_file("sphere.json"));
  CHECK(sphere.passed());
  CHECK(cmd_validate(with_file("kaehler.json")).passed());
  CHECK(cmd_validate(with_file("darboux.json")).passed());
  Report broken = cmd_validate(with_file("broken_gamma.json"));
  CHECK_FALSE(broken.passed());
  CHECK(exit_code(broken) == 1);
  bool located = false;
  for (const auto& c : broken.checks) {
    if (c.name == "Gamma_ijk totally symmetric") located = !c.passed && c.detail.find("(1,1,2)") != std::string::npos;
  }
  CHECK(located);
  // a non-validate command refuses the broken geometry
  Options star = with_file("broken_gamma.json");
  star.f = "q";
  star.g = "p";
  CHECK_THROWS_AS(cmd_star(star), InputError);
}

TEST_CASE("star examples") {
  Options o = with_file("flat.json");
  o.f = "q";
  o.g = "p";
  o.order = 1;
  Report qp = cmd_star(o);
  REQUIRE(qp.dumps.size() == 2);
  CHECK(rows(dump_named(qp, "hbar^0")) == Rows{{"q*p", "1"}});
  CHECK(rows(dump_named(qp, "hbar^1")) == Rows{{"1", "1/2*i"}});

  o.g = "q";
  o.order = 3;
  Report qq = cmd_star(o);
  CHECK(rows(dump_named(qq, "hbar^0")) == Rows{{"q^2", "1"}});
  for (int k = 1; k <= 3; ++k) CHECK(rows(dump_named(qq, "hbar^" + std::to_string(k))).empty());

  Options s = with_file("sphere.json");
  s.f = "q1^2 + q2";
  s.g = "q1*q2 - 3";
  s.order = 3;
  Report pol = cmd_star(s);
  CHECK_FALSE(rows(dump_named(pol, "hbar^0")).empty());
  for (int k = 1; k <= 3; ++k) CHECK(rows(dump_named(pol, "hbar^" + std::to_string(k))).empty());

  o.order = 5;
  CHECK_THROWS_WITH_AS(cmd_star(o), doctest::Contains("insufficient order"), InputError);
  o.order = 1;
  o.g = "q + r";
  CHECK_THROWS_AS(cmd_star(o), InputError);
}

TEST_CASE("quantize examples") {
  Options o = with_file("flat.json");
  o.f = "p^2";
  Report p2 = cmd_quantize(o);
  CHECK(p2.passed());
  REQUIRE(p2.dumps.size() == 1);
  CHECK(p2.dumps[0].label == "hbar^2 d_q^2");
  CHECK(rows(p2.dumps[0]) == Rows{{"1", "-1"}});

  o.f = "q*p";
  Report qp = cmd_quantize(o);
  // (q p~ + p~ q)/2 = -i hbar (q d + 1/2)
  CHECK(rows(dump_named(qp, "hbar^1 1")) == Rows{{"1", "-1/2*i"}});
  CHECK(rows(dump_named(qp, "hbar^1 d_q")) == Rows{{"q", "-i"}});

  Options s = with_file("sphere.json");
  s.f = "g(p, p)";
  Report kin = cmd_quantize(s);
  CHECK(kin.passed());
  bool checked = false;
  for (const auto& c : kin.checks) checked = checked || c.name.find("Delta - R/4") != std::string::npos;
  CHECK(checked);

  Options k = with_file("kaehler.json");
  k.f = "z^2";
  CHECK(cmd_quantize(k).passed());
  k.f = "zb^2";
  CHECK_FALSE(cmd_quantize(k).passed());
}

TEST_CASE("reports are deterministic and round-trip") {
  SuiteConfig c;
  c.seed = 7;
  c.samples = 2;
  c.order = 2;
  Report a = run_suite("moyal-flat", c), b = run_suite("moyal-flat", c);
  CHECK(a.passed());
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.table() == b.table());
  CHECK(Report::from_json(a.to_json()) == a);

  Options o = with_file("flat.json");
  o.f = "q^2*p";
  o.g = "p^2 + q";
  o.order = 2;
  o.argv = {"star", "flat.json"};
  Report s = cmd_star(o);
  CHECK(Report::from_json(nlohmann::json::parse(s.to_json().dump())) == s);
  CHECK(s.to_json()["geometry"]["kind"] == "flat");

  CHECK_THROWS_AS(run_suite("no-such-suite", c), InputError);
  CHECK(suite_names().size() == 9);
}

TEST_CASE("suites accept geometry files") {
  SuiteConfig c;
  c.geometry = GeometryFile::load(geometry_path("sphere.json"));
  c.order = 2;
  Report k = run_suite("kinetic-alpha", c);
  CHECK(k.passed());
  REQUIRE(k.checks.size() == 1);
  CHECK(k.checks[0].detail == "alpha = 1/4");
  c.geometry = GeometryFile::load(geometry_path("darboux.json"));
  CHECK(run_suite("r-terms", c).passed());
  CHECK_THROWS_AS(run_suite("kinetic-alpha", c), InputError);
}

#ifdef FEDOSOV_TOOL
TEST_CASE("tool exit codes") {
  auto run = [](const std::string& args) {
    const std::string cmd = std::string(FEDOSOV_TOOL) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(run("validate " + geometry_path("flat.json")) == 0);
  CHECK(run("validate " + geometry_path("broken_gamma.json")) == 1);
  CHECK(run("validate /nonexistent.json") == 2);
  CHECK(run("check no-such-suite") == 2);
  CHECK(run("star " + geometry_path("flat.json") + " --f q --g p --order 1") == 0);
  CHECK(run("star " + geometry_path("flat.json") + " --f 'q +' --g p") == 2);
  CHECK(run("check kinetic-alpha " + geometry_path("sphere.json") + " --order 2 --quiet") == 0);
  CHECK(run("quantize " + geometry_path("kaehler.json") + " --f 'zb^2'") == 1);
}
#endif
