#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/ensemble.hpp"
#include "cli/json_output.hpp"
#include "doctest.h"
#include "spinsemi/errors.hpp"

using namespace spinsemi;
using namespace spinsemi::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "spinsemi");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Json json_of(const Run& r) { return Json::parse(r.out); }

cplx result_of(const Json& j) { return {j["result"]["re"].get<double>(), j["result"]["im"].get<double>()}; }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void check_schema(const Json& j) {
  REQUIRE(j.is_object());
  CHECK(j.size() == 5);
  CHECK(j["command"].is_string());
  CHECK(j["inputs"].is_object());
  CHECK(j["result"]["re"].is_number());
  CHECK(j["result"]["im"].is_number());
  CHECK(j["prob"].is_number());
  CHECK(j["diagnostics"].is_object());
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(NAN) == "null");
  CHECK(render_json(Json{{"a", 0.5}, {"b", Json::array({1, 2})}}) == "{\n  \"a\": 0.5,\n  \"b\": [1, 2]\n}\n");
}

TEST_CASE("angle parsing") {
  const auto p = parse_angles("1.5,-0.25");
  CHECK(p.theta() == 1.5);
  CHECK(p.phi() == -0.25);
  CHECK_THROWS_AS(parse_angles("1.5"), ParseError);
  CHECK_THROWS_AS(parse_angles("1,2,3"), ParseError);
  CHECK_THROWS_AS(parse_angles("a,b"), ParseError);
  CHECK_THROWS_AS(parse_angles("4,0"), InputError);
}

TEST_CASE("exact command") {
  auto r = run({"exact", "--field", "const:0,0,1", "--t", "1", "--from", "0,0", "--to", "0,0"});
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  check_schema(j);
  CHECK(j["command"] == "exact");
  CHECK(std::abs(result_of(j) - cplx(std::cos(0.5), -std::sin(0.5))) < 1e-11);
  CHECK(j["inputs"]["field"] == "const:0,0,1");
  CHECK(j["diagnostics"]["accepted_steps"].get<long>() > 0);

  r = run({"exact", "--field", "const:0,0,1", "--t", "0", "--from", "0,0", "--to", "3.14159265,0"});
  CHECK(std::abs(result_of(json_of(r))) < 1e-8);
  r = run({"exact", "--field", "lz:1,1", "--t", "0", "--from", "0,0", "--to", "0,0"});
  CHECK(result_of(json_of(r)) == cplx(1.0));
}

TEST_CASE("semiclassical command") {
  const std::vector<std::string> base{"--field", "const:1,0,1", "--t", "1", "--from", "0.5,0", "--to", "1.0,0.3"};
  auto args = base;
  args.insert(args.begin(), "exact");
  const cplx exact = result_of(json_of(run(args)));
  for (const char* route : {"endpoint", "action"}) {
    args = base;
    args.insert(args.begin(), "semiclassical");
    args.insert(args.end(), {"--route", route});
    const auto r = run(args);
    REQUIRE(r.code == 0);
    const auto j = json_of(r);
    check_schema(j);
    CHECK(j["inputs"]["route"] == route);
    CHECK(j["diagnostics"].contains("branch_grid_points"));
    CHECK(std::abs(result_of(j) - exact) < 1e-8);
  }
  const auto free = json_of(run({"semiclassical", "--field", "const:0,0,0", "--t", "2", "--from", "0.5,0", "--to",
                                 "1.0,0.3"}));
  CHECK(std::abs(result_of(free) - overlap({1.0, 0.3}, {0.5, 0.0})) < 1e-12);
}

TEST_CASE("verify command") {
  auto r = run({"verify", "--n", "20", "--seed", "42", "--family", "const", "--tol", "1e-8"});
  CHECK(r.code == 0);
  auto j = json_of(r);
  check_schema(j);
  CHECK(j["diagnostics"]["pass"] == true);
  CHECK(j["diagnostics"]["max_error"].get<double>() <= 1e-8);
  CHECK(j["prob"].get<double>() == 1.0);

  r = run({"verify", "--n", "1", "--seed", "7", "--family", "const", "--tol", "1e-30"});
  CHECK(r.code == 1);
  CHECK(json_of(r)["diagnostics"]["pass"] == false);

  r = run({"verify", "--n", "5", "--seed", "1", "--family", "fourier", "--tol", "1e-8"});
  CHECK(r.code == 0);
  CHECK(run({"verify", "--family", "bogus"}).code == 2);
  CHECK(run({"verify", "--n", "0"}).code == 2);
}

TEST_CASE("verify is independent of the thread count") {
  const std::vector<std::string> args{"verify", "--n", "12", "--seed", "3", "--family", "table-random"};
  auto one = args, four = args;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  CHECK(run(one).out == run(four).out);
}

TEST_CASE("ensembles stay inside the sampling envelope") {
  for (Family fam : {Family::constant, Family::fourier, Family::table_random, Family::lz}) {
    const auto cases = make_ensemble(fam, 50, 9);
    CHECK(cases.size() == 50);
    for (const auto& c : cases) {
      CHECK(c.t > 0.0);
      CHECK(c.t <= kMaxHorizon);
      CHECK(c.from.theta() >= 0.1 * kPi);
      CHECK(c.to.theta() <= 0.9 * kPi);
      if (fam != Family::lz) CHECK(max_field_norm(c.field, c.t) <= kFieldBound);
    }
    const auto again = make_ensemble(fam, 50, 9);
    CHECK(again.back().from == cases.back().from);
  }
  CHECK(parse_family("table-random") == Family::table_random);
  CHECK(family_name(Family::lz) == "lz");
}

TEST_CASE("sweep command") {
  auto r = run({"sweep", "--family", "lz", "--param", "omega", "--start", "0.5", "--stop", "2", "--steps", "4",
                "--observable", "prob_nonadiabatic", "--window", "30"});
  REQUIRE(r.code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "param,value");
  CHECK(rows[2].rfind("1,", 0) == 0);
  CHECK(std::abs(std::stod(rows[2].substr(2)) - std::exp(-kPi / 2)) < 2e-2);

  r = run({"sweep", "--param", "omega", "--start", "0", "--stop", "0", "--steps", "1"});
  CHECK(lines(r.out).at(1) == "0,0");
  r = run({"sweep", "--param", "window", "--start", "0", "--stop", "0", "--steps", "1"});
  CHECK(lines(r.out).at(1) == "0,0");

  r = run({"sweep", "--family", "const", "--param", "t", "--start", "0", "--stop", "3", "--steps", "4",
           "--observable", "element_re", "--bz", "1"});
  rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(std::stod(rows[3].substr(rows[3].find(',') + 1)) == doctest::Approx(std::cos(1.0)).epsilon(1e-10));

  CHECK(run({"sweep", "--family", "lz", "--param", "bx", "--start", "0", "--stop", "1"}).code == 2);
  CHECK(run({"sweep", "--param", "omega", "--start", "0", "--stop", "1", "--observable", "nope"}).code == 2);
}

TEST_CASE("traj command") {
  auto r = run({"traj", "--field", "const:0,0,0", "--t", "1", "--from", "1,0", "--to", "1,0.5", "--samples", "7"});
  REQUIRE(r.code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == "s,re_zeta,im_zeta,re_eta,im_eta");
  for (std::size_t i = 2; i < rows.size(); ++i)
    CHECK(rows[i].substr(rows[i].find(',')) == rows[1].substr(rows[1].find(',')));

  r = run({"traj", "--field", "const:0,0,1", "--t", "2", "--from", "1,0", "--to", "1,0", "--samples", "5"});
  rows = lines(r.out);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double s, zr, zi, er, ei;
    REQUIRE(std::sscanf(rows[i].c_str(), "%lf,%lf,%lf,%lf,%lf", &s, &zr, &zi, &er, &ei) == 5);
    CHECK(std::hypot(zr, zi) == doctest::Approx(std::tan(0.5)).epsilon(1e-10));
  }
}

TEST_CASE("exit codes") {
  CHECK(run({"exact", "--field", "const:1,2", "--t", "1", "--from", "0,0", "--to", "0,0"}).code == 2);
  CHECK(run({"exact", "--field", "const:1,2,3", "--t", "-1", "--from", "0,0", "--to", "0,0"}).code == 2);
  CHECK(run({"exact", "--field", "const:1,2,3", "--t", "1", "--from", "0", "--to", "0,0"}).code == 2);
  CHECK(run({"exact", "--field", "const:1,2,3"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"exact", "--field", "const:1,2,3", "--t", "1", "--from", "0,0", "--to", "0,0", "--rtol", "0"}).code == 2);
  const auto r = run({"semiclassical", "--field", "const:1,0,0", "--t", "1", "--from", "0,0", "--to", "1,0", "--route",
           "action"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("numerical failures exit with 3") {
  // A trajectory forced through 1 + zeta eta'' = 0: from the equator on the
  // x axis to its antipode under no field.
  const auto r = run({"semiclassical", "--field", "const:0,0,0", "--t", "1", "--from", "1.5707963267948966,0", "--to",
                      "1.5707963267948966,3.141592653589793"});
  CHECK(r.code == 3);
  CHECK(r.err.find("numerical") != std::string::npos);
}

TEST_CASE("SPINSEMI_TOL sets the default relative tolerance") {
  const std::vector<std::string> args{"exact", "--field", "const:1,0,0", "--t", "1", "--from", "0,0", "--to", "0,0"};
  ::setenv("SPINSEMI_TOL", "1e-6", 1);
  auto j = json_of(run(args));
  CHECK(j["diagnostics"]["rel_tol"].get<double>() == 1e-6);
  auto more = args;
  more.insert(more.end(), {"--rtol", "1e-9"});
  CHECK(json_of(run(more))["diagnostics"]["rel_tol"].get<double>() == 1e-9);
  ::setenv("SPINSEMI_TOL", "garbage", 1);
  CHECK(run(args).code == 2);
  ::unsetenv("SPINSEMI_TOL");
  j = json_of(run(args));
  CHECK(j["diagnostics"]["rel_tol"].get<double>() == 1e-12);
}

TEST_CASE("repeated invocations are byte-identical") {
  const std::vector<std::vector<std::string>> cmds{
      {"exact", "--field", "lz:1,0.5,-1", "--t", "2", "--from", "0.3,0.1", "--to", "2,1"},
      {"semiclassical", "--field", "const:1,2,-1", "--t", "2", "--from", "0.3,0.1", "--to", "2,1", "--route", "action"},
      {"verify", "--n", "8", "--seed", "5", "--family", "fourier"},
      {"sweep", "--param", "gamma", "--start", "0.5", "--stop", "1.5", "--steps", "3", "--window", "5"},
      {"traj", "--field", "const:1,0,1", "--t", "1", "--from", "0.5,0", "--to", "1,0.3", "--samples", "4"}};
  for (const auto& c : cmds) {
    const auto a = run(c), b = run(c);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}
