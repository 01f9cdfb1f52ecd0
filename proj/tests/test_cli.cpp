#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stratmeas/cli.hpp"
#include "stratmeas/errors.hpp"
#include "stratmeas/io.hpp"

using namespace stratmeas;

namespace {

const std::string kData = STRATMEAS_TEST_DATA;

std::string data(const std::string& name) { return kData + "/" + name; }

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "stratmeas");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// A scratch file removed when the test ends.
struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name, const std::string& contents = "")
      : path(std::filesystem::temp_directory_path() / ("stratmeas_test_" + name)) {
    std::ofstream(path) << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("evaluate reports the chain average") {
  auto r = run({"evaluate", "--model", data("m1.json"), "--policy", data("always_a.json"), "--criterion", "J1",
                "--p0", "s0"});
  REQUIRE(r.code == kExitOk);
  auto j = r.json();
  CHECK(j["value"].get<double>() == doctest::Approx(1.0));
  CHECK(j["method"] == "exact-chain");
  CHECK(j.contains("error_bound"));

  auto t = run({"evaluate", "--model", data("m1.json"), "--policy", data("always_a.json"), "--criterion", "J1",
                "--p0", "s0", "--format", "table"});
  CHECK(t.code == kExitOk);
  CHECK(t.out.find("exact-chain") != std::string::npos);
}

TEST_CASE("solve-vi on pennies") {
  auto r = run({"solve-vi", "--model", data("pennies.json"), "--beta", "0.5", "--epsilon", "1e-8"});
  REQUIRE(r.code == kExitOk);
  auto j = r.json();
  REQUIRE(j["V"].size() == 1);
  CHECK(std::fabs(j["V"][0].get<double>() - 1.0) <= 1e-8);
  CHECK(j["method"] == "value-iteration");
}

TEST_CASE("verify-measure on a point mass") {
  auto r = run({"verify-measure", "--model", data("m1.json"), "--measure", data("pm.json"), "--class", "S_stationary"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.json()["member"] == true);
  auto bad = run({"verify-measure", "--model", data("m1.json"), "--measure", data("pm.json"), "--class", "S_bogus"});
  CHECK(bad.code == kExitInvalid);
}

TEST_CASE("output is byte-identical across runs") {
  const std::vector<std::vector<std::string>> commands{
      {"measure", "--model", data("m1.json"), "--policy", data("mixed_stationary.json"), "--p0", "s0", "--horizon",
       "2"},
      {"decompose", "--model", data("m1.json"), "--policy", data("mixed_stationary.json"), "--p0", "s0:1/2,s1:1/2",
       "--horizon", "2"},
      {"solve-enum", "--model", data("m1.json"), "--class", "Markov", "--criterion", "NSTAGE", "--horizon", "3"},
      {"game-value", "--model", data("pennies_matrix.json")},
      {"evaluate", "--model", data("m1.json"), "--policy", data("mixed_stationary.json"), "--criterion", "TJ1",
       "--p0", "s0", "--horizon", "30", "--seed", "5", "--samples", "500"},
  };
  for (const auto& c : commands) {
    auto a = run(c), b = run(c);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}

TEST_CASE("exact measure round trip through a file") {
  auto r = run({"measure", "--model", data("m1.json"), "--policy", data("mixed_stationary.json"), "--p0", "s0",
                "--horizon", "2", "--exact"});
  REQUIRE(r.code == kExitOk);
  auto j = r.json();
  CHECK(j["support"]["s0,a,s0,a"] == "9/100");
  CHECK(j["support"]["s0,a,s0,b"] == "21/100");
  CHECK(j["support"]["s0,b,s1,a"] == "7/10");

  TempFile file("roundtrip.json", r.out);
  auto model = load_model(data("m1.json"), true);
  auto parsed = parse_measure<Rational>(read_json_file(file.str()), model, true);
  CHECK(parsed.prob.at({0, 0, 0, 0}) == Rational(9, 100));
  CHECK(measure_to_json(parsed, model).dump(2) + "\n" == r.out);

  // The recovered exact policy rebuilds the same measure.
  auto rec = run({"recover-policy", "--model", data("m1.json"), "--measure", file.str(), "--class", "S_stationary",
                  "--exact"});
  REQUIRE(rec.code == kExitOk);
  TempFile pol("recovered.json", rec.out);
  auto again = run({"measure", "--model", data("m1.json"), "--policy", pol.str(), "--p0", "s0", "--horizon", "2",
                    "--exact"});
  CHECK(again.out == r.out);
}

TEST_CASE("exact mode refuses floating-point probabilities") {
  TempFile model("float_model.json", R"({
    "kind": "mdp", "states": ["s"], "actions": ["a"], "admissible": {"s": ["a"]},
    "transition": {"s|a": {"s": 1.0}}, "cost": {"s|a": 0}})");
  auto r = run({"measure", "--model", model.str(), "--policy", data("always_a.json"), "--p0", "s", "--horizon", "1",
                "--exact"});
  CHECK(r.code == kExitInvalid);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("strict schema") {
  TempFile extra("extra_key.json", R"({
    "kind": "mdp", "states": ["s"], "actions": ["a"], "admissible": {"s": ["a"]},
    "transition": {"s|a": {"s": 1}}, "cost": {"s|a": 0}, "colour": "blue"})");
  CHECK(run({"evaluate", "--model", extra.str(), "--policy", data("always_a.json"), "--criterion", "J1", "--p0", "s"})
            .code == kExitInvalid);
  TempFile unknown_state("unknown_state.json", R"({
    "kind": "mdp", "states": ["s"], "actions": ["a"], "admissible": {"s": ["a"]},
    "transition": {"s|a": {"t": 1}}, "cost": {"s|a": 0}})");
  CHECK(run({"evaluate", "--model", unknown_state.str(), "--policy", data("always_a.json"), "--criterion", "J1",
             "--p0", "s"})
            .code == kExitInvalid);
  TempFile bad_row("bad_row.json", R"({"class": "Stationary", "randomized": true,
    "kernels": {"s0": {"a": 0.5, "b": 0.4}}})");
  CHECK(run({"evaluate", "--model", data("m1.json"), "--policy", bad_row.str(), "--criterion", "J1", "--p0", "s0"})
            .code == kExitInvalid);
  TempFile bad_key("bad_key.json", R"({"class": "Markov", "randomized": true, "horizon": 2,
    "kernels": {"s0": {"a": 1}}})");
  CHECK(run({"evaluate", "--model", data("m1.json"), "--policy", bad_key.str(), "--criterion", "NSTAGE", "--p0", "s0",
             "--horizon", "2"})
            .code == kExitInvalid);
  TempFile broken("broken.json", "{ not json");
  CHECK(run({"game-value", "--model", broken.str()}).code == kExitInvalid);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"evaluate", "--model", data("m1.json")}).code == kExitUsage);
  CHECK(run({"evaluate", "--bogus-flag"}).code == kExitUsage);
  CHECK(run({"game-value", "--model", data("does_not_exist.json")}).code == kExitInvalid);
  // Enumeration beyond the cap.
  CHECK(run({"solve-enum", "--model", data("m1.json"), "--class", "History", "--criterion", "NSTAGE", "--horizon",
             "6", "--cap", "10"})
            .code == kExitLimit);
  CHECK(run({"solve-vi", "--model", data("pennies.json"), "--beta", "0.9999999", "--epsilon", "1e-12"}).code ==
        kExitLimit);
  auto help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("evaluate") != std::string::npos);
}

TEST_CASE("remaining commands") {
  auto dec = run({"decompose", "--model", data("m1.json"), "--policy", data("mixed_stationary.json"), "--p0", "s0",
                  "--horizon", "2"});
  REQUIRE(dec.code == kExitOk);
  const Json decomposition = dec.json();
  CHECK(decomposition["count"] == 4);
  double total = 0;
  for (const auto& c : decomposition["components"]) total += c["weight"].get<double>();
  CHECK(total == doctest::Approx(1.0));

  auto red = run({"markov-reduce", "--model", data("m1.json"), "--policy", data("mixed_stationary.json"), "--p0",
                  "s0", "--horizon", "2"});
  REQUIRE(red.code == kExitOk);
  CHECK(red.json()["class"] == "Markov");

  auto enm = run({"solve-enum", "--model", data("m1.json"), "--class", "Stationary", "--criterion", "J1", "--epsilon",
                  "0.1"});
  REQUIRE(enm.code == kExitOk);
  CHECK(enm.json()["values"][0].get<double>() == doctest::Approx(1.0));
  CHECK(enm.json().contains("eps_optimal"));

  auto game = run({"game-value", "--model", data("pennies_matrix.json")});
  CHECK(game.json()["value"].get<double>() == doctest::Approx(0.5));

  auto res = run({"oe-residual", "--model", data("pennies.json"), "--values", "0.5", "--kind", "equation"});
  CHECK(res.json()["max_abs"].get<double>() == doctest::Approx(0.0));
  auto disc = run({"oe-residual", "--model", data("pennies.json"), "--values", "1", "--kind", "discounted", "--beta",
                   "0.5"});
  CHECK(disc.json()["max_abs"].get<double>() == doctest::Approx(0.0));

  auto br = run({"best-response", "--model", data("pennies.json"), "--policy", data("always_h.json"), "--criterion",
                 "NSTAGE", "--horizon", "2"});
  REQUIRE(br.code == kExitOk);
  CHECK(br.json()["values"][0].get<double>() == doctest::Approx(2.0));

  auto ac = run({"check-ac", "--model", data("pennies.json"), "--policy", data("always_h.json"), "--horizon", "2"});
  CHECK(ac.json()["holds"] == true);

  auto pm = run({"measure", "--model", data("m1_blind.json"), "--policy", data("blind_uniform.json"), "--p0", "s0",
                 "--horizon", "2"});
  REQUIRE(pm.code == kExitOk);
  TempFile pmf("pomdp_measure.json", pm.out);
  auto pv = run({"verify-measure", "--model", data("m1_blind.json"), "--measure", pmf.str()});
  CHECK(pv.json()["member"] == true);

  auto pe = run({"pomdp-eval", "--model", data("m1_blind.json"), "--policy", data("blind_uniform.json"), "--criterion",
                 "NSTAGE", "--horizon", "2", "--p0", "s0"});
  CHECK(pe.json()["value"].get<double>() == doctest::Approx(2.5));
  auto ps = run({"pomdp-solve", "--model", data("m1_blind.json"), "--criterion", "NSTAGE", "--horizon", "2", "--p0",
                 "s0"});
  REQUIRE(ps.code == kExitOk);
  CHECK(ps.json()["value"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("distribution strings") {
  auto model = load_model(data("m1.json"), true);
  auto p = parse_distribution<Rational>("s0:1/3,s1:2/3", model);
  CHECK(p == std::vector<Rational>{Rational(1, 3), Rational(2, 3)});
  CHECK(parse_distribution<double>("s1", model) == std::vector<double>{0, 1});
  CHECK_THROWS_AS(parse_distribution<double>("s0:0.5", model), ValidationError);
  CHECK_THROWS_AS(parse_distribution<double>("s9", model), ValidationError);
}
