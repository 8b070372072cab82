#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

#include "qig/cli.hpp"
#include "qig/io.hpp"

using namespace qig;
using namespace testing;
using io::Json;

namespace {

std::string data(const std::string& name) { return std::string(QIG_TEST_DATA) + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json run_json(const std::vector<std::string>& args) {
  const Run r = run(args);
  REQUIRE(r.code == cli::kExitOk);
  return Json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("qig_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_probdist") {
  const ProbDist p = io::parse_probdist(Json::parse("[0.5, 0.3, 0.2]"));
  CHECK(p.size() == 3);
  CHECK(p[1] == doctest::Approx(0.3));
  QIG_CHECK_THROWS_CODE(io::parse_probdist(Json::parse("[0.5, 0.6]")), ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(io::parse_probdist(Json::parse("[1.5, -0.5]")), ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(io::parse_probdist(Json::parse("{\"a\": 1}")), ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(io::parse_probdist(Json::parse("[\"x\"]")), ErrorCode::InvalidInput);
}

TEST_CASE("parse_matrix and density inputs") {
  const Matrix m = io::parse_matrix(Json::parse(R"({"dim": 2, "re": [[1, 2], [3, 4]], "im": [[0, 1], [-1, 0]]})"));
  CHECK(m(0, 1) == Complex(2, 1));
  CHECK(m(1, 0) == Complex(3, -1));
  QIG_CHECK_THROWS_CODE(io::parse_matrix(Json::parse(R"({"dim": 2, "re": [[1, 2]]})")), ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(io::parse_hermitian(Json::parse(R"({"dim": 2, "re": [[1, 2], [0, 1]]})")),
                        ErrorCode::NonHermitianInput);
  const DensityMatrix rho = io::parse_density(io::read_json_file(data("plus.json")));
  CHECK(frob(rho.matrix() - plus().matrix()) < 1e-15);
  QIG_CHECK_THROWS_CODE(io::parse_density(io::read_json_file(data("unnormalised_state.json"))),
                        ErrorCode::InvalidInput);
  QIG_CHECK_THROWS_CODE(io::read_json_file(data("missing.json")), ErrorCode::InvalidInput);
  const Povm povm = io::parse_povm(Json::parse(R"([{"dim": 2, "re": [[1, 0], [0, 0]]}, {"dim": 2, "re": [[0, 0], [0, 1]]}])"));
  CHECK(povm.size() == 2);
}

TEST_CASE("parse_family") {
  const io::FamilySpec u = io::parse_family(io::read_json_file(data("mixed_unitary.json")));
  CHECK(u.family.kind == FamilyKind::Unitary);
  CHECK_FALSE(u.tau.has_value());
  const io::FamilySpec r = io::parse_family(io::read_json_file(data("rotation.json")));
  REQUIRE(r.tau.has_value());
  CHECK(*r.tau == doctest::Approx(M_PI / 2));
  const io::FamilySpec l = io::parse_family(io::read_json_file(data("dephasing_trajectory.json")));
  CHECK(l.family.kind == FamilyKind::Lindblad);
  QIG_CHECK_THROWS_CODE(io::parse_family(Json::parse(R"({"kind": "spiral"})")), ErrorCode::InvalidInput);
}

TEST_CASE("dump format") {
  CHECK(io::dump(Json(0.1), 0) == "0.10000000000000001");
  CHECK(io::dump(Json(kInf), 0) == "\"inf\"");
  CHECK(io::dump(Json(-kInf), 0) == "\"-inf\"");
  CHECK(io::dump(Json(std::nan("")), 0) == "null");
  CHECK(io::dump(Json{{"a", 1}}, 0) == "{\"a\":1}");
  CHECK(io::contains_infinity(Json{{"x", Json::array({1.0, kInf})}}));
  CHECK_FALSE(io::contains_infinity(Json{{"x", "inf"}}));
  // the emitted text parses back to the same doubles
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix m = random_hermitian(3, 6000 + s);
    const Matrix back = io::parse_matrix(Json::parse(io::dump(io::to_json(m))));
    CHECK(back == m);
  }
}

TEST_CASE("cli examples") {
  const Json same = run_json({"chernoff", "--classical", "--p", data("p.json"), "--q", data("p.json")});
  CHECK(same["xi"].get<double>() == 1.0);
  CHECK(same["C"].get<double>() == 0.0);

  const Json trace = run_json({"quantum-div", "--kind", "trace", "--rho", data("zero.json"), "--sigma", data("plus.json")});
  CHECK(trace["value"].get<double>() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  const Json metric = run_json({"metric", "--g", "qfi", "--family", data("mixed_unitary.json"), "--theta", "0"});
  CHECK(metric["points"][0]["metric"][0][0].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("cli subcommands") {
  const Json kl = run_json({"classical-div", "--kind", "kl", "--p", data("p.json"), "--q", data("q.json")});
  CHECK(kl["value"].get<double>() == doctest::Approx(0.5 * std::log(0.5 / 0.2) + 0.2 * std::log(0.2 / 0.5)).epsilon(1e-12));
  const Json hel = run_json({"classical-div", "--kind", "hellinger:0.5", "--p", data("p.json"), "--q", data("q.json")});
  CHECK(hel["value"].get<double>() > 0.0);

  const Json est = run_json({"estimate-bound", "--family", data("mixed_unitary.json"), "--theta", "0", "--nu", "4"});
  CHECK(est["bound"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  const Json sl = run_json({"speed-limit", "--trajectory", data("rotation.json"), "--g", "qfi"});
  CHECK(sl["path_length"].get<double>() == doctest::Approx(M_PI / 2).epsilon(1e-9));
  CHECK(sl["pass"].get<bool>());

  const Json ht = run_json({"ht", "--rho", data("zero.json"), "--sigma", data("plus.json"), "--n", "3"});
  CHECK(ht["error"][2].get<double>() == doctest::Approx(0.5 * (1 - std::sqrt(1 - 0.125))).epsilon(1e-12));

  const Json au = run_json({"audit", "--rho", data("zero.json"), "--sigma", data("plus.json")});
  CHECK(au["all_pass"].get<bool>());

  const Json th = run_json({"thermo", "--hamiltonian", data("hamiltonian.json"), "--beta", "1", "--perturbation",
                            data("perturbation.json"), "--lambda", "0.02"});
  CHECK(th["clausius"]["identity_residual"].get<double>() < 1e-9);
  CHECK(th["thermal_state"]["re"][0][0].get<double>() == doctest::Approx(1 / (1 + std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("cli exit codes") {
  const Run bad = run({"classical-div", "--kind", "kl", "--p", data("unnormalised.json"), "--q", data("q.json")});
  CHECK(bad.code == cli::kExitInvalid);
  const Json e = Json::parse(bad.out);
  CHECK(e["error"]["code"] == "InvalidInput");
  CHECK(e["error"]["usage"].get<std::string>().find("classical-div") == 0);

  const Run bad_state = run({"quantum-div", "--kind", "trace", "--rho", data("unnormalised_state.json"), "--sigma",
                             data("plus.json")});
  CHECK(bad_state.code == cli::kExitInvalid);
  CHECK(Json::parse(bad_state.out).contains("error"));

  const Run usage = run({"metric", "--g", "qfi"});
  CHECK(usage.code == cli::kExitInvalid);
  CHECK(Json::parse(usage.out)["error"]["usage"].get<std::string>().find("--family") != std::string::npos);

  CHECK(run({"no-such-command"}).code == cli::kExitInvalid);
  CHECK(run({"quantum-div", "--kind", "nonsense", "--rho", data("zero.json"), "--sigma", data("plus.json")}).code ==
        cli::kExitInvalid);

  const std::vector<std::string> rld = {"metric", "--g", "rld", "--family", data("rotation.json"), "--theta", "0"};
  const Run loose = run(rld);
  CHECK(loose.code == cli::kExitOk);
  CHECK(Json::parse(loose.out)["points"][0]["metric"][0][0] == "inf");
  std::vector<std::string> strict = rld;
  strict.insert(strict.begin(), "--require-finite");
  CHECK(run(strict).code == cli::kExitInfinite);
}

TEST_CASE("cli csv and out") {
  const Run csv = run({"--csv", "metric", "--g", "qfi", "--family", data("mixed_unitary.json"), "--theta", "0,0.5"});
  REQUIRE(csv.code == cli::kExitOk);
  CHECK(csv.out.rfind("theta_0,g_00,divergent\n", 0) == 0);
  CHECK(csv.out.find("\n0,0.25") != std::string::npos);

  const Run flat = run({"--csv", "quantum-div", "--kind", "fidelity", "--rho", data("zero.json"), "--sigma", data("plus.json")});
  CHECK(flat.out.rfind("key,value\nkind,fidelity\nvalue,0.7071067811865", 0) == 0);

  const std::string path = (std::filesystem::temp_directory_path() / "qig_test_out.json").string();
  const Run to_file = run({"--out", path, "chernoff", "--rho", data("zero.json"), "--sigma", data("plus.json")});
  CHECK(to_file.code == cli::kExitOk);
  CHECK(to_file.out.empty());
  CHECK(Json::parse(slurp(path))["C"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("cli round trip") {
  // a matrix written by the CLI reloads into an identical report
  const Json th = run_json({"thermo", "--hamiltonian", data("hamiltonian.json"), "--beta", "0.7"});
  const std::string omega = temp_file("omega.json", io::dump(th["thermal_state"]));
  const std::vector<std::string> args = {"quantum-div", "--kind", "relent", "--rho", omega, "--sigma", data("plus.json")};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.out == b.out);
  const DensityMatrix reloaded = io::parse_density(io::read_json_file(omega));
  const DensityMatrix direct = thermal_state({io::parse_hermitian(io::read_json_file(data("hamiltonian.json"))), 0.7, Matrix()});
  CHECK(reloaded.matrix() == direct.matrix());

  const std::vector<std::string> sim = {"ht", "--rho", data("zero.json"), "--sigma", data("plus.json"), "--n", "2",
                                        "--simulate", "20000", "--seed", "9"};
  const Run s1 = run(sim);
  const Run s2 = run(sim);
  CHECK(s1.code == cli::kExitOk);
  CHECK(s1.out == s2.out);
  CHECK(Json::parse(s1.out)["simulation"]["analytic_inside_ci"].get<bool>());
}

TEST_CASE("every subcommand rejects unnormalised input") {
  const std::string bad_p = data("unnormalised.json");
  const std::string bad_rho = data("unnormalised_state.json");
  const std::string fam = temp_file("bad_family.json",
                                    R"({"kind": "unitary", "rho0": {"dim": 2, "re": [[0.7, 0], [0, 0.5]]},
                                        "hamiltonian": {"dim": 2, "re": [[0, 0.5], [0.5, 0]]}, "tau": 1})");
  const std::vector<std::vector<std::string>> cases = {
      {"classical-div", "--kind", "tv", "--p", bad_p, "--q", data("q.json")},
      {"quantum-div", "--kind", "trace", "--rho", bad_rho, "--sigma", data("plus.json")},
      {"metric", "--g", "qfi", "--family", fam, "--theta", "0"},
      {"chernoff", "--classical", "--p", bad_p, "--q", data("q.json")},
      {"chernoff", "--rho", bad_rho, "--sigma", data("plus.json")},
      {"ht", "--rho", bad_rho, "--sigma", data("plus.json"), "--n", "2"},
      {"ht", "--rho", data("zero.json"), "--sigma", data("plus.json"), "--n", "2", "--priors", "0.6,0.6"},
      {"audit", "--classical", "--p", bad_p, "--q", data("q.json")},
      {"audit", "--rho", bad_rho, "--sigma", data("plus.json")},
      {"estimate-bound", "--family", fam, "--theta", "0", "--nu", "1"},
      {"speed-limit", "--trajectory", fam, "--g", "qfi"},
      {"thermo", "--hamiltonian", data("hamiltonian.json"), "--beta", "1", "--final", bad_rho},
  };
  for (const auto& args : cases) {
    CAPTURE(args.front());
    const Run r = run(args);
    CHECK(r.code == cli::kExitInvalid);
    CHECK(Json::parse(r.out).contains("error"));
  }
}
