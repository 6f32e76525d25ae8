#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "twisted/cli.hpp"
#include "twisted/eigenbasis.hpp"
#include "twisted/serialization.hpp"

using namespace twisted;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "twisted_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable csv(const std::string& text) {
  std::istringstream in(text);
  return CsvTable::read(in);
}

std::string comment(const CsvTable& t, const std::string& key) {
  for (const auto& c : t.comments) {
    if (c.rfind(key + ": ", 0) == 0) return c.substr(key.size() + 2);
  }
  return "";
}

const char* kGaussianZ = R"({"n":1,"t":"1","terms":[{"a":[1],"b":[0],"re":"1","im":"0"}]})";

}  // namespace

TEST_CASE("sweep example: zbar at p = 4 fits slope -1/8") {
  const Run r = run({"sweep", "--candidate", "zbar", "--d", "2", "--p", "4", "--k", "100:10000:dyadic"});
  REQUIRE(r.code == kExitOk);
  const CsvTable t = csv(r.out);
  CHECK(std::abs(parse_real(comment(t, "slope")) + 0.125) < 0.01);
  CHECK(t.rows.size() == 7);
  for (const char* col : {"log_lambda", "value_log", "fit"}) CHECK_NOTHROW(t.column(col));
  // every row parses back as a NormEstimate
  for (const auto& row : t.rows) CHECK(norm_estimate_from_fields(t, row).kind == NormEstimate::Kind::CandidateLowerBound);
  // the resolved config is embedded and hashed
  const Json config = parse_json(comment(t, "config"));
  CHECK(config.at("k") == "100:10000:dyadic");
  CHECK(fnv1a_hex(config.dump()) == comment(t, "config_hash"));
}

TEST_CASE("norms example: |z|^4 Gaussian moment is pi/4") {
  const fs::path in = scratch("gaussian.json");
  write_file(in, kGaussianZ);
  const Run r = run({"norms", "--input", in.string(), "--p", "4"});
  REQUIRE(r.code == kExitOk);
  const Json doc = parse_json(r.out);
  const Json& res = doc.at("result");
  CHECK(exact_value_from_json(res.at("exact_power")) == ExactValue(mpq_class(1, 4), 1));
  CHECK(std::abs(res.at("numeric_power").get<double>() - std::numbers::pi / 4) < 1e-8);
  CHECK(doc.at("command") == "norms");
}

TEST_CASE("selftest passes") {
  const Run r = run({"selftest"});
  CHECK(r.code == kExitOk);
  CHECK(parse_json(r.out).at("result").at("failed") == 0);
  CHECK(r.err.empty());
}

TEST_CASE("validation errors exit 1 with JSON on stderr") {
  const std::vector<std::vector<std::string>> bad = {
      {},
      {"bogus"},
      {"opnorm", "--n", "0"},
      {"opnorm", "--p", "abc"},
      {"opnorm", "--method", "nope"},
      {"eigen", "--n", "2", "--alpha", "1"},
      {"sweep", "--k", "5:7:dyadic"},
      {"sweep", "--d", "3"},
      {"sweep", "--candidate", "magic"},
      {"norms"},
      {"norms", "--input", "/nonexistent/f.json"},
      {"heisenberg", "--m", "2"},
      {"heisenberg", "--p", "5"},
      {"opnorm", "--format", "xml"},
      {"opnorm", "--threads", "0"},
      {"opnorm", "--unknown-flag", "1"},
      {"dispersive", "--ks", "1,x"},
  };
  for (const auto& args : bad) {
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    CAPTURE(joined);
    const Run r = run(args);
    CHECK(r.code == kExitValidation);
    const Json e = parse_json(r.err);
    CHECK(e.at("error") == "validation");
    CHECK(e.at("message").is_string());
  }
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("non-convergence exits 2 with JSON on stderr") {
  const fs::path in = scratch("gaussian_nc.json");
  write_file(in, kGaussianZ);
  const Run q = run({"norms", "--input", in.string(), "--p", "7/2", "--target", "1e-15", "--max-doublings", "1",
                     "--radial-nodes", "2", "--angular-nodes", "4"});
  CHECK(q.code == kExitNonConvergence);
  const Json e = parse_json(q.err);
  CHECK(e.at("error") == "non_convergence");
  CHECK(e.contains("last_value"));

  // the estimate is still written before the exit code reports the shortfall
  // k = 5, B = 1 needs a few hundred steps
  const Run p = run({"opnorm", "--n", "1", "--k", "5", "--p", "6", "--method", "power", "--B", "1", "--max-iter", "60",
                     "--restarts", "1"});
  CHECK(p.code == kExitNonConvergence);
  CHECK(parse_json(p.err).at("error") == "non_convergence");
  const Json doc = parse_json(p.out);
  CHECK(doc.at("result").at("estimates").size() == 1);
}

TEST_CASE("eigen output round-trips to the constructed eigenfunction") {
  const Run r = run({"eigen", "--n", "2", "--alpha", "1,2", "--beta", "0,1"});
  REQUIRE(r.code == kExitOk);
  const Json res = parse_json(r.out).at("result");
  const EigenLabel l(MultiIndex{1, 2}, MultiIndex{0, 1});
  CHECK(gaussian_from_json(res.at("function")) == build_eigenfunction(l).fn);
  CHECK(label_from_json(res.at("label")) == l);
  CHECK(res.at("eigenvalue") == build_eigenfunction(l).eigenvalue);
  CHECK(exact_value_from_json(res.at("l2_norm_sq")) == exact_l2_norm_sq(l));

  const Run rad = run({"eigen", "--n", "1", "--radial-k", "3"});
  REQUIRE(rad.code == kExitOk);
  CHECK(gaussian_from_json(parse_json(rad.out).at("result").at("function")) == build_radial(1, 3));
}

TEST_CASE("project output round-trips") {
  const fs::path in = scratch("proj.json");
  const GaussianFn g(CPoly::z(2, 0) * CPoly::zbar(2, 1) + CPoly::z(2, 1));
  write_file(in, to_json(g).dump());
  const Run r = run({"project", "--input", in.string(), "--k", "1"});
  REQUIRE(r.code == kExitOk);
  const Json res = parse_json(r.out).at("result");
  const EigenExpansion e = expansion_from_json(res.at("expansion"));
  CHECK(e.reconstruct() == g);
  CHECK(gaussian_from_json(res.at("projection")) == project(g, 1));
}

TEST_CASE("identical configs give byte-identical output files") {
  const fs::path a = scratch("a.csv"), b = scratch("b.csv");
  const std::vector<std::string> base = {"sweep", "--candidate", "power", "--d", "2", "--p", "6", "--k", "1:8",
                                         "--B", "1", "--restarts", "2", "--seed", "11"};
  auto with_output = [&](const fs::path& p) {
    auto args = base;
    args.insert(args.end(), {"--output", p.string()});
    return args;
  };
  REQUIRE(run(with_output(a)).code == kExitOk);
  REQUIRE(run(with_output(b)).code == kExitOk);
  CHECK(read_file(a) == read_file(b));
  CHECK(!read_file(a).empty());
}

TEST_CASE("thread count does not change sweep results") {
  auto rows = [](const std::string& threads) {
    const Run r = run({"sweep", "--candidate", "radial", "--d", "4", "--p", "6", "--k", "1:16", "--threads", threads});
    REQUIRE(r.code == kExitOk);
    CsvTable t = csv(r.out);
    return std::make_pair(t.rows, comment(t, "slope"));
  };
  const auto one = rows("1");
  const auto four = rows("4");
  CHECK(one.first == four.first);
  CHECK(one.second == four.second);
}

TEST_CASE("config merge: defaults < file < subcommand section < flags") {
  const fs::path cfg = scratch("config.json");
  write_file(cfg, R"({"p": "6", "seed": 5, "opnorm": {"k": 3, "method": "zbar"}})");
  const Run r = run({"opnorm", "--config", cfg.string(), "--k", "4"});
  REQUIRE(r.code == kExitOk);
  const Json c = parse_json(r.out).at("config");
  CHECK(c.at("p") == "6");
  CHECK(c.at("seed") == 5);
  CHECK(c.at("method") == "zbar");
  CHECK(c.at("k") == 4);  // flag wins
  CHECK(c.at("radial-nodes") == 8);  // default kept

  write_file(cfg, R"({"no-such-key": 1})");
  CHECK(run({"opnorm", "--config", cfg.string()}).code == kExitValidation);
  write_file(cfg, R"({"k": "four"})");
  CHECK(run({"opnorm", "--config", cfg.string()}).code == kExitValidation);
}

TEST_CASE("opnorm estimates parse back from JSON output") {
  const Run r = run({"opnorm", "--n", "1", "--k", "5", "--p", "6", "--B", "1", "--restarts", "1"});
  REQUIRE(r.code == kExitOk);
  const Json est = parse_json(r.out).at("result").at("estimates");
  REQUIRE(est.size() == 4);
  double zbar = 0, power = 0;
  for (const auto& e : est) {
    const NormEstimate n = norm_estimate_from_json(e);
    if (e.at("kind") == "PowerIterationLowerBound") power = n.value_log;
    if (n.kind == NormEstimate::Kind::CandidateLowerBound && zbar == 0) zbar = n.value_log;
  }
  CHECK(power >= zbar - 1e-9);
}

TEST_CASE("heisenberg and dispersive subcommands") {
  const Run h = run({"heisenberg", "--alpha", "1,1", "--beta", "0,2"});
  REQUIRE(h.code == kExitOk);
  CHECK(parse_json(h.out).at("result").at("all_equal") == true);

  const Run d = run({"dispersive", "--ks", "2,4", "--threads", "2"});
  REQUIRE(d.code == kExitOk);
  const CsvTable t = csv(d.out);
  CHECK(t.rows.size() == 30);
  CHECK(parse_real(comment(t, "sup")) > 0);
}
