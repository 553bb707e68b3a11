#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "netmisfit/cli.hpp"
#include "netmisfit/graph.hpp"

using namespace netmisfit;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("netmisfit_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("sample is deterministic") {
    TempDir dir;
    CHECK(cli({"sample", "--model", "erg", "--scenario", "null", "--n", "50", "--seed", "7", "--out", dir / "a.txt"}).code == 0);
    CHECK(cli({"sample", "--model", "erg", "--scenario", "null", "--n", "50", "--seed", "7", "--out", dir / "b.txt"}).code == 0);
    CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
    const auto meta = nlohmann::json::parse(slurp(dir / "a.txt.meta.json"));
    CHECK(meta["schema_version"] == 1);
    CHECK(meta.contains("alpha"));
  }

  TEST_CASE("sample sbm writes labels") {
    TempDir dir;
    CHECK(cli({"sample", "--model", "sbm", "--n", "90", "--m", "3", "--seed", "1", "--out", dir / "g.txt"}).code == 0);
    std::istringstream labels(slurp(dir / "g.txt.labels"));
    int lines = 0;
    for (std::string line; std::getline(labels, line);) {
      CHECK((line == "1" || line == "2" || line == "3"));
      ++lines;
    }
    CHECK(lines == 90);
    const Graph g = read_graph(dir / "g.txt", dir / "g.txt.labels");
    CHECK(g.n() == 90);
  }

  TEST_CASE("usage errors exit 64") {
    CHECK(cli({"sample", "--model", "erg", "--n", "55", "--scenario", "perturbed", "--out", "/tmp/x"}).code == kExitUsage);
    TempDir dir;
    cli({"sample", "--model", "sbm", "--n", "30", "--m", "2", "--seed", "1", "--out", dir / "g.txt"});
    CHECK(cli({"test", "--model", "sbm", "--graph", dir / "g.txt"}).code == kExitUsage);
    CHECK(cli({"test", "--model", "erg", "--graph", dir / "g.txt", "--mode", "reduced"}).code == kExitUsage);
    CHECK(cli({"bogus"}).code == kExitUsage);
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"--help"}).code == 0);
  }

  TEST_CASE("erg test exit codes and report") {
    TempDir dir;
    cli({"sample", "--model", "erg", "--n", "50", "--alpha", "0.3", "--seed", "3", "--out", dir / "er50.txt"});
    const Run general = cli({"test", "--model", "erg", "--graph", dir / "er50.txt", "--mode", "general"});
    CHECK(general.code == kExitDegenerate);
    const auto j = nlohmann::json::parse(general.out);
    CHECK(j["test"]["decision"] == "Degenerate");
    CHECK(j["test"]["statistic"].is_null());
    CHECK(j["test"]["null_reasons"]["statistic"] == "Degenerate");
    CHECK(j["provenance"]["library_version"] == "0.1.0");
    const Run paper = cli({"test", "--model", "erg", "--graph", dir / "er50.txt", "--mode", "paper"});
    CHECK(paper.code == kExitWellSpecified);
  }

  TEST_CASE("sbm test report") {
    TempDir dir;
    cli({"sample", "--model", "sbm", "--n", "60", "--m", "2", "--seed", "2", "--out", dir / "g.txt"});
    const Run r = cli({"test", "--model", "sbm", "--graph", dir / "g.txt", "--labels", dir / "g.txt.labels"});
    CHECK((r.code == kExitWellSpecified || r.code == kExitMisspecified));
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["diagnostics"]["D_n"].size() == 6);
    CHECK(j["diagnostics"]["V_n"].size() == 6);
    CHECK(j["diagnostics"]["modes"]["paper"]["decision"] == "Degenerate");
    CHECK(j["test"]["dropped_coordinates"].back() == 6);
    const Run vem = cli({"test", "--model", "sbm", "--graph", dir / "g.txt", "--blocks", "2", "--seed", "4"});
    CHECK(vem.code <= kExitDegenerate);
    CHECK(nlohmann::json::parse(vem.out)["fit"]["method"] == "vem");
  }

  TEST_CASE("data errors exit 65 with a JSON error") {
    TempDir dir;
    std::ofstream(dir / "bad.txt") << "3 1\n2 2\n";
    const Run r = cli({"test", "--model", "erg", "--graph", dir / "bad.txt"});
    CHECK(r.code == kExitData);
    CHECK(nlohmann::json::parse(r.out)["error"]["code"] == "SelfLoop");
    CHECK(cli({"test", "--model", "erg", "--graph", dir / "missing.txt"}).code == kExitData);
    std::ofstream(dir / "empty.txt") << "5 0\n";
    CHECK(cli({"test", "--model", "erg", "--graph", dir / "empty.txt"}).code == kExitData);
  }

  TEST_CASE("simulate csv is identical across worker counts") {
    TempDir dir;
    const std::vector<std::string> base{"simulate", "--model", "sbm", "--scenario", "null", "--n", "40",
                                        "--m", "2", "--reps", "10", "--seed", "3"};
    auto with = [&](const std::string& workers, const std::string& csv) {
      auto args = base;
      args.insert(args.end(), {"--workers", workers, "--out-csv", dir / csv});
      return cli(args);
    };
    const Run a = with("1", "a.csv");
    const Run b = with("4", "b.csv");
    CHECK(a.code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
    CHECK(ja["test"] == jb["test"]);
    CHECK(ja["spec"]["replications"] == 10);
  }

  TEST_CASE("NETMISFIT_SEED sets the default seed") {
    TempDir dir;
    ::setenv("NETMISFIT_SEED", "11", 1);
    cli({"sample", "--model", "erg", "--n", "30", "--out", dir / "env.txt"});
    ::unsetenv("NETMISFIT_SEED");
    cli({"sample", "--model", "erg", "--n", "30", "--seed", "11", "--out", dir / "flag.txt"});
    CHECK(slurp(dir / "env.txt") == slurp(dir / "flag.txt"));
    ::setenv("NETMISFIT_SEED", "abc", 1);
    CHECK(cli({"sample", "--model", "erg", "--n", "30", "--out", dir / "x.txt"}).code == kExitUsage);
    ::unsetenv("NETMISFIT_SEED");
  }
}
