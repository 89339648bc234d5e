// End-to-end contract tests for the command-line front end: exit codes,
// artifact layout, determinism, and the degenerate-input behaviors.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kCli = BEAMNF_CLI_PATH;

int run_cli(const std::string& args, std::string* err_out = nullptr) {
  const std::string err_path = "/tmp/beamnf_cli_stderr.txt";
  const std::string cmd = kCli + " " + args + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  if (err_out) {
    std::ifstream f(err_path);
    std::stringstream ss;
    ss << f.rdbuf();
    *err_out = ss.str();
  }
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::path("/tmp") / ("beamnf_cli_" + name);
  fs::remove_all(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("bounds suite passes and reports every check") {
  const auto out = fresh_dir("bounds");
  const int rc = run_cli("bounds --out " + out.string());
  CHECK(rc == 0);
  const std::string text = slurp(out / "bounds.jsonl");
  CHECK(text.rfind("{\"config\":", 0) == 0);
  CHECK(text.find("\"suite_pass\":true") != std::string::npos);
  CHECK(text.find("\"lemma\":\"exp-sum\"") != std::string::npos);
  CHECK(text.find("\"lemma\":\"off-diag-op\"") != std::string::npos);
  CHECK(text.find("\"lemma\":\"compound-weight\"") != std::string::npos);
}

TEST_CASE("nominal run: artifacts present, verify consumes them") {
  const auto out1 = fresh_dir("run1");
  CHECK(run_cli("run --out " + out1.string()) == 0);

  for (const char* name :
       {"report.jsonl", "embedding_samples.csv", "state_v0.txt",
        "state_v1.txt", "state_v2.txt", "state_v3.txt"}) {
    CHECK(fs::exists(out1 / name));
  }
  const std::string rep1 = slurp(out1 / "report.jsonl");
  CHECK(rep1.rfind("{\"config\":", 0) == 0);
  CHECK(rep1.find("\"kind\":\"step\"") != std::string::npos);

  const int rc = run_cli("verify --out " + out1.string());
  CHECK(rc == 0);
  const std::string ver = slurp(out1 / "verify.jsonl");
  CHECK(ver.find("\"sup_residual\":") != std::string::npos);
  CHECK(ver.find("\"max_dev\":") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  const fs::path cfgp = "/tmp/beamnf_cli_det.json";
  write_file(cfgp, R"({
    "b": [1, 2], "v_max": 2, "n_t": 65,
    "forcing": {"cos": [[1.0, 0.5, 0.25, 0.125], [0.5, 0.25, 0.125, 0.0625]]}
  })");
  const auto d1 = fresh_dir("det1");
  const auto d2 = fresh_dir("det2");
  const std::string base = "run --config " + cfgp.string() + " --out ";
  CHECK(run_cli(base + d1.string()) == 0);
  const std::string rep_first = slurp(d1 / "report.jsonl");
  const std::string emb_first = slurp(d1 / "embedding_samples.csv");
  CHECK(run_cli(base + d1.string()) == 0);  // rerun into the same directory
  CHECK(slurp(d1 / "report.jsonl") == rep_first);
  CHECK(slurp(d1 / "embedding_samples.csv") == emb_first);

  // Across directories only the config echo (out_dir) may differ.
  CHECK(run_cli(base + d2.string()) == 0);
  const auto after_header = [](const std::string& s) {
    return s.substr(s.find('\n') + 1);
  };
  CHECK(after_header(slurp(d2 / "report.jsonl")) == after_header(rep_first));
  CHECK(after_header(slurp(d2 / "embedding_samples.csv")) ==
        after_header(emb_first));
}

TEST_CASE("resonant frequency: distinct exit code, partial reports kept") {
  const auto out = fresh_dir("resonant");
  const fs::path cfgp = "/tmp/beamnf_cli_resonant.json";
  write_file(cfgp, R"({
    "b": [1], "v_max": 1,
    "omega": {"source": "explicit", "values": [1.0]},
    "forcing": {"cos": [[1.0, 0, 0, 0]]}
  })");
  const int rc =
      run_cli("run --config " + cfgp.string() + " --out " + out.string());
  CHECK(rc == 3);
  const std::string rep = slurp(out / "report.jsonl");
  CHECK(rep.find("\"kind\":\"split\"") != std::string::npos);
  CHECK(rep.find("resonant-parameter") != std::string::npos);
  CHECK(rep.find("\"k\":") != std::string::npos);
}

TEST_CASE("config errors: itemized, exit 2") {
  std::string err;
  SUBCASE("missing forcing table") {
    const fs::path cfgp = "/tmp/beamnf_cli_noforce.json";
    write_file(cfgp, R"({"eps": 1e-5})");
    CHECK(run_cli("run --config " + cfgp.string(), &err) == 2);
    CHECK(err.find("forcing") != std::string::npos);
  }
  SUBCASE("invalid field values are all listed") {
    const fs::path cfgp = "/tmp/beamnf_cli_bad.json";
    write_file(cfgp, R"({"m": -2, "rho": 7, "forcing": {"cos": [[1,0,0,0]]}})");
    CHECK(run_cli("run --config " + cfgp.string(), &err) == 2);
    CHECK(err.find("m:") != std::string::npos);
    CHECK(err.find("rho:") != std::string::npos);
  }
  SUBCASE("unreadable config path") {
    CHECK(run_cli("run --config /tmp/no_such_beamnf.json", &err) == 2);
    CHECK(err.find("not readable") != std::string::npos);
  }
  SUBCASE("malformed epsilon grid") {
    CHECK(run_cli("measure --epsilon-grid 1e-4,banana", &err) == 2);
    CHECK(err.find("banana") != std::string::npos);
  }
  SUBCASE("unknown flag") {
    CHECK(run_cli("run --frobnicate", &err) == 2);
  }
  SUBCASE("missing subcommand") {
    CHECK(run_cli("", &err) == 2);
  }
}

TEST_CASE("sweep: grid size gate, fit line, zero-forcing degeneracy") {
  const fs::path cfgp = "/tmp/beamnf_cli_sweep.json";
  write_file(cfgp, R"({
    "b": [1, 2], "v_max": 1, "n_t": 65,
    "forcing": {"cos": [[1.0, 0.5, 0.25, 0.125], [0.5, 0.25, 0.125, 0.0625]]}
  })");
  std::string err;

  SUBCASE("two points are rejected") {
    CHECK(run_cli("sweep --config " + cfgp.string() +
                      " --epsilon-grid 1e-5,1e-4",
                  &err) == 2);
    CHECK(err.find("3 grid points") != std::string::npos);
  }

  SUBCASE("three points produce a fitted slope") {
    const auto out = fresh_dir("sweep");
    CHECK(run_cli("sweep --config " + cfgp.string() +
                  " --epsilon-grid 1e-6,1e-5,1e-4 --out " + out.string()) ==
          0);
    const std::string text = slurp(out / "sweep.jsonl");
    CHECK(text.find("\"status\":\"ok\"") != std::string::npos);
    CHECK(text.find("\"slope_q\":") != std::string::npos);
    CHECK(text.find("\"slope_q\":null") == std::string::npos);
  }

  SUBCASE("all-zero forcing reports slopes as undefined") {
    const fs::path zp = "/tmp/beamnf_cli_sweep_zero.json";
    write_file(zp, R"({
      "b": [1, 2], "v_max": 1, "n_t": 65,
      "forcing": {"cos": [[0, 0, 0, 0], [0, 0, 0, 0]]}
    })");
    const auto out = fresh_dir("sweep_zero");
    CHECK(run_cli("sweep --config " + zp.string() +
                  " --epsilon-grid 1e-6,1e-5,1e-4 --out " + out.string()) ==
          0);
    const std::string text = slurp(out / "sweep.jsonl");
    CHECK(text.find("\"slope_q\":null") != std::string::npos);
    CHECK(text.find("undefined") != std::string::npos);
  }
}

TEST_CASE("measure command writes the CSV with the config header") {
  const fs::path cfgp = "/tmp/beamnf_cli_measure.json";
  write_file(cfgp, R"({
    "b": [1, 2], "v_max": 2, "samples": 200, "k_meas": 4,
    "forcing": {"cos": [[1.0, 0, 0, 0]]}
  })");
  const auto out = fresh_dir("measure");
  CHECK(run_cli("measure --config " + cfgp.string() + " --epsilon-grid 1e-4" +
                " --out " + out.string()) == 0);
  const std::string text = slurp(out / "measure.csv");
  CHECK(text.rfind("# {\"config\":", 0) == 0);
  CHECK(text.find("eps,samples,excluded_count,fraction,ci_low,ci_high") !=
        std::string::npos);
}

TEST_CASE("verify without artifacts: itemized, exit 5") {
  const auto out = fresh_dir("verify_missing");
  std::string err;
  CHECK(run_cli("verify --out " + out.string(), &err) == 5);
  CHECK(err.find("report.jsonl") != std::string::npos);
  CHECK(err.find("state_v") != std::string::npos);
}
