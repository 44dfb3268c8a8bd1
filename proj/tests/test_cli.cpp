#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lcflab/cli.hpp"

using namespace lcf::cli;
using nlohmann::json;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/lcflab_test_" + name) {
    std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ostringstream ss;
  ss << std::ifstream(path).rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config: classify flags") {
  const ParseResult res =
      parse_config({"classify", "--dim", "7", "--out", "/tmp/lcflab_r.json"});
  CHECK(res.exit_code == 0);
  CHECK(res.should_run);
  CHECK(res.config.command == "classify");
  CHECK(res.config.dim == 7);
  CHECK(res.config.out_path == "/tmp/lcflab_r.json");
}

TEST_CASE("parse_config: cspace-scan flags and defaults") {
  const ParseResult res =
      parse_config({"cspace-scan", "--spec", LCFLAB_DATA_DIR "/space_form4.json", "--seed", "42"});
  CHECK(res.exit_code == 0);
  CHECK(res.should_run);
  CHECK(res.config.command == "cspace-scan");
  CHECK(res.config.spec_path == LCFLAB_DATA_DIR "/space_form4.json");
  CHECK(res.config.seed == 42);
  CHECK(res.config.steps == 100);  // default untouched
  CHECK(res.config.h == 0.01);
}

TEST_CASE("parse_config: usage errors exit 2") {
  // unknown flag
  CHECK(parse_config({"classify", "--dim", "7", "--frobnicate"}).exit_code == 2);
  // missing required option
  CHECK(parse_config({"classify"}).exit_code == 2);
  CHECK(parse_config({"cspace-scan"}).exit_code == 2);
  // no subcommand
  CHECK(parse_config({}).exit_code == 2);
  // out-of-range dimension
  CHECK(parse_config({"classify", "--dim", "3"}).exit_code == 2);
  // non-numeric value
  CHECK(parse_config({"classify", "--dim", "seven"}).exit_code == 2);
}

TEST_CASE("parse_config: help is exit 0 without running") {
  const ParseResult top = parse_config({"--help"});
  CHECK(top.exit_code == 0);
  CHECK_FALSE(top.should_run);
  CHECK(top.message.find("calibrate") != std::string::npos);

  const ParseResult sub = parse_config({"cspace-scan", "--help"});
  CHECK(sub.exit_code == 0);
  CHECK_FALSE(sub.should_run);
  CHECK(sub.message.find("--geodesics") != std::string::npos);
}

TEST_CASE("parse_config: config file provides values, flags override") {
  TempFile cfg("cli_cfg.ini",
               "[ricci-scan]\n"
               "seed=7\n"
               "tol=0.0001\n");
  // --config is a top-level option, so it precedes the subcommand
  const ParseResult res = parse_config(
      {"--config", cfg.path, "ricci-scan", "--spec",
       LCFLAB_DATA_DIR "/space_form4.json", "--seed", "9"});
  CHECK(res.exit_code == 0);
  CHECK(res.config.seed == 9);     // flag wins
  CHECK(res.config.tol == 0.0001); // file value applied
}

TEST_CASE("run: calibrate writes a passing report") {
  RunConfig cfg;
  cfg.command = "calibrate";
  cfg.out_path = "/tmp/lcflab_cal.json";
  CHECK(run(cfg) == 0);
  const json rep = json::parse(slurp(cfg.out_path));
  CHECK(rep.at("tool") == "lcflab");
  CHECK(rep.at("command") == "calibrate");
  CHECK(rep.at("report").at("pass") == true);
  CHECK(rep.at("report").at("rows").size() >= 5);
  for (const auto& row : rep.at("report").at("rows")) CHECK(row.at("pass") == true);
  std::remove(cfg.out_path.c_str());
}

TEST_CASE("run: check-metric distinguishes lcf from non-lcf") {
  RunConfig cfg;
  cfg.command = "check-metric";
  cfg.spec_path = LCFLAB_DATA_DIR "/space_form4.json";
  cfg.out_path = "/tmp/lcflab_cm.json";
  cfg.points = 5;
  cfg.seed = 2;
  CHECK(run(cfg) == 0);
  const json lcf_rep = json::parse(slurp(cfg.out_path));
  CHECK(lcf_rep.at("report").at("lcf_criterion_applies") == true);
  CHECK(lcf_rep.at("report").at("weyl_max").get<double>() < 1e-4);

  cfg.spec_path = LCFLAB_DATA_DIR "/s2xs2.json";
  CHECK(run(cfg) == 0);
  const json nonlcf = json::parse(slurp(cfg.out_path));
  CHECK(nonlcf.at("report").at("weyl_max").get<double>() > 0.1);
  std::remove(cfg.out_path.c_str());
}

TEST_CASE("run: missing or malformed spec file is a usage error") {
  RunConfig cfg;
  cfg.command = "check-metric";
  cfg.spec_path = "/tmp/lcflab_no_such_file.json";
  CHECK(run(cfg) == 2);

  TempFile bad("bad_spec.json", "{\"kind\": \"flat\", \"dim\": 4, \"oops\": 1}");
  cfg.spec_path = bad.path;
  CHECK(run(cfg) == 2);

  TempFile junk("junk_spec.json", "not json at all");
  cfg.spec_path = junk.path;
  CHECK(run(cfg) == 2);
}

TEST_CASE("run: classify report round-trips through the CLI layer") {
  RunConfig cfg;
  cfg.command = "classify";
  cfg.dim = 5;
  cfg.out_path = "/tmp/lcflab_cls.json";
  CHECK(run(cfg) == 0);
  const json rep = json::parse(slurp(cfg.out_path));
  CHECK(rep.at("command") == "classify");
  CHECK(rep.at("report").at("n") == 5);
  CHECK(rep.at("report").at("undecided").empty());
  CHECK(rep.at("config").at("dim") == 5);
  std::remove(cfg.out_path.c_str());
}

TEST_CASE("run: scan reports carry the reproducibility envelope") {
  RunConfig cfg;
  cfg.command = "ricci-scan";
  cfg.spec_path = LCFLAB_DATA_DIR "/space_form4.json";
  cfg.out_path = "/tmp/lcflab_rs.json";
  cfg.points = 4;
  cfg.seed = 11;
  CHECK(run(cfg) == 0);
  const json rep = json::parse(slurp(cfg.out_path));
  CHECK(rep.at("tool") == "lcflab");
  CHECK(rep.at("version") == kToolVersion);
  CHECK(rep.at("config").at("seed") == 11);
  CHECK(rep.at("config").at("tol").get<double>() > 0.0);
  CHECK(rep.at("report").at("verdict") == "constant");
  std::remove(cfg.out_path.c_str());
}

TEST_CASE("run: identical invocations produce byte-identical reports") {
  RunConfig cfg;
  cfg.command = "cspace-scan";
  cfg.spec_path = LCFLAB_DATA_DIR "/s2xh2.json";
  cfg.seed = 3;
  cfg.geodesics = 2;
  cfg.steps = 20;

  cfg.out_path = "/tmp/lcflab_det_a.json";
  CHECK(run(cfg) == 0);
  cfg.out_path = "/tmp/lcflab_det_b.json";
  CHECK(run(cfg) == 0);
  CHECK(slurp("/tmp/lcflab_det_a.json") == slurp("/tmp/lcflab_det_b.json"));
  std::remove("/tmp/lcflab_det_a.json");
  std::remove("/tmp/lcflab_det_b.json");
}
