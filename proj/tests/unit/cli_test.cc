#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xsdp/cli.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "xsdp");
  std::ostringstream out, err;
  int code = xsdp::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

// synth -> project -> split -> train -> parse -> score inside dir.
std::string pipeline(const fs::path& dir, const std::vector<std::string>& extra_train = {}) {
  fs::remove_all(dir);
  const std::string d = dir.string();
  REQUIRE(cli({"synth", "--out", d + "/corpus", "--sentences", "40", "--min-length", "3", "--max-length", "7",
               "--seed", "5"})
              .code == 0);
  REQUIRE(cli({"intersect", "--forward", d + "/corpus/forward.align", "--backward", d + "/corpus/backward.align",
               "--out", d + "/links.align"})
              .code == 0);
  REQUIRE(cli({"project", "--source", d + "/corpus/source.sdp", "--forward", d + "/corpus/forward.align",
               "--backward", d + "/corpus/backward.align", "--target", d + "/corpus/target.conllu", "--out",
               d + "/proj.sdp", "--densities", d + "/dens.tsv"})
              .code == 0);
  REQUIRE(cli({"split", "--in", d + "/proj.sdp", "--heldout", "0.25", "--train-out", d + "/train.sdp",
               "--heldout-out", d + "/held.sdp", "--seed", "3"})
              .code == 0);
  std::vector<std::string> tr = {"train", "--train", d + "/train.sdp", "--heldout", d + "/held.sdp", "--model",
                                 d + "/model.bin", "--log", d + "/train.log", "--epochs", "2", "--token-budget",
                                 "40", "--word-dim", "8", "--pos-dim", "4", "--char-dim", "4", "--lstm-dim", "8",
                                 "--lstm-layers", "1", "--fnn-dim", "8", "--seed", "9"};
  tr.insert(tr.end(), extra_train.begin(), extra_train.end());
  Run t = cli(tr);
  REQUIRE_MESSAGE(t.code == 0, t.err);
  REQUIRE(cli({"parse", "--model", d + "/model.bin", "--input", d + "/corpus/target.conllu", "--out",
               d + "/pred.sdp"})
              .code == 0);
  Run s = cli({"score", "--pred", d + "/pred.sdp", "--gold", d + "/corpus/target.gold.sdp"});
  REQUIRE(s.code == 0);
  return s.out;
}

}  // namespace

TEST_CASE("help and argument errors") {
  const char* bin = std::getenv("XSDP_CLI");
  if (bin) {
    const std::string b = std::string("\"") + bin + "\"";
    CHECK(std::system((b + " --help > cli_help.txt 2>&1").c_str()) == 0);
    const std::string help = slurp("cli_help.txt");
    for (const char* sub : {"intersect", "project", "sample", "split", "synth", "train", "parse", "score", "analyze",
                            "gradcheck"})
      CHECK(help.find(sub) != std::string::npos);
    CHECK(std::system((b + " train --no-such-flag > cli_help.txt 2>&1").c_str()) != 0);
    CHECK(std::system((b + " > cli_help.txt 2>&1").c_str()) != 0);
    fs::remove("cli_help.txt");
  }
  CHECK(cli({"score", "--help"}).code == 0);
  CHECK(cli({"score", "--bogus"}).code != 0);
  CHECK(cli({"score", "--pred", "a.sdp"}).code != 0);
  Run missing = cli({"score", "--pred", "missing_a.sdp", "--gold", "missing_b.sdp"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("missing_a.sdp") != std::string::npos);
}

TEST_CASE("scoring mismatched corpora fails") {
  spit("cli_a.sdp", "#1\n1\ta\ta\tX\t+\t-\t_\n\n");
  spit("cli_b.sdp", "#1\n1\ta\ta\tX\t+\t-\t_\n2\tb\tb\tX\t-\t-\t_\n\n");
  Run r = cli({"score", "--pred", "cli_a.sdp", "--gold", "cli_b.sdp"});
  CHECK(r.code != 0);
  Run ok = cli({"score", "--pred", "cli_a.sdp", "--gold", "cli_a.sdp", "--format", "table"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("labeled") != std::string::npos);
  fs::remove("cli_a.sdp");
  fs::remove("cli_b.sdp");
}

TEST_CASE("unknown config keys are rejected") {
  spit("cli_bad.json", R"({"network": {"word_dim": 8, "wrod_dim": 9}})");
  Run r = cli({"synth", "--out", "cli_unused", "--config", "cli_bad.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("network.wrod_dim") != std::string::npos);
  spit("cli_bad.json", R"({"train": {"patience": "five"}})");
  r = cli({"synth", "--out", "cli_unused", "--config", "cli_bad.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("train.patience") != std::string::npos);
  CHECK_FALSE(fs::exists("cli_unused"));
  fs::remove("cli_bad.json");
}

TEST_CASE("end-to-end runs are reproducible and leave manifests") {
  const std::string a = pipeline("cli_run_a", {"--tasks", "sem,syn", "--syntax", "cli_run_a/corpus/target.conllu"});
  const std::string b = pipeline("cli_run_b", {"--tasks", "sem,syn", "--syntax", "cli_run_b/corpus/target.conllu"});
  CHECK(a.find("LF=") != std::string::npos);
  CHECK(a == b);
  CHECK(slurp("cli_run_a/model.bin") == slurp("cli_run_b/model.bin"));
  CHECK(slurp("cli_run_a/pred.sdp") == slurp("cli_run_b/pred.sdp"));

  for (const char* m : {"corpus/manifest.json", "links.align.manifest.json", "proj.sdp.manifest.json",
                        "train.sdp.manifest.json", "model.bin.manifest.json", "pred.sdp.manifest.json"})
    CHECK_MESSAGE(fs::exists(fs::path("cli_run_a") / m), m);
  auto manifest = nlohmann::json::parse(slurp("cli_run_a/model.bin.manifest.json"));
  CHECK(manifest["command"] == "train");
  CHECK(manifest["config"]["tasks"] == "sem,syn");
  CHECK(manifest["config"]["network"]["word_dim"] == 8);
  CHECK(manifest["inputs"].size() == 3);
  CHECK(manifest["outputs"].contains("cli_run_a/model.bin"));

  const std::string log = slurp("cli_run_a/train.log");
  CHECK(log.rfind("config=", 0) == 0);
  CHECK(log.find("epoch=2 ") != std::string::npos);
  CHECK(log.find("best_epoch=") != std::string::npos);

  // A second parse with more threads gives the same output.
  REQUIRE(cli({"parse", "--model", "cli_run_a/model.bin", "--input", "cli_run_a/corpus/target.conllu", "--out",
               "cli_run_a/pred4.sdp", "--threads", "4"})
              .code == 0);
  CHECK(slurp("cli_run_a/pred4.sdp") == slurp("cli_run_a/pred.sdp"));

  Run buckets = cli({"analyze", "--gold", "cli_run_a/corpus/target.gold.sdp", "--pred-a", "cli_run_a/pred.sdp",
                     "--buckets"});
  CHECK(buckets.code == 0);
  CHECK(buckets.out.find(">=10") != std::string::npos);
  Run head = cli({"analyze", "--gold", "cli_run_a/corpus/target.gold.sdp", "--pred-a", "cli_run_a/pred.sdp",
                  "--pred-b", "cli_run_b/pred.sdp", "--trees", "cli_run_a/corpus/target.conllu", "--headmatch"});
  CHECK(head.code == 0);
  CHECK(cli({"sample", "--in", "cli_run_a/proj.sdp", "--size", "3", "--out", "cli_run_a/s.sdp"}).code == 1);
  CHECK(cli({"train", "--train", "cli_run_a/train.sdp", "--heldout", "cli_run_a/held.sdp", "--model",
             "cli_run_a/x.bin", "--tasks", "sem,syn"})
            .code == 1);
  fs::remove_all("cli_run_a");
  fs::remove_all("cli_run_b");
}

TEST_CASE("gradcheck subcommand") {
  Run r = cli({"gradcheck", "--dim", "4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("passed=1") != std::string::npos);
}
