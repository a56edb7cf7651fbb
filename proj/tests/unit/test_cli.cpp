#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "generators.hpp"
#include "ldwb/cli.hpp"
#include "ldwb/corpus.hpp"
#include "ldwb/knowledge.hpp"
#include "ldwb/text.hpp"

using namespace ldwb;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = LDWB_SOURCE_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Workspace {
  fs::path dir;
  fs::path config;

  Workspace(const std::string& name, const std::string& corpus, const std::string& parses = "") {
    dir = fs::temp_directory_path() / ("ldwb_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    nlohmann::json paths = {{"corpus", corpus}, {"output", (dir / "out").string()}};
    if (!parses.empty()) paths["parses"] = parses;
    config = dir / "workbench.json";
    std::ofstream(config) << nlohmann::json{{"paths", paths}, {"layout", kRoot + "/data/sample/layout.json"}}.dump();
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path out(const std::string& rel) const { return dir / "out" / rel; }
};

std::map<std::string, std::string> golden(const std::string& file) {
  std::map<std::string, std::string> out;
  for (const auto& l : lines(kRoot + "/tests/fixtures/" + file)) out[l.substr(0, l.find('\t'))] = l.substr(l.find('\t') + 1);
  return out;
}

}  // namespace

TEST_CASE("unknown subcommand and usage errors exit 2") {
  auto r = run({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  CHECK(r.err.find("Subcommands:") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"assemble", "--repr", "xml"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--config", "/nonexistent.json", "ingest"}).code == 2);
}

TEST_CASE("split on an 800-dialogue corpus is 640/80/80, disjoint, reproducible") {
  auto corpus_path = fs::temp_directory_path() / "ldwb_cli_800.jsonl";
  {
    std::ofstream out(corpus_path);
    corpus::write_corpus(out, gen::corpus(800, 21));
  }
  Workspace ws("split", corpus_path.string());
  const auto start = std::chrono::steady_clock::now();
  auto r = run({"--config", ws.config.string(), "split"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(r.code == 0);
  CHECK(r.out == "train\t640\nvalid\t80\ntest\t80\n");
  CHECK(secs < 1.0);
  auto train = lines(ws.out("split/train.ids"));
  auto valid = lines(ws.out("split/valid.ids"));
  auto test = lines(ws.out("split/test.ids"));
  std::set<std::string> all(train.begin(), train.end());
  all.insert(valid.begin(), valid.end());
  all.insert(test.begin(), test.end());
  CHECK(all.size() == 800);
  const auto first = slurp(ws.out("split/train.ids")) + slurp(ws.out("split/test.ids"));
  REQUIRE(run({"--config", ws.config.string(), "split"}).code == 0);
  CHECK(slurp(ws.out("split/train.ids")) + slurp(ws.out("split/test.ids")) == first);

  REQUIRE(run({"--config", ws.config.string(), "subsets"}).code == 0);
  CHECK(lines(ws.out("subsets/train_0.25.ids")).size() == 160);
  CHECK(lines(ws.out("subsets/train_1.ids")).size() == 640);
  fs::remove(corpus_path);
}

TEST_CASE("represent reproduces the reference goldens on the shipped fixture") {
  Workspace ws("represent", kRoot + "/data/sample/corpus.jsonl", kRoot + "/data/sample/parses.conllu");
  for (const auto& [repr, file] : {std::pair{"psg", "sample_psg_golden.tsv"}, {"boh", "sample_boh_golden.tsv"}}) {
    auto r = run({"--config", ws.config.string(), "represent", "--repr", repr});
    REQUIRE(r.code == 0);
    CHECK(r.out == std::string(repr) + "\t20 records\n");
    auto expected = golden(file);
    auto records = knowledge::load_knowledge(ws.out(std::string("knowledge/") + repr + ".jsonl"));
    REQUIRE(records.size() == 20);
    for (const auto& rec : records) {
      CAPTURE(rec.dialogue_id);
      std::string text;
      if (auto* l = std::get_if<knowledge::LinearizedGraph>(&rec.knowledge)) text = l->text;
      if (auto* h = std::get_if<knowledge::HeadNounKnowledge>(&rec.knowledge)) text = text::join(h->lemmas, " ");
      CHECK(text == expected.at(rec.dialogue_id));
    }
  }
}

TEST_CASE("pipeline commands write their outputs and are idempotent") {
  Workspace ws("pipeline", kRoot + "/data/sample/corpus.jsonl", kRoot + "/data/sample/parses.conllu");
  const std::vector<std::vector<std::string>> steps = {
      {"ingest"},
      {"split"},
      {"parse-check"},
      {"represent", "--repr", "raw"},
      {"assemble", "--profile", "decoder", "--repr", "psg"},
      {"assemble", "--window", "4", "--repr", "boh", "--split", "test"},
  };
  std::map<std::string, std::string> first;
  for (int round = 0; round < 2; ++round) {
    for (auto args : steps) {
      args.insert(args.begin(), {"--config", ws.config.string()});
      auto r = run(args);
      CAPTURE(args[2]);
      CHECK(r.code == 0);
      CHECK(r.err.empty());
    }
    for (const auto& e : fs::recursive_directory_iterator(ws.dir / "out")) {
      if (!e.is_regular_file()) continue;
      auto content = slurp(e.path());
      if (round == 0) {
        first[e.path().string()] = content;
      } else {
        CHECK(first.at(e.path().string()) == content);
      }
    }
  }
  CHECK(first.count(ws.out("ingest.json").string()));
  auto decoder = knowledge::load_input_sequences(ws.out("inputs/psg_w2_all.jsonl"));
  CHECK(decoder.size() == 45);
  CHECK(fs::exists(ws.out("inputs/boh_w4_test.jsonl")));
  auto ingest = nlohmann::json::parse(slurp(ws.out("ingest.json")));
  CHECK(ingest["dialogues"] == 20);
  CHECK(ingest["samples"]["decoder"]["samples"] == 45);
}

TEST_CASE("data errors exit 1 with a located message") {
  auto corpus_path = fs::temp_directory_path() / "ldwb_cli_bad.jsonl";
  std::ofstream(corpus_path) << "{\"schema\":\"ldwb.corpus\",\"version\":1}\n{\"dialogue_id\": 3}\n";
  Workspace ws("bad", corpus_path.string());
  auto r = run({"--config", ws.config.string(), "ingest"});
  CHECK(r.code == 1);
  CHECK(r.err.find(corpus_path.string() + ":2:") != std::string::npos);
  auto missing = run({"--config", ws.config.string(), "represent", "--repr", "psg"});
  CHECK(missing.code != 0);
  fs::remove(corpus_path);
}

TEST_CASE("parse-check reports uncovered turns") {
  auto parses = fs::temp_directory_path() / "ldwb_cli_partial.conllu";
  {
    // keep only the first sentence block of the fixture
    const auto all = slurp(kRoot + "/data/sample/parses.conllu");
    std::ofstream(parses) << all.substr(0, all.find("\n\n") + 2);
  }
  Workspace ws("partial", kRoot + "/data/sample/corpus.jsonl", parses.string());
  auto r = run({"--config", ws.config.string(), "parse-check"});
  CHECK(r.code == 1);
  CHECK(r.out.find("missing\t") != std::string::npos);
  fs::remove(parses);
}

TEST_CASE("validate counts records and locates schema violations") {
  const auto corpus = kRoot + "/data/sample/corpus.jsonl";
  auto ok = run({"validate", "--kind", "corpus", corpus});
  CHECK(ok.code == 0);
  CHECK(ok.out == corpus + "\tcorpus\t" + std::to_string(corpus::load_corpus(corpus).size()) + "\n");

  auto wrong_kind = run({"validate", "--kind", "scoring", corpus});
  CHECK(wrong_kind.code == 1);
  CHECK(wrong_kind.err.find("schema mismatch") != std::string::npos);

  auto bad = fs::temp_directory_path() / "ldwb_cli_bad_scoring.jsonl";
  std::ofstream(bad) << "{\"schema\":\"ldwb.scoring\",\"version\":1}\n"
                     << "{\"sample_id\":\"s\",\"model_id\":\"m\",\"target_tokens\":[\"a\",\"b\"],\"token_nll\":[1.0]}\n";
  auto mismatch = run({"validate", "--kind", "scoring", bad.string()});
  CHECK(mismatch.code == 1);
  CHECK(mismatch.err.find(bad.string() + ":2:") != std::string::npos);
  fs::remove(bad);

  CHECK(run({"validate", "--kind", "nonsense", corpus}).code == 2);
}
