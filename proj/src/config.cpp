#include "ldwb/config.hpp"

#include <cstdlib>
#include <fstream>

#include "ldwb/error.hpp"

namespace ldwb::config {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("must be an object");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw UsageError("config " + where_ + ": " + msg); }

  void only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, _] : j_.items()) {
      bool ok = false;
      for (auto a : keys) ok = ok || a == k;
      if (!ok) throw UsageError("config " + where_ + ": unknown key '" + k + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const { return j_.at(key); }
  Reader child(const char* key) const { return Reader(j_.at(key), where_ + "." + key); }

  std::string str(const char* key) const {
    if (!j_.at(key).is_string()) fail("'" + std::string(key) + "' must be a string");
    return j_.at(key).get<std::string>();
  }
  double num(const char* key) const {
    if (!j_.at(key).is_number()) fail("'" + std::string(key) + "' must be a number");
    return j_.at(key).get<double>();
  }
  std::uint64_t uint(const char* key) const {
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      fail("'" + std::string(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::size_t positive(const char* key) const {
    auto v = uint(key);
    if (v == 0) fail("'" + std::string(key) + "' must be positive");
    return static_cast<std::size_t>(v);
  }
  bool boolean(const char* key) const {
    if (!j_.at(key).is_boolean()) fail("'" + std::string(key) + "' must be a boolean");
    return j_.at(key).get<bool>();
  }
  const json& value() const { return j_; }

 private:
  const json& j_;
  std::string where_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

}  // namespace

WorkbenchConfig from_json(const json& j, const std::filesystem::path& base) {
  WorkbenchConfig c;
  Reader r(j, "root");
  r.only({"paths", "split", "windows", "representation", "layout", "psg", "bleu", "subsets", "attribution", "campaign",
          "service"});
  if (r.has("paths")) {
    auto p = r.child("paths");
    p.only({"corpus", "parses", "output"});
    if (p.has("corpus")) c.paths.corpus = resolve(base, p.str("corpus"));
    if (p.has("parses")) c.paths.parses = resolve(base, p.str("parses"));
    if (p.has("output")) c.paths.output = resolve(base, p.str("output"));
  }
  if (r.has("split")) {
    auto s = r.child("split");
    s.only({"fractions", "seed"});
    if (s.has("fractions")) {
      auto f = s.child("fractions");
      f.only({"train", "valid", "test"});
      if (f.has("train")) c.split.fractions.train = f.num("train");
      if (f.has("valid")) c.split.fractions.valid = f.num("valid");
      if (f.has("test")) c.split.fractions.test = f.num("test");
    }
    if (s.has("seed")) c.split.seed = s.uint("seed");
  }
  if (r.has("windows")) {
    auto w = r.child("windows");
    c.windows.clear();
    for (const auto& [k, _] : w.value().items()) c.windows[k] = w.positive(k.c_str());
  }
  if (r.has("representation")) {
    try {
      c.representation = knowledge::parse_repr(r.str("representation"));
    } catch (const DataError& e) {
      r.fail(e.what());
    }
  }
  if (r.has("layout")) {
    try {
      if (r.at("layout").is_string()) {
        c.layout = knowledge::load_layout(resolve(base, r.str("layout")));
      } else {
        c.layout = knowledge::layout_from_json(r.at("layout"));
      }
    } catch (const DataError& e) {
      r.fail(std::string("layout: ") + e.what());
    }
  }
  if (r.has("psg")) {
    auto p = r.child("psg");
    p.only({"participants", "require_both_roles"});
    if (p.has("participants")) {
      auto m = p.str("participants");
      if (m == "lemma") {
        c.psg.participants = knowledge::ParticipantMode::Lemma;
      } else if (m == "subtree") {
        c.psg.participants = knowledge::ParticipantMode::Subtree;
      } else {
        p.fail("participants must be 'lemma' or 'subtree'");
      }
    }
    if (p.has("require_both_roles")) c.psg.require_both_roles = p.boolean("require_both_roles");
  }
  if (r.has("bleu")) {
    auto b = r.child("bleu");
    b.only({"smoothing", "epsilon", "pooling"});
    if (b.has("smoothing")) {
      auto s = b.str("smoothing");
      if (s == "add_epsilon") {
        c.bleu.smoothing = metrics::Smoothing::AddEpsilon;
      } else if (s == "none") {
        c.bleu.smoothing = metrics::Smoothing::None;
      } else {
        b.fail("smoothing must be 'add_epsilon' or 'none'");
      }
    }
    if (b.has("epsilon")) c.bleu.epsilon = b.num("epsilon");
    if (!(c.bleu.epsilon > 0.0 && c.bleu.epsilon <= 1.0)) b.fail("epsilon must lie in (0, 1]");
    if (b.has("pooling")) {
      auto s = b.str("pooling");
      if (s == "sentence") {
        c.bleu.pooling = metrics::Pooling::Sentence;
      } else if (s == "corpus") {
        c.bleu.pooling = metrics::Pooling::Corpus;
      } else {
        b.fail("pooling must be 'sentence' or 'corpus'");
      }
    }
  }
  if (r.has("subsets")) {
    auto s = r.child("subsets");
    s.only({"fractions", "seed"});
    if (s.has("fractions")) {
      if (!s.at("fractions").is_array() || s.at("fractions").empty()) s.fail("fractions must be a non-empty array");
      c.subsets.fractions.clear();
      for (const auto& f : s.at("fractions")) {
        if (!f.is_number()) s.fail("fractions must be numbers");
        c.subsets.fractions.push_back(f.get<double>());
      }
    }
    if (s.has("seed")) c.subsets.seed = s.uint("seed");
  }
  if (r.has("attribution")) {
    auto a = r.child("attribution");
    a.only({"top_fraction", "pooling", "exclude_tags"});
    if (a.has("top_fraction")) c.attribution.top_fraction = a.num("top_fraction");
    if (!(c.attribution.top_fraction > 0.0 && c.attribution.top_fraction <= 1.0)) a.fail("top_fraction must lie in (0, 1]");
    if (a.has("pooling")) {
      auto s = a.str("pooling");
      if (s == "mean") {
        c.attribution.pooling = attribution::SharePooling::MeanOfRecords;
      } else if (s == "pooled") {
        c.attribution.pooling = attribution::SharePooling::Pooled;
      } else {
        a.fail("pooling must be 'mean' or 'pooled'");
      }
    }
    if (a.has("exclude_tags")) c.attribution.exclude_tags = a.boolean("exclude_tags");
  }
  if (r.has("campaign")) {
    auto h = r.child("campaign");
    h.only({"raters_per_item", "histories_per_worker", "candidates_per_history", "qualification_size",
            "qualification_threshold"});
    if (h.has("raters_per_item")) c.campaign.raters_per_item = h.positive("raters_per_item");
    if (h.has("histories_per_worker")) c.campaign.histories_per_worker = h.positive("histories_per_worker");
    if (h.has("candidates_per_history")) c.campaign.candidates_per_history = h.positive("candidates_per_history");
    if (h.has("qualification_size")) c.campaign.qualification_size = h.positive("qualification_size");
    if (h.has("qualification_threshold")) c.campaign.qualification_threshold = h.num("qualification_threshold");
    c.campaign.validate();
  }
  if (r.has("service")) {
    auto s = r.child("service");
    s.only({"host", "port", "state_dir"});
    if (s.has("host")) c.service.host = s.str("host");
    if (s.has("port")) {
      auto p = s.uint("port");
      if (p > 65535) s.fail("port out of range");
      c.service.port = static_cast<int>(p);
    }
    if (s.has("state_dir")) c.service.state_dir = s.str("state_dir");
  }
  return c;
}

WorkbenchConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

json to_json(const WorkbenchConfig& c) {
  json windows = json::object();
  for (const auto& [k, v] : c.windows) windows[k] = v;
  return {
      {"paths", {{"corpus", c.paths.corpus.string()}, {"parses", c.paths.parses.string()}, {"output", c.paths.output.string()}}},
      {"split",
       {{"fractions", {{"train", c.split.fractions.train}, {"valid", c.split.fractions.valid}, {"test", c.split.fractions.test}}},
        {"seed", c.split.seed}}},
      {"windows", windows},
      {"representation", knowledge::to_string(c.representation)},
      {"layout", knowledge::layout_to_json(c.layout)},
      {"psg",
       {{"participants", c.psg.participants == knowledge::ParticipantMode::Lemma ? "lemma" : "subtree"},
        {"require_both_roles", c.psg.require_both_roles}}},
      {"bleu",
       {{"smoothing", c.bleu.smoothing == metrics::Smoothing::AddEpsilon ? "add_epsilon" : "none"},
        {"epsilon", c.bleu.epsilon},
        {"pooling", c.bleu.pooling == metrics::Pooling::Sentence ? "sentence" : "corpus"}}},
      {"subsets", {{"fractions", c.subsets.fractions}, {"seed", c.subsets.seed}}},
      {"attribution",
       {{"top_fraction", c.attribution.top_fraction},
        {"pooling", c.attribution.pooling == attribution::SharePooling::MeanOfRecords ? "mean" : "pooled"},
        {"exclude_tags", c.attribution.exclude_tags}}},
      {"campaign",
       {{"raters_per_item", c.campaign.raters_per_item},
        {"histories_per_worker", c.campaign.histories_per_worker},
        {"candidates_per_history", c.campaign.candidates_per_history},
        {"qualification_size", c.campaign.qualification_size},
        {"qualification_threshold", c.campaign.qualification_threshold}}},
      {"service", {{"host", c.service.host}, {"port", c.service.port}, {"state_dir", c.service.state_dir.string()}}},
  };
}

void apply_env(WorkbenchConfig& c) {
  if (const char* v = std::getenv("LDWB_CORPUS"); v && *v) c.paths.corpus = v;
  if (const char* v = std::getenv("LDWB_PARSES"); v && *v) c.paths.parses = v;
  if (const char* v = std::getenv("LDWB_OUTPUT"); v && *v) c.paths.output = v;
}

}  // namespace ldwb::config
