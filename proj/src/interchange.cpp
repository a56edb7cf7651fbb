#include "ldwb/interchange.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <utility>

#include "ldwb/error.hpp"
#include "ldwb/jsonl.hpp"

namespace ldwb::interchange {

using jsonl::json;

namespace {

using Key = std::pair<std::string, std::string>;

void check_unique(std::set<Key>& keys, const jsonl::Record& rec, const std::string& sample, const std::string& model) {
  if (!keys.insert({sample, model}).second) {
    rec.fail("duplicate (sample_id, model_id) = ('" + sample + "', '" + model + "')");
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<GenerationRecord> read_generations(std::istream& in, std::string_view source) {
  std::vector<GenerationRecord> out;
  std::set<Key> keys;
  for (const auto& line : jsonl::read(in, kGenerationSchema, source)) {
    jsonl::Record rec(line.value, source, line.number);
    rec.only_keys({"sample_id", "model_id", "response_text"});
    GenerationRecord r{rec.non_empty_string("sample_id"), rec.non_empty_string("model_id"),
                       rec.non_empty_string("response_text"), line.number};
    check_unique(keys, rec, r.sample_id, r.model_id);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScoringRecord> read_scoring(std::istream& in, std::string_view source) {
  std::vector<ScoringRecord> out;
  std::set<Key> keys;
  for (const auto& line : jsonl::read(in, kScoringSchema, source)) {
    jsonl::Record rec(line.value, source, line.number);
    rec.only_keys({"sample_id", "model_id", "target_tokens", "token_nll"});
    ScoringRecord r;
    r.sample_id = rec.non_empty_string("sample_id");
    r.model_id = rec.non_empty_string("model_id");
    r.line = line.number;
    for (const auto& t : rec.array("target_tokens")) {
      if (!t.is_string()) rec.fail("target_tokens must be strings");
      r.target_tokens.push_back(t.get<std::string>());
    }
    for (const auto& v : rec.array("token_nll")) {
      if (!v.is_number()) rec.fail("token_nll must be numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x) || x < 0.0) rec.fail("token_nll values must be finite and non-negative");
      r.token_nll.push_back(x);
    }
    if (r.target_tokens.empty()) rec.fail("target_tokens must be non-empty");
    if (r.target_tokens.size() != r.token_nll.size()) {
      rec.fail("length mismatch: " + std::to_string(r.target_tokens.size()) + " target_tokens vs " +
               std::to_string(r.token_nll.size()) + " token_nll");
    }
    check_unique(keys, rec, r.sample_id, r.model_id);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AttributionRecord> read_attributions(std::istream& in, std::string_view source) {
  std::vector<AttributionRecord> out;
  std::set<Key> keys;
  for (const auto& line : jsonl::read(in, kAttributionSchema, source)) {
    jsonl::Record rec(line.value, source, line.number);
    rec.only_keys({"sample_id", "model_id", "tokens"});
    AttributionRecord r;
    r.sample_id = rec.non_empty_string("sample_id");
    r.model_id = rec.non_empty_string("model_id");
    r.line = line.number;
    for (const auto& t : rec.array("tokens")) {
      auto tr = rec.child(t);
      tr.only_keys({"text", "segment", "role", "upos", "score"});
      AttributionToken tok;
      tok.text = tr.non_empty_string("text");
      try {
        tok.segment = knowledge::parse_segment(tr.string("segment"));
        tok.role = knowledge::parse_role(tr.string("role"));
      } catch (const DataError& e) {
        rec.fail(e.what());
      }
      if (tr.has("upos") && !tr.at("upos").is_null()) tok.upos = tr.string("upos");
      tok.score = tr.number("score");
      if (!std::isfinite(tok.score)) rec.fail("attribution scores must be finite");
      r.tokens.push_back(std::move(tok));
    }
    if (r.tokens.empty()) rec.fail("tokens must be non-empty");
    check_unique(keys, rec, r.sample_id, r.model_id);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GenerationRecord> load_generations(const std::filesystem::path& path) {
  auto in = open(path);
  return read_generations(in, path.string());
}

std::vector<ScoringRecord> load_scoring(const std::filesystem::path& path) {
  auto in = open(path);
  return read_scoring(in, path.string());
}

std::vector<AttributionRecord> load_attributions(const std::filesystem::path& path) {
  auto in = open(path);
  return read_attributions(in, path.string());
}

RecordList read_records(const std::filesystem::path& path, Kind kind) {
  switch (kind) {
    case Kind::Generation: return load_generations(path);
    case Kind::Scoring: return load_scoring(path);
    case Kind::Attribution: return load_attributions(path);
  }
  throw UsageError("unknown record kind");
}

void write_generations(std::ostream& out, const std::vector<GenerationRecord>& records) {
  jsonl::write_header(out, kGenerationSchema);
  for (const auto& r : records) {
    jsonl::write_line(out, {{"sample_id", r.sample_id}, {"model_id", r.model_id}, {"response_text", r.response_text}});
  }
}

void write_scoring(std::ostream& out, const std::vector<ScoringRecord>& records) {
  jsonl::write_header(out, kScoringSchema);
  for (const auto& r : records) {
    jsonl::write_line(out, {{"sample_id", r.sample_id},
                            {"model_id", r.model_id},
                            {"target_tokens", r.target_tokens},
                            {"token_nll", r.token_nll}});
  }
}

void write_attributions(std::ostream& out, const std::vector<AttributionRecord>& records) {
  jsonl::write_header(out, kAttributionSchema);
  for (const auto& r : records) {
    json toks = json::array();
    for (const auto& t : r.tokens) {
      json tj{{"text", t.text},
              {"segment", knowledge::to_string(t.segment)},
              {"role", knowledge::to_string(t.role)},
              {"score", t.score}};
      if (t.upos) tj["upos"] = *t.upos;
      toks.push_back(std::move(tj));
    }
    jsonl::write_line(out, {{"sample_id", r.sample_id}, {"model_id", r.model_id}, {"tokens", std::move(toks)}});
  }
}

const AttributionRecord& align_attribution(const AttributionRecord& record, const knowledge::InputSequence& seq) {
  const std::string where = "attribution for '" + record.sample_id + "' (model '" + record.model_id + "')" +
                            (record.line ? " at line " + std::to_string(record.line) : std::string());
  if (record.sample_id != seq.sample_id) {
    throw DataError(where + ": sample_id differs from input sequence '" + seq.sample_id + "'");
  }
  if (record.tokens.size() != seq.tokens.size()) {
    throw DataError(where + ": " + std::to_string(record.tokens.size()) + " tokens, input sequence has " +
                    std::to_string(seq.tokens.size()));
  }
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const auto& a = record.tokens[i];
    const auto& b = seq.tokens[i];
    if (a.text != b.text) {
      throw DataError(where + ": token " + std::to_string(i) + " text '" + a.text + "' != '" + b.text + "'");
    }
    if (a.segment != b.segment) {
      throw DataError(where + ": token " + std::to_string(i) + " segment " + std::string(knowledge::to_string(a.segment)) +
                      " != " + std::string(knowledge::to_string(b.segment)));
    }
  }
  return record;
}

void align_all(const std::vector<AttributionRecord>& records, const std::vector<knowledge::InputSequence>& seqs) {
  std::unordered_map<std::string, const knowledge::InputSequence*> by_id;
  for (const auto& s : seqs) by_id.emplace(s.sample_id, &s);
  for (const auto& r : records) {
    auto it = by_id.find(r.sample_id);
    if (it == by_id.end()) {
      throw DataError("attribution for unknown sample '" + r.sample_id + "'" +
                      (r.line ? " at line " + std::to_string(r.line) : std::string()));
    }
    align_attribution(r, *it->second);
  }
}

}  // namespace ldwb::interchange
