#include "ldwb/corpus.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <algorithm>
#include <unordered_set>

#include "ldwb/error.hpp"
#include "ldwb/jsonl.hpp"
#include "ldwb/text.hpp"

namespace ldwb::corpus {

using jsonl::json;

std::string_view to_string(Speaker s) { return s == Speaker::User ? "user" : "agent"; }

Speaker parse_speaker(std::string_view s) {
  if (s == "user") return Speaker::User;
  if (s == "agent") return Speaker::Agent;
  throw DataError("unknown speaker '" + std::string(s) + "'");
}

namespace {

// Slack for products like 0.29 * 100 that land a hair below the integer.
constexpr double kCountSlack = 1e-9;

Session read_session(const jsonl::Record& rec, SessionIndex expected) {
  rec.only_keys({"session_index", "turns"});
  auto idx = rec.integer("session_index");
  if (idx != static_cast<long long>(expected)) {
    rec.fail("expected session_index " + std::to_string(static_cast<int>(expected)) + ", found " +
             std::to_string(idx));
  }
  Session session{expected, {}};
  const auto& turns = rec.array("turns");
  if (turns.empty()) {
    rec.fail("session " + std::to_string(idx) + " has zero turns");
  }
  for (const auto& t : turns) {
    auto tr = rec.child(t);
    tr.only_keys({"speaker", "text"});
    Turn turn;
    try {
      turn.speaker = parse_speaker(tr.string("speaker"));
    } catch (const DataError& e) {
      rec.fail(e.what());
    }
    turn.text = tr.non_empty_string("text");
    turn.turn_index = session.turns.size();
    session.turns.push_back(std::move(turn));
  }
  return session;
}

json session_to_json(const Session& s) {
  json turns = json::array();
  for (const auto& t : s.turns) turns.push_back({{"speaker", to_string(t.speaker)}, {"text", t.text}});
  return {{"session_index", static_cast<int>(s.session_index)}, {"turns", std::move(turns)}};
}

std::size_t floor_count(double f, std::size_t n) {
  return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + kCountSlack));
}

std::size_t ceil_count(double f, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - kCountSlack));
}

}  // namespace

std::vector<DialoguePair> read_corpus(std::istream& in, std::string_view source) {
  std::vector<DialoguePair> pairs;
  std::unordered_set<std::string> seen;
  for (const auto& line : jsonl::read(in, kCorpusSchema, source)) {
    jsonl::Record rec(line.value, source, line.number);
    rec.only_keys({"dialogue_id", "user_id", "sessions"});
    DialoguePair pair;
    pair.dialogue_id = rec.non_empty_string("dialogue_id");
    pair.user_id = rec.non_empty_string("user_id");
    const auto& sessions = rec.array("sessions");
    if (sessions.size() != 2) rec.fail("expected exactly two sessions, found " + std::to_string(sessions.size()));
    pair.first = read_session(rec.child(sessions[0]), SessionIndex::First);
    pair.second = read_session(rec.child(sessions[1]), SessionIndex::Second);
    bool has_user = false;
    for (const auto& t : pair.first.turns) has_user = has_user || t.speaker == Speaker::User;
    if (!has_user) rec.fail("dialogue '" + pair.dialogue_id + "': empty knowledge source (first session has no user turn)");
    if (!seen.insert(pair.dialogue_id).second) rec.fail("duplicate dialogue_id '" + pair.dialogue_id + "'");
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<DialoguePair> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  return read_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const std::vector<DialoguePair>& pairs) {
  jsonl::write_header(out, kCorpusSchema);
  for (const auto& p : pairs) {
    jsonl::write_line(out, {{"dialogue_id", p.dialogue_id},
                            {"user_id", p.user_id},
                            {"sessions", json::array({session_to_json(p.first), session_to_json(p.second)})}});
  }
}

std::vector<std::size_t> SeededPermutation::indices(std::size_t n) const {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 engine(seed_);
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t r = engine();
    while (r < threshold) r = engine();
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(r % bound)]);
  }
  return idx;
}

SplitAssignment split_corpus(const std::vector<DialoguePair>& pairs, const SplitFractions& fractions,
                             std::uint64_t seed) {
  const double parts[] = {fractions.train, fractions.valid, fractions.test};
  for (double f : parts) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw UsageError("split fractions must be non-negative");
  }
  const double sum = fractions.train + fractions.valid + fractions.test;
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw UsageError("split fractions must sum to 1 (got " + text::fixed(sum, 12) + ")");
  }
  const std::size_t n = pairs.size();
  const std::size_t n_train = floor_count(fractions.train, n);
  const std::size_t n_valid = floor_count(fractions.valid, n);
  if (n_train + n_valid > n) throw DataError("split sizes exceed corpus size");
  const std::size_t n_test = n - n_train - n_valid;
  auto check = [&](const char* name, double f, std::size_t count) {
    if (f > 0.0 && count == 0) {
      throw DataError("corpus of " + std::to_string(n) + " dialogues is too small for a non-empty " +
                      name + " split");
    }
  };
  check("train", fractions.train, n_train);
  check("valid", fractions.valid, n_valid);
  check("test", fractions.test, n_test);

  SplitAssignment out;
  out.seed = seed;
  const auto order = SeededPermutation(seed).indices(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& id = pairs[order[k]].dialogue_id;
    if (k < n_train) {
      out.train.push_back(id);
    } else if (k < n_train + n_valid) {
      out.valid.push_back(id);
    } else {
      out.test.push_back(id);
    }
  }
  return out;
}

std::string sample_id_for(std::string_view dialogue_id, std::size_t turn_index) {
  return std::string(dialogue_id) + ":" + std::to_string(turn_index);
}

std::vector<GroundedSample> make_samples(const DialoguePair& pair, std::size_t window) {
  if (window == 0) throw UsageError("history window must be positive");
  std::vector<GroundedSample> out;
  const auto& turns = pair.second.turns;
  for (std::size_t i = 1; i < turns.size(); ++i) {
    if (turns[i].speaker != Speaker::Agent) continue;
    const std::size_t begin = i > window ? i - window : 0;
    GroundedSample s;
    s.sample_id = sample_id_for(pair.dialogue_id, turns[i].turn_index);
    s.dialogue_id = pair.dialogue_id;
    s.history.assign(turns.begin() + static_cast<std::ptrdiff_t>(begin),
                     turns.begin() + static_cast<std::ptrdiff_t>(i));
    s.target = turns[i];
    s.knowledge_ref = pair.dialogue_id;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<std::string>> subset_chain(const std::vector<std::string>& train_ids,
                                                   const std::vector<double>& fractions,
                                                   std::uint64_t seed) {
  if (fractions.empty()) throw UsageError("subset fractions must not be empty");
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    const double f = fractions[k];
    if (!(f > 0.0 && f <= 1.0)) throw UsageError("subset fractions must lie in (0, 1]");
    if (k > 0 && !(f > fractions[k - 1])) throw UsageError("subset fractions must be strictly increasing");
  }
  if (fractions.back() != 1.0) throw UsageError("the last subset fraction must be 1.0");

  const auto shuffled = SeededPermutation(seed).apply(train_ids);
  std::vector<std::vector<std::string>> chain;
  for (double f : fractions) {
    const std::size_t size = std::min(ceil_count(f, shuffled.size()), shuffled.size());
    chain.emplace_back(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(size));
  }
  return chain;
}

}  // namespace ldwb::corpus
