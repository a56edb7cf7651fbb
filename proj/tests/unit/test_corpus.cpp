#include <doctest.h>

#include <chrono>
#include <set>
#include <sstream>

#include "generators.hpp"
#include "ldwb/corpus.hpp"
#include "ldwb/error.hpp"

using namespace ldwb;
using corpus::Speaker;

namespace {

const char* kThreePairs = R"({"schema":"ldwb.corpus","version":1}
{"dialogue_id":"d1","user_id":"u1","sessions":[{"session_index":1,"turns":[{"speaker":"agent","text":"Hi"},{"speaker":"user","text":"I saw Anna."}]},{"session_index":2,"turns":[{"speaker":"user","text":"Hello"},{"speaker":"agent","text":"How is Anna?"}]}]}
{"dialogue_id":"d2","user_id":"u2","sessions":[{"session_index":1,"turns":[{"speaker":"user","text":"We argued."}]},{"session_index":2,"turns":[{"speaker":"agent","text":"Hey"}]}]}

{"dialogue_id":"d3","user_id":"u1","sessions":[{"session_index":1,"turns":[{"speaker":"user","text":"Rain."}]},{"session_index":2,"turns":[{"speaker":"user","text":"x"},{"speaker":"agent","text":"y"}]}]}
)";

std::vector<corpus::DialoguePair> parse(const std::string& s) {
  std::istringstream in(s);
  return corpus::read_corpus(in, "mem");
}

std::string with_header(const std::string& line) { return std::string("{\"schema\":\"ldwb.corpus\",\"version\":1}\n") + line + "\n"; }

corpus::DialoguePair second_session(const std::vector<Speaker>& speakers) {
  corpus::DialoguePair p;
  p.dialogue_id = "d";
  p.user_id = "u";
  p.first.turns = {{Speaker::User, "k", 0}};
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    p.second.turns.push_back({speakers[i], "t" + std::to_string(i), i});
  }
  return p;
}

}  // namespace

TEST_CASE("three well-formed pairs load in file order") {
  auto pairs = parse(kThreePairs);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].dialogue_id == "d1");
  CHECK(pairs[1].dialogue_id == "d2");
  CHECK(pairs[2].dialogue_id == "d3");
  CHECK(pairs[0].first.turns[1].speaker == Speaker::User);
  CHECK(pairs[0].first.turns[1].turn_index == 1);
  CHECK(pairs[0].second.turns[1].text == "How is Anna?");
}

TEST_CASE("write then read is the identity") {
  auto pairs = parse(kThreePairs);
  std::ostringstream out;
  corpus::write_corpus(out, pairs);
  CHECK(parse(out.str()) == pairs);
  std::ostringstream again;
  corpus::write_corpus(again, parse(out.str()));
  CHECK(again.str() == out.str());
}

TEST_CASE("duplicate dialogue id is named with its line") {
  std::string s = kThreePairs;
  s += R"({"dialogue_id":"d1","user_id":"u9","sessions":[{"session_index":1,"turns":[{"speaker":"user","text":"a"}]},{"session_index":2,"turns":[{"speaker":"agent","text":"b"}]}]})";
  s += "\n";
  try {
    parse(s);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("\"d1\"") == std::string::npos);
    CHECK(std::string(e.what()).find("'d1'") != std::string::npos);
    REQUIRE(e.line());
    CHECK(*e.line() == 6);
  }
}

TEST_CASE("first session without a user turn is an empty knowledge source") {
  auto s = with_header(R"({"dialogue_id":"d1","user_id":"u","sessions":[{"session_index":1,"turns":[{"speaker":"agent","text":"a"}]},{"session_index":2,"turns":[{"speaker":"agent","text":"b"}]}]})");
  CHECK_THROWS_WITH_AS(parse(s), doctest::Contains("empty knowledge source"), DataError);
}

TEST_CASE("malformed records report line numbers") {
  struct Case {
    std::string line;
    std::string message;
  };
  const std::vector<Case> cases = {
      {"not json", "malformed record"},
      {R"({"dialogue_id":"d","user_id":"u","sessions":[]})", "two sessions"},
      {R"({"dialogue_id":"d","user_id":"u","sessions":[{"session_index":1,"turns":[]},{"session_index":2,"turns":[{"speaker":"agent","text":"b"}]}]})", "zero turns"},
      {R"({"dialogue_id":"d","user_id":"u","sessions":[{"session_index":1,"turns":[{"speaker":"bot","text":"a"}]},{"session_index":2,"turns":[{"speaker":"agent","text":"b"}]}]})", "unknown speaker"},
      {R"({"dialogue_id":"d","user_id":"u","sessions":[{"session_index":1,"turns":[{"speaker":"user","text":"  "}]},{"session_index":2,"turns":[{"speaker":"agent","text":"b"}]}]})", "non-empty"},
      {R"({"dialogue_id":"d","user_id":"u","sessions":[{"session_index":2,"turns":[{"speaker":"user","text":"a"}]},{"session_index":1,"turns":[{"speaker":"agent","text":"b"}]}]})", "session_index"},
      {R"({"dialogue_id":"d","user_id":"u","extra":1,"sessions":[]})", "unexpected field"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.line);
    try {
      parse(with_header(c.line));
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find(c.message) != std::string::npos);
      REQUIRE(e.line());
      CHECK(*e.line() == 2);
    }
  }
}

TEST_CASE("schema header is required and versioned") {
  CHECK_THROWS_WITH_AS(parse(R"({"dialogue_id":"d"})"), doctest::Contains("header"), DataError);
  CHECK_THROWS_AS(parse(R"({"schema":"ldwb.corpus","version":2})"), DataError);
  CHECK_THROWS_AS(parse(R"({"schema":"ldwb.generation","version":1})"), DataError);
}

TEST_CASE("split arithmetic: floor then remainder") {
  CHECK(corpus::split_corpus(gen::corpus(800, 1), {0.8, 0.1, 0.1}, 5).train.size() == 640);
  auto a = corpus::split_corpus(gen::corpus(800, 1), {0.8, 0.1, 0.1}, 5);
  CHECK(a.valid.size() == 80);
  CHECK(a.test.size() == 80);
  auto b = corpus::split_corpus(gen::corpus(10, 2), {0.8, 0.1, 0.1}, 5);
  CHECK(b.train.size() == 8);
  CHECK(b.valid.size() == 1);
  CHECK(b.test.size() == 1);
}

TEST_CASE("split errors") {
  auto pairs = gen::corpus(10, 3);
  CHECK_THROWS_AS(corpus::split_corpus(pairs, {0.8, 0.1, 0.2}, 1), UsageError);
  CHECK_THROWS_AS(corpus::split_corpus(pairs, {-0.1, 0.6, 0.5}, 1), UsageError);
  CHECK_THROWS_AS(corpus::split_corpus(gen::corpus(2, 3), {0.8, 0.1, 0.1}, 1), DataError);
  CHECK_NOTHROW(corpus::split_corpus(gen::corpus(2, 3), {1.0, 0.0, 0.0}, 1));
  // 0.7 + 0.2 + 0.1 is 0.9999999999999999 in binary floating point.
  CHECK_NOTHROW(corpus::split_corpus(pairs, {0.7, 0.2, 0.1}, 1));
}

TEST_CASE("split property: disjoint, covering, deterministic") {
  gen::Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = rng.between(3, 300);
    auto pairs = gen::corpus(n, trial);
    const double train = rng.real(0.34, 0.9);
    const double valid = rng.real(0.0, (1.0 - train) / 2);
    corpus::SplitFractions f{train, valid, 1.0 - train - valid};
    corpus::SplitAssignment a;
    try {
      a = corpus::split_corpus(pairs, f, trial);
    } catch (const DataError&) {
      continue;  // too small for a requested split
    }
    std::set<std::string> all;
    for (const auto* part : {&a.train, &a.valid, &a.test}) all.insert(part->begin(), part->end());
    CHECK(all.size() == n);
    CHECK(a.train.size() + a.valid.size() + a.test.size() == n);
    CHECK(a == corpus::split_corpus(pairs, f, trial));
  }
}

TEST_CASE("different seeds give different permutations") {
  auto pairs = gen::corpus(100, 4);
  CHECK(corpus::split_corpus(pairs, {0.8, 0.1, 0.1}, 1).train != corpus::split_corpus(pairs, {0.8, 0.1, 0.1}, 2).train);
}

TEST_CASE("seeded permutation is a fixed, portable sequence") {
  // Expected values come from scripts/permutation_reference.py, a separate
  // Python coding of the same engine and draw procedure.
  CHECK(corpus::SeededPermutation(42).indices(8) == std::vector<std::size_t>{7, 0, 5, 1, 2, 4, 3, 6});
  CHECK(corpus::SeededPermutation(2024).indices(12) == std::vector<std::size_t>{3, 5, 9, 2, 6, 8, 0, 4, 11, 1, 7, 10});
  auto p = corpus::SeededPermutation(42).indices(50);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  CHECK(corpus::SeededPermutation(7).indices(0).empty());
  CHECK(corpus::SeededPermutation(7).indices(1) == std::vector<std::size_t>{0});
}

TEST_CASE("make_samples window mechanics") {
  auto p = second_session({Speaker::User, Speaker::Agent, Speaker::User, Speaker::Agent});
  auto s = corpus::make_samples(p, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0].sample_id == "d:1");
  REQUIRE(s[0].history.size() == 1);
  CHECK(s[0].history[0].turn_index == 0);
  CHECK(s[0].target.turn_index == 1);
  REQUIRE(s[1].history.size() == 2);
  CHECK(s[1].history[0].turn_index == 1);
  CHECK(s[1].history[1].turn_index == 2);
  CHECK(s[1].target.turn_index == 3);
  CHECK(s[1].knowledge_ref == "d");
}

TEST_CASE("agent turn without preceding turns yields no sample") {
  auto p = second_session({Speaker::Agent, Speaker::User, Speaker::Agent});
  auto s = corpus::make_samples(p, 4);
  REQUIRE(s.size() == 1);
  CHECK(s[0].history.size() == 2);
  CHECK(s[0].target.turn_index == 2);
  CHECK(corpus::make_samples(second_session({Speaker::User}), 2).empty());
  CHECK_THROWS_AS(corpus::make_samples(p, 0), UsageError);
}

TEST_CASE("counting oracle: 640 pairs of two samples plus four of three") {
  gen::Rng rng(5);
  std::size_t total = 0;
  for (std::size_t i = 0; i < 640; ++i) {
    auto p = gen::dialogue("x" + std::to_string(i), i < 4 ? 3 : 2, rng);
    total += corpus::make_samples(p, 2).size();
  }
  CHECK(total == 1284);
}

TEST_CASE("sample invariants hold for random pairs") {
  gen::Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t eligible = rng.between(0, 5);
    auto p = gen::dialogue("r", eligible, rng);
    const std::size_t w = rng.between(1, 6);
    auto samples = corpus::make_samples(p, w);
    CHECK(samples.size() == eligible);
    for (const auto& s : samples) {
      CHECK(s.target.speaker == Speaker::Agent);
      CHECK(!s.history.empty());
      CHECK(s.history.size() <= w);
      for (const auto& h : s.history) CHECK(h.turn_index < s.target.turn_index);
      CHECK(s.history.back().turn_index + 1 == s.target.turn_index);
    }
    CHECK(samples == corpus::make_samples(p, w));
  }
}

TEST_CASE("subset chain sizes and nesting") {
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back("t" + std::to_string(i));
  auto chain = corpus::subset_chain(ids, {0.25, 0.5, 1.0}, 3);
  REQUIRE(chain.size() == 3);
  CHECK(chain[0].size() == 2);
  CHECK(chain[1].size() == 4);
  CHECK(chain[2].size() == 8);
  CHECK(std::equal(chain[0].begin(), chain[0].end(), chain[1].begin()));
  CHECK(std::equal(chain[1].begin(), chain[1].end(), chain[2].begin()));
  CHECK(chain == corpus::subset_chain(ids, {0.25, 0.5, 1.0}, 3));
  CHECK_THROWS_AS(corpus::subset_chain(ids, {0.5, 0.25}, 3), UsageError);
  CHECK_THROWS_AS(corpus::subset_chain(ids, {0.5, 0.5, 1.0}, 3), UsageError);
  CHECK_THROWS_AS(corpus::subset_chain(ids, {0.25, 0.5}, 3), UsageError);
}

TEST_CASE("subset chain nesting property") {
  gen::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> ids;
    const std::size_t n = rng.between(1, 200);
    for (std::size_t i = 0; i < n; ++i) ids.push_back("i" + std::to_string(i));
    std::vector<double> f;
    double x = 0.0;
    while (true) {
      x += rng.real(0.01, 0.5);
      if (x >= 1.0) break;
      f.push_back(x);
    }
    f.push_back(1.0);
    auto chain = corpus::subset_chain(ids, f, trial);
    for (std::size_t k = 0; k < chain.size(); ++k) {
      CHECK(chain[k].size() == static_cast<std::size_t>(std::ceil(f[k] * n - 1e-9)));
      if (k) CHECK(std::equal(chain[k - 1].begin(), chain[k - 1].end(), chain[k].begin()));
    }
    std::set<std::string> full(chain.back().begin(), chain.back().end());
    CHECK(full.size() == n);
  }
}
