#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "ldwb/error.hpp"
#include "ldwb/metrics.hpp"
#include "ldwb/text.hpp"
#include "oracles.hpp"

using namespace ldwb;
using namespace ldwb::metrics;
using interchange::GenerationRecord;
using interchange::ScoringRecord;

namespace {

Tokens words(const std::string& s) { return text::split_ws(s); }

ScoringRecord scoring(const std::string& id, const std::string& model, std::vector<double> nll) {
  ScoringRecord r{id, model, {}, std::move(nll), 0};
  for (std::size_t i = 0; i < r.token_nll.size(); ++i) r.target_tokens.push_back("w" + std::to_string(i));
  return r;
}

}  // namespace

TEST_CASE("perplexity closed forms") {
  auto zero = perplexity({scoring("a", "m", {0.0, 0.0, 0.0})});
  CHECK(zero.nll == 0.0);
  CHECK(zero.ppl() == 1.0);
  auto two = perplexity({scoring("a", "m", {1.0, 3.0})});
  CHECK(two.nll == 2.0);
  CHECK(two.ppl() == doctest::Approx(7.389056).epsilon(1e-6));
  CHECK(two.tokens == 2);
}

TEST_CASE("published nll/ppl pair is consistent within two-decimal rounding") {
  const double ppl = std::exp(2.76);
  CHECK(ppl == doctest::Approx(15.80).epsilon(0.0005));
  CHECK(std::fabs(ppl - 15.84) / 15.84 < 0.005);
  // 15.84 lies inside the image of the nll rounding interval.
  CHECK(std::exp(2.755) < 15.84);
  CHECK(std::exp(2.765) > 15.84);
}

TEST_CASE("perplexity is the exponential of the micro-averaged nll on random records") {
  gen::Rng rng(11);
  std::vector<ScoringRecord> recs;
  double total = 0.0;
  std::size_t n = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> nll;
    for (std::size_t j = rng.between(1, 30); j > 0; --j) nll.push_back(rng.real(0.0, 8.0));
    for (double x : nll) total += x;
    n += nll.size();
    recs.push_back(scoring("s" + std::to_string(i), "m", nll));
  }
  auto r = perplexity(recs);
  CHECK(r.tokens == n);
  CHECK(r.nll == doctest::Approx(total / static_cast<double>(n)).epsilon(1e-12));
  CHECK(r.ppl() == std::exp(r.nll));

  auto shuffled = recs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
  CHECK(perplexity(shuffled).nll == doctest::Approx(r.nll).epsilon(1e-14));

  // Regrouping: split every record in two.
  std::vector<ScoringRecord> split;
  for (const auto& rec : recs) {
    const std::size_t cut = rec.token_nll.size() / 2;
    if (cut > 0) split.push_back(scoring(rec.sample_id + "a", "m", {rec.token_nll.begin(), rec.token_nll.begin() + cut}));
    split.push_back(scoring(rec.sample_id + "b", "m", {rec.token_nll.begin() + cut, rec.token_nll.end()}));
  }
  CHECK(perplexity(split).nll == doctest::Approx(r.nll).epsilon(1e-14));
}

TEST_CASE("perplexity errors and grouping") {
  CHECK_THROWS_AS(perplexity({}), DataError);
  CHECK_THROWS_WITH_AS(perplexity({scoring("a", "m", {1.0}), scoring("b", "n", {1.0})}),
                       doctest::Contains("mixed model_ids"), DataError);
  auto by = perplexity_by_model({scoring("a", "z", {1.0}), scoring("a", "b", {2.0}), scoring("c", "z", {3.0})});
  REQUIRE(by.size() == 2);
  CHECK(by[0].model_id == "b");
  CHECK(by[1].model_id == "z");
  CHECK(by[1].nll == 2.0);
  CHECK(format_perplexity(by) == "model\ttokens\tnll\tppl\nb\t1\t2.0000\t7.3891\nz\t2\t2.0000\t7.3891\n");
}

TEST_CASE("bleu closed forms") {
  auto ref = words("the cat sat on the warm mat today");
  CHECK(bleu4(ref, {ref}) == 1.0);
  CHECK(bleu4(words("the cat sat on"), {ref}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(bleu4(words("the cat sat on"), {ref}) == std::exp(1.0 - 8.0 / 4.0));
  // One shared bigram in a 5-token pair: precisions 2/5, 1/4, eps/3, eps/2.
  auto hyp = words("a b c d e");
  auto r5 = words("x a b y z");
  const double expected = std::pow(0.4 * 0.25 * (0.1 / 3.0) * (0.1 / 2.0), 0.25);
  CHECK(bleu4(hyp, {r5}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(bleu4(hyp, {r5}) == doctest::Approx(oracle::textbook_bleu(hyp, {r5}, 0.1)).epsilon(1e-12));
  BleuConfig none{Smoothing::None, 0.1, Pooling::Sentence};
  CHECK(bleu4(hyp, {r5}, none) == 0.0);
  // Short hypotheses are scored on the orders they have.
  CHECK(bleu4(words("hello"), {words("hello")}) == 1.0);
  CHECK(bleu4(words("hello there"), {words("hello there")}) == 1.0);
}

TEST_CASE("bleu matches the textbook oracle on random pairs") {
  gen::Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    auto hyp = gen::tokens(rng, rng.between(1, 20), 6);
    std::vector<Tokens> refs;
    for (std::size_t r = rng.between(1, 3); r > 0; --r) refs.push_back(gen::tokens(rng, rng.between(1, 20), 6));
    CAPTURE(i);
    const double got = bleu4(hyp, refs);
    CHECK(std::fabs(got - oracle::textbook_bleu(hyp, refs, 0.1)) <= 1e-9);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
    auto reversed = refs;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(bleu4(hyp, reversed) == got);
    CHECK(bleu4(hyp, {hyp}) == 1.0);
    CHECK(std::fabs(bleu4(hyp, refs, {Smoothing::None, 0.1, Pooling::Sentence}) - oracle::textbook_bleu(hyp, refs, 0.0)) <= 1e-9);
  }
}

TEST_CASE("bleu brevity takes the closest reference, ties to the shorter") {
  auto s = bleu_stats(words("a b c d e"), {words("a b c"), words("a b c d e f g")});
  CHECK(s.ref_length == 3);
  auto t = bleu_stats(words("a b c d e"), {words("a b c d e f g h"), words("a b c d e f")});
  CHECK(t.ref_length == 6);
}

TEST_CASE("bleu errors") {
  CHECK_THROWS_AS(bleu4({}, {words("a")}), DataError);
  CHECK_THROWS_AS(bleu4(words("a"), {}), DataError);
  CHECK_THROWS_AS(bleu4(words("a"), {Tokens{}}), DataError);
  CHECK_THROWS_AS(bleu4(words("a"), {words("a")}, {Smoothing::AddEpsilon, 0.0, Pooling::Sentence}), UsageError);
}

TEST_CASE("similarity matrix on a three-sample fixture matches the oracle") {
  std::map<std::string, std::vector<GenerationRecord>> gens = {
      {"alpha",
       {{"s1", "alpha", "I am sorry to hear that.", 0},
        {"s2", "alpha", "How is your sister now?", 0},
        {"s3", "alpha", "That sounds great!", 0}}},
      {"beta",
       {{"s1", "beta", "Sorry to hear that, how are you?", 0},
        {"s2", "beta", "How is she now?", 0},
        {"s3", "beta", "Great, tell me more.", 0}}},
  };
  std::map<std::string, std::string> truth = {
      {"s1", "Oh no, I am sorry."}, {"s2", "Is your sister better now?"}, {"s3", "That sounds great, congratulations!"}};
  auto m = similarity_matrix(gens, truth);
  CHECK(m.labels == std::vector<std::string>{"alpha", "beta", "GroundTruth"});

  std::map<std::string, std::map<std::string, std::string>> by_label;
  for (const auto& [model, recs] : gens) {
    for (const auto& r : recs) by_label[model][r.sample_id] = r.response_text;
  }
  by_label["GroundTruth"] = truth;
  for (const auto& a : m.labels) {
    for (const auto& b : m.labels) {
      double sum = 0.0;
      for (const auto& [sid, hyp] : by_label[a]) {
        sum += oracle::textbook_bleu(text::bleu_tokenize(hyp), {text::bleu_tokenize(by_label[b][sid])}, 0.1);
      }
      CAPTURE(a);
      CAPTURE(b);
      CHECK(m.cell(a, b) == doctest::Approx(sum / 3.0).epsilon(1e-12));
      if (a == b) CHECK(m.cell(a, b) == 1.0);
    }
  }
  CHECK(m.cell("alpha", "beta") != m.cell("beta", "alpha"));
  CHECK(m.shared[0][2] == 3);

  auto text = format_matrix(m);
  CHECK(text.rfind("hypothesis\\reference\talpha\tbeta\tGroundTruth\n", 0) == 0);
}

TEST_CASE("similarity matrix properties") {
  std::map<std::string, std::vector<GenerationRecord>> same = {
      {"a", {{"s1", "a", "hello there friend", 0}, {"s2", "a", "nice day", 0}}},
      {"b", {{"s1", "b", "hello there friend", 0}, {"s2", "b", "nice day", 0}}}};
  auto m = similarity_matrix(same, {{"s1", "hello there friend"}, {"s2", "nice day"}});
  for (auto& row : m.cells) {
    for (double c : row) CHECK(c == 1.0);
  }

  // Only shared samples count.
  std::map<std::string, std::vector<GenerationRecord>> partial = {{"a", {{"s1", "a", "x y", 0}, {"s9", "a", "q", 0}}}};
  auto p = similarity_matrix(partial, {{"s1", "x y"}});
  CHECK(p.shared[0][1] == 1);
  CHECK(p.cell("a", "GroundTruth") == 1.0);

  std::map<std::string, std::vector<GenerationRecord>> disjoint = {{"a", {{"s1", "a", "x", 0}}}};
  CHECK_THROWS_WITH_AS(similarity_matrix(disjoint, {{"s2", "x"}}), doctest::Contains("share no samples"), DataError);
  std::map<std::string, std::vector<GenerationRecord>> reserved = {{"GroundTruth", {{"s1", "GroundTruth", "x", 0}}}};
  CHECK_THROWS_AS(similarity_matrix(reserved, {{"s1", "x"}}), DataError);
}

TEST_CASE("corpus pooling sums statistics before scoring") {
  std::map<std::string, std::vector<GenerationRecord>> gens = {
      {"a", {{"s1", "a", "a b c d", 0}, {"s2", "a", "e f", 0}}}};
  std::map<std::string, std::string> truth = {{"s1", "a b c d"}, {"s2", "e g"}};
  auto m = similarity_matrix(gens, truth, {Smoothing::AddEpsilon, 0.1, Pooling::Corpus});
  // Pooled: unigrams 5/6, bigrams 3/4, trigrams 2/2, 4-grams 1/1; lengths equal.
  CHECK(m.cell("a", "GroundTruth") == doctest::Approx(std::pow(5.0 / 6.0 * 3.0 / 4.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("learning curve assembly") {
  auto point = [](double f, const std::string& model, double nll) {
    return CurvePoint{f, PerplexityReport{model, nll, 10}};
  };
  const std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
  std::vector<CurvePoint> pts = {point(1.0, "b", 2.0), point(0.25, "b", 3.0), point(0.5, "b", 2.5), point(0.75, "b", 2.2),
                                 point(0.5, "a", 1.5), point(0.25, "a", 1.0), point(1.0, "a", 2.0), point(0.75, "a", 1.7)};
  auto series = learning_curve(pts, fractions);
  REQUIRE(series.size() == 2);
  CHECK(series[0].model_id == "a");
  REQUIRE(series[1].points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(series[1].points[i].fraction == fractions[i]);
  CHECK(format_curve({series[0]}) ==
        "model\tfraction\ttokens\tnll\tppl\n"
        "a\t0.2500\t10\t1.0000\t2.7183\n"
        "a\t0.5000\t10\t1.5000\t4.4817\n"
        "a\t0.7500\t10\t1.7000\t5.4739\n"
        "a\t1.0000\t10\t2.0000\t7.3891\n");

  auto dup = pts;
  dup.push_back(point(0.5, "a", 9.0));
  CHECK_THROWS_WITH_AS(learning_curve(dup, fractions), doctest::Contains("duplicate fraction"), DataError);
  auto missing = pts;
  missing.pop_back();
  CHECK_THROWS_WITH_AS(learning_curve(missing, fractions), doctest::Contains("missing fraction"), DataError);
  CHECK_THROWS_AS(learning_curve({point(0.3, "a", 1.0)}, fractions), DataError);
}
