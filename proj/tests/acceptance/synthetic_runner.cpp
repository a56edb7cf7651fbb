#include "synthetic_runner.hpp"

#include <cstdint>
#include <random>

#include "ldwb/text.hpp"

namespace synthetic {

using namespace ldwb;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Uniform in [0, 1) from the top 53 bits, independent of the library's distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(unit(rng) * static_cast<double>(n)); }

std::vector<std::string> history_words(const knowledge::InputSequence& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens) {
    if (t.segment == knowledge::Segment::History && t.text.front() != '<') out.push_back(t.text);
  }
  return out;
}

}  // namespace

std::vector<interchange::GenerationRecord> generations(const std::vector<knowledge::InputSequence>& seqs,
                                                       const std::string& model_id) {
  static const std::vector<std::string> fillers = {"davvero?", "che bello!", "mi dispiace.", "e poi?", "capisco."};
  std::vector<interchange::GenerationRecord> out;
  for (const auto& s : seqs) {
    std::mt19937_64 rng(fnv1a(model_id + "|" + s.sample_id));
    const auto words = history_words(s);
    std::vector<std::string> resp;
    const std::size_t n = 2 + below(rng, 6);
    for (std::size_t i = 0; i < n && !words.empty(); ++i) resp.push_back(words[below(rng, words.size())]);
    resp.push_back(fillers[below(rng, fillers.size())]);
    out.push_back({s.sample_id, model_id, text::join(resp, " "), 0});
  }
  return out;
}

std::vector<interchange::ScoringRecord> scoring(const std::vector<knowledge::InputSequence>& seqs,
                                                const std::string& model_id, double level) {
  std::vector<interchange::ScoringRecord> out;
  for (const auto& s : seqs) {
    std::mt19937_64 rng(fnv1a(model_id + "#" + s.sample_id));
    interchange::ScoringRecord r{s.sample_id, model_id, text::split_ws(s.target_text), {}, 0};
    for (std::size_t i = 0; i < r.target_tokens.size(); ++i) r.token_nll.push_back(level * (0.5 + unit(rng)));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<interchange::AttributionRecord> attributions(const std::vector<knowledge::InputSequence>& seqs,
                                                         const std::string& model_id) {
  std::vector<interchange::AttributionRecord> out;
  for (const auto& s : seqs) {
    std::mt19937_64 rng(fnv1a(model_id + "@" + s.sample_id));
    interchange::AttributionRecord r{s.sample_id, model_id, {}, 0};
    for (const auto& t : s.tokens) {
      const double bias = t.segment == knowledge::Segment::Knowledge ? 0.1 : 0.0;
      r.tokens.push_back({t.text, t.segment, t.role, std::nullopt, unit(rng) - 0.4 + bias});
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<humaneval::JudgmentRecord> judgments(const humaneval::Campaign& campaign, const humaneval::Plan& plan) {
  using namespace humaneval;
  const auto index = index_candidates(campaign.histories);
  std::vector<JudgmentRecord> out;
  std::size_t tick = 0;
  auto stamp = [&tick] {
    const std::size_t t = tick++;
    char buf[32];
    std::snprintf(buf, sizeof buf, "2026-01-01T%02zu:%02zu:%02zuZ", (t / 3600) % 24, (t / 60) % 60, t % 60);
    return std::string(buf);
  };
  for (const auto& [worker, tasks] : plan) {
    for (const auto& q : campaign.qualification) {
      out.push_back({worker, q.candidate.candidate_id, q.gold, {}, stamp()});
      if (requires_error_labels(q.gold)) out.back().error_labels = {ErrorLabel::Other};
    }
    for (const auto& t : tasks) {
      std::mt19937_64 rng(fnv1a(worker + "/" + t.candidate_id));
      const bool truth = index.at(t.candidate_id).source == kGroundTruth;
      JudgmentRecord j{worker, t.candidate_id, {}, {}, stamp()};
      for (auto c : kCriteria) {
        const double u = unit(rng);
        j.votes[c] = u < (truth ? 0.85 : 0.5) ? Vote::Positive : u < 0.92 ? Vote::Negative : Vote::Unsure;
      }
      if (requires_error_labels(j.votes)) {
        for (auto l : kErrorLabels) {
          if (unit(rng) < 0.4) j.error_labels.insert(l);
        }
        if (j.error_labels.empty()) j.error_labels.insert(kErrorLabels[below(rng, kErrorLabels.size())]);
      }
      out.push_back(std::move(j));
    }
  }
  return out;
}

}  // namespace synthetic
