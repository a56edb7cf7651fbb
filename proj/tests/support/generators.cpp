#include "generators.hpp"

#include <algorithm>
#include <cstdio>

namespace gen {

using ldwb::corpus::Speaker;
using ldwb::corpus::Turn;

std::vector<std::string> tokens(Rng& rng, std::size_t length, std::size_t vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < length; ++i) out.push_back("w" + std::to_string(rng.below(vocab)));
  return out;
}

namespace {

Turn turn(Speaker s, std::size_t index, Rng& rng) {
  Turn t;
  t.speaker = s;
  t.turn_index = index;
  auto words = tokens(rng, rng.between(1, 6), 40);
  for (const auto& w : words) t.text += (t.text.empty() ? "" : " ") + w;
  return t;
}

}  // namespace

ldwb::corpus::DialoguePair dialogue(const std::string& id, std::size_t eligible, Rng& rng) {
  ldwb::corpus::DialoguePair p;
  p.dialogue_id = id;
  p.user_id = "u" + std::to_string(rng.below(50));
  p.first.session_index = ldwb::corpus::SessionIndex::First;
  p.second.session_index = ldwb::corpus::SessionIndex::Second;
  const std::size_t first_len = rng.between(2, 6);
  for (std::size_t i = 0; i < first_len; ++i) {
    p.first.turns.push_back(turn(i % 2 == 0 ? Speaker::Agent : Speaker::User, i, rng));
  }
  // Optionally open with an agent turn, which never yields a sample.
  if (rng.coin()) p.second.turns.push_back(turn(Speaker::Agent, 0, rng));
  for (std::size_t k = 0; k < eligible; ++k) {
    const std::size_t users = rng.between(1, 2);
    for (std::size_t u = 0; u < users; ++u) p.second.turns.push_back(turn(Speaker::User, p.second.turns.size(), rng));
    p.second.turns.push_back(turn(Speaker::Agent, p.second.turns.size(), rng));
  }
  if (p.second.turns.empty()) p.second.turns.push_back(turn(Speaker::User, 0, rng));
  if (rng.coin(0.3)) p.second.turns.push_back(turn(Speaker::User, p.second.turns.size(), rng));
  return p;
}

std::vector<ldwb::corpus::DialoguePair> corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ldwb::corpus::DialoguePair> out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "p%04zu", i);
    out.push_back(dialogue(id, rng.between(1, 3), rng));
  }
  return out;
}

ldwb::interchange::AttributionRecord attribution_record(Rng& rng, const std::string& sample_id, bool ties) {
  using ldwb::knowledge::Role;
  using ldwb::knowledge::Segment;
  ldwb::interchange::AttributionRecord r;
  r.sample_id = sample_id;
  r.model_id = "m";
  const std::size_t k = rng.between(1, 30);
  const std::size_t h = rng.between(1, 30);
  for (std::size_t i = 0; i < k + h; ++i) {
    ldwb::interchange::AttributionToken t;
    t.text = "t" + std::to_string(i);
    t.segment = i < k ? Segment::Knowledge : Segment::History;
    t.role = Role::Other;
    t.score = ties ? static_cast<double>(rng.below(5)) - 2.0 : rng.real(-1.0, 1.0);
    r.tokens.push_back(std::move(t));
  }
  // Interleave segments so position does not imply segment.
  for (std::size_t i = r.tokens.size(); i > 1; --i) std::swap(r.tokens[i - 1], r.tokens[rng.below(i)]);
  return r;
}

std::vector<ldwb::humaneval::HistoryItem> histories(std::size_t count, std::size_t per_history,
                                                    const std::vector<std::string>& sources) {
  std::vector<ldwb::humaneval::HistoryItem> out;
  for (std::size_t h = 0; h < count; ++h) {
    ldwb::humaneval::HistoryItem item;
    item.history_id = "h" + std::to_string(h);
    item.history.push_back({Speaker::User, "hello there", 0});
    for (std::size_t c = 0; c < per_history; ++c) {
      const std::string source = c == 0 ? std::string(ldwb::humaneval::kGroundTruth) : sources[(c - 1) % sources.size()];
      item.candidates.push_back({item.history_id + "-c" + std::to_string(c), "s" + std::to_string(h), source,
                                 "response " + std::to_string(c)});
    }
    out.push_back(std::move(item));
  }
  return out;
}

CampaignInstance feasible_campaign(Rng& rng) {
  CampaignInstance inst;
  for (;;) {
    inst.config.raters_per_item = rng.between(1, 7);
    inst.config.histories_per_worker = rng.between(1, 10);
    inst.config.candidates_per_history = rng.between(1, 4);
    const std::size_t per_history = rng.between(1, 5);
    const std::size_t count = rng.between(1, 25);
    const std::size_t needed = inst.config.raters_per_item * per_history * count;
    const std::size_t quota = inst.config.worker_quota();
    const std::size_t min_workers = std::max(inst.config.raters_per_item, (needed + quota - 1) / quota);
    if (min_workers > 60) continue;
    const std::size_t workers = rng.between(min_workers, min_workers + rng.below(4));
    inst.workers.clear();
    for (std::size_t w = 0; w < workers; ++w) inst.workers.push_back("w" + std::to_string(w));
    inst.histories = histories(count, per_history, {"A", "B"});
    return inst;
  }
}

}  // namespace gen
