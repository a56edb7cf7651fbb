#pragma once

// Hand-rolled random generators for property tests. Every generator is
// driven by an explicit seed so failures replay exactly.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ldwb/corpus.hpp"
#include "ldwb/humaneval.hpp"
#include "ldwb/interchange.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Tokens drawn from a vocabulary of `vocab` short words.
std::vector<std::string> tokens(Rng& rng, std::size_t length, std::size_t vocab);

// A well-formed pair whose second session yields exactly `eligible` samples.
ldwb::corpus::DialoguePair dialogue(const std::string& id, std::size_t eligible, Rng& rng);

// n pairs with ids p0000, p0001, ...
std::vector<ldwb::corpus::DialoguePair> corpus(std::size_t n, std::uint64_t seed);

// Record with both segments non-empty; scores may tie when `ties` is set.
ldwb::interchange::AttributionRecord attribution_record(Rng& rng, const std::string& sample_id, bool ties);

struct CampaignInstance {
  std::vector<ldwb::humaneval::HistoryItem> histories;
  std::vector<std::string> workers;
  ldwb::humaneval::CampaignConfig config;
};

// Random instance satisfying raters <= workers and raters * candidates <= workers * quota.
CampaignInstance feasible_campaign(Rng& rng);

// Histories of `per_history` candidates each, one of them GroundTruth.
std::vector<ldwb::humaneval::HistoryItem> histories(std::size_t count, std::size_t per_history,
                                                    const std::vector<std::string>& sources);

}  // namespace gen
