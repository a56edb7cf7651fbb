#pragma once

// Independent reference codings used to cross-check the library. None of
// these call into ldwb's metric, agreement or planning code.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldwb/humaneval.hpp"
#include "ldwb/interchange.hpp"

namespace oracle {

// Textbook BLEU-4: clipped n-gram precisions, closest reference length,
// geometric mean over the orders the hypothesis actually has, add-epsilon
// for zero matches when epsilon > 0 (else a zero score).
double textbook_bleu(const std::vector<std::string>& hyp, const std::vector<std::vector<std::string>>& refs,
                     double epsilon);

// Fleiss' kappa straight from the definition, in doubles.
std::optional<double> fleiss(const std::vector<std::array<std::size_t, 3>>& table);

// Returns a description of the first violated constraint, or nullopt.
std::optional<std::string> check_plan(const std::vector<ldwb::humaneval::HistoryItem>& histories,
                                      const std::vector<std::string>& workers,
                                      const ldwb::humaneval::CampaignConfig& config,
                                      const ldwb::humaneval::Plan& plan);

// Top-k membership by counting, for each token, how many tokens outrank it.
struct TopCounts {
  std::size_t k = 0;
  std::size_t knowledge_top = 0;
  std::size_t history_top = 0;
  double knowledge_share = 0.0;
  double history_share = 0.0;
};
TopCounts brute_force_shares(const ldwb::interchange::AttributionRecord& record, double top_fraction);

}  // namespace oracle
