#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldwb/interchange.hpp"
#include "ldwb/knowledge.hpp"

namespace ldwb::attribution {

struct PositiveOptions {
  bool exclude_tags = true;
  // Restrict the analysis to one input segment; nullopt considers every token.
  std::optional<knowledge::Segment> segment = knowledge::Segment::Knowledge;
};

struct PositiveProfile {
  std::string model_id;
  knowledge::Repr repr = knowledge::Repr::None;
  std::size_t considered = 0;
  std::size_t positive = 0;
  double positive_fraction = 0.0;
  // Shares among positive tokens. Tokens without a tag are counted under "_".
  std::map<std::string, double> by_upos;
  // Shares among positive Event/Participant tokens; empty when there are none.
  std::map<knowledge::Role, double> by_role;
};

PositiveProfile positive_stats(const std::vector<interchange::AttributionRecord>& records, knowledge::Repr repr,
                               const PositiveOptions& options = {});

enum class SharePooling { MeanOfRecords, Pooled };

struct RecordShares {
  std::string sample_id;
  std::size_t knowledge_length = 0;
  std::size_t history_length = 0;
  std::size_t top_k = 0;
  std::size_t knowledge_top = 0;
  std::size_t history_top = 0;
  double knowledge_share = 0.0;  // percent
  double history_share = 0.0;    // percent
};

struct SignificantShares {
  std::string model_id;
  knowledge::Repr repr = knowledge::Repr::None;
  double knowledge_share = 0.0;
  double history_share = 0.0;
  std::vector<RecordShares> per_record;
  std::size_t skipped = 0;  // records left out by the caller for an empty segment
};

// Top-k tokens by score (ties: earlier position first), k = ceil(top_fraction * L).
// Segment counts are normalized by segment length before converting to percent.
RecordShares record_shares(const interchange::AttributionRecord& record, double top_fraction = 0.25);

// Splits off records whose knowledge or history segment is empty; their
// shares are undefined.
std::vector<interchange::AttributionRecord> without_empty_segments(const std::vector<interchange::AttributionRecord>& records,
                                                                   std::size_t& skipped);

SignificantShares significant_stats(const std::vector<interchange::AttributionRecord>& records, knowledge::Repr repr,
                                    double top_fraction = 0.25, SharePooling pooling = SharePooling::MeanOfRecords);

// "44.6% | 55.4%"
std::string format_shares(const SignificantShares& s);
std::string format_significant_table(const std::vector<SignificantShares>& rows);
std::string format_record_dump(const SignificantShares& s);
std::string format_positive_table(const std::vector<PositiveProfile>& rows);

}  // namespace ldwb::attribution
