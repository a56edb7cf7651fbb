#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ldwb/knowledge.hpp"

// File contracts shared with external model runners. Every file is UTF-8,
// line-delimited JSON with a schema header line.
namespace ldwb::interchange {

inline constexpr std::string_view kGenerationSchema = "ldwb.generation";
inline constexpr std::string_view kScoringSchema = "ldwb.scoring";
inline constexpr std::string_view kAttributionSchema = "ldwb.attribution";

// `line` is the source line a record was read from (0 when built in memory);
// it is not part of record equality.

struct GenerationRecord {
  std::string sample_id;
  std::string model_id;
  std::string response_text;
  std::size_t line = 0;

  bool operator==(const GenerationRecord& o) const {
    return sample_id == o.sample_id && model_id == o.model_id && response_text == o.response_text;
  }
};

// token_nll in nats, one per target token.
struct ScoringRecord {
  std::string sample_id;
  std::string model_id;
  std::vector<std::string> target_tokens;
  std::vector<double> token_nll;
  std::size_t line = 0;

  bool operator==(const ScoringRecord& o) const {
    return sample_id == o.sample_id && model_id == o.model_id && target_tokens == o.target_tokens &&
           token_nll == o.token_nll;
  }
};

struct AttributionToken {
  std::string text;
  knowledge::Segment segment = knowledge::Segment::History;
  knowledge::Role role = knowledge::Role::Other;
  std::optional<std::string> upos;
  double score = 0.0;  // signed, unnormalized, as produced by the runner

  bool operator==(const AttributionToken&) const = default;
};

struct AttributionRecord {
  std::string sample_id;
  std::string model_id;
  std::vector<AttributionToken> tokens;
  std::size_t line = 0;

  bool operator==(const AttributionRecord& o) const {
    return sample_id == o.sample_id && model_id == o.model_id && tokens == o.tokens;
  }
};

enum class Kind { Generation, Scoring, Attribution };

std::vector<GenerationRecord> read_generations(std::istream& in, std::string_view source);
std::vector<ScoringRecord> read_scoring(std::istream& in, std::string_view source);
std::vector<AttributionRecord> read_attributions(std::istream& in, std::string_view source);

std::vector<GenerationRecord> load_generations(const std::filesystem::path& path);
std::vector<ScoringRecord> load_scoring(const std::filesystem::path& path);
std::vector<AttributionRecord> load_attributions(const std::filesystem::path& path);

using RecordList = std::variant<std::vector<GenerationRecord>, std::vector<ScoringRecord>, std::vector<AttributionRecord>>;
RecordList read_records(const std::filesystem::path& path, Kind kind);

void write_generations(std::ostream& out, const std::vector<GenerationRecord>& records);
void write_scoring(std::ostream& out, const std::vector<ScoringRecord>& records);
void write_attributions(std::ostream& out, const std::vector<AttributionRecord>& records);

// Token-by-token text and segment equality with the sequence the runner was
// given. Returns the record unchanged; throws DataError at the first divergence.
const AttributionRecord& align_attribution(const AttributionRecord& record, const knowledge::InputSequence& seq);

// Aligns every record against the sequence with the same sample_id.
void align_all(const std::vector<AttributionRecord>& records, const std::vector<knowledge::InputSequence>& seqs);

}  // namespace ldwb::interchange
