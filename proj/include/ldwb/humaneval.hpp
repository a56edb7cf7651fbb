#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ldwb/corpus.hpp"

namespace ldwb::humaneval {

inline constexpr std::string_view kGroundTruth = "GroundTruth";

enum class Criterion { Correctness, Appropriateness, Contextualization, Listening };
enum class Vote { Positive, Negative, Unsure };
enum class ErrorLabel { Generic, Hallucination, Incoherent, Other };

inline constexpr std::array<Criterion, 4> kCriteria{Criterion::Correctness, Criterion::Appropriateness,
                                                    Criterion::Contextualization, Criterion::Listening};
inline constexpr std::array<Vote, 3> kVotes{Vote::Positive, Vote::Negative, Vote::Unsure};
inline constexpr std::array<ErrorLabel, 4> kErrorLabels{ErrorLabel::Generic, ErrorLabel::Hallucination,
                                                        ErrorLabel::Incoherent, ErrorLabel::Other};

std::string_view to_string(Criterion c);
std::string_view to_string(Vote v);
std::string_view to_string(ErrorLabel l);
Criterion parse_criterion(std::string_view s);
Vote parse_vote(std::string_view s);
ErrorLabel parse_error_label(std::string_view s);

struct Candidate {
  std::string candidate_id;
  std::string sample_id;
  std::string source;  // model_id or GroundTruth
  std::string text;
};

// One dialogue history with the response candidates judged against it.
struct HistoryItem {
  std::string history_id;
  std::vector<corpus::Turn> history;
  std::vector<Candidate> candidates;
};

struct QualificationItem {
  std::string history_id;
  std::vector<corpus::Turn> history;
  Candidate candidate;
  std::map<Criterion, Vote> gold;
};

struct CampaignConfig {
  std::size_t raters_per_item = 7;
  std::size_t histories_per_worker = 10;
  std::size_t candidates_per_history = 3;
  std::size_t qualification_size = 5;
  double qualification_threshold = 0.6;

  std::size_t worker_quota() const { return histories_per_worker * candidates_per_history; }
  void validate() const;
};

using Votes = std::map<Criterion, Vote>;

struct JudgmentRecord {
  std::string worker_id;
  std::string candidate_id;
  Votes votes;
  std::set<ErrorLabel> error_labels;
  std::string timestamp;

  bool operator==(const JudgmentRecord&) const = default;
};

// Votes cover all four criteria; error labels present whenever Appropriateness
// or Contextualization is Negative. Throws DataError otherwise.
void validate_judgment(const JudgmentRecord& j);
bool requires_error_labels(const Votes& votes);

nlohmann::json to_json(const JudgmentRecord& j);
JudgmentRecord judgment_from_json(const nlohmann::json& j, std::string_view source = "judgment", std::size_t line = 0);

struct Task {
  std::string history_id;
  std::string candidate_id;

  bool operator==(const Task&) const = default;
};

using Plan = std::map<std::string, std::vector<Task>>;

// Each candidate goes to exactly raters_per_item distinct workers and no
// worker exceeds histories_per_worker * candidates_per_history tasks.
// Candidates of one history are handed out in chunks of candidates_per_history
// so a worker tends to see several candidates of the same history.
// Throws DataError naming the binding constraint when the pool is too small.
Plan plan_assignments(const std::vector<HistoryItem>& histories, const std::vector<std::string>& workers,
                      const CampaignConfig& config, std::uint64_t seed);

struct QualificationResult {
  bool passed = false;
  std::size_t matches = 0;
  std::size_t total = 0;
  double agreement = 0.0;
};

// Share of criterion votes equal to gold; Unsure never matches.
QualificationResult qualify(std::string_view worker_id, const std::vector<JudgmentRecord>& judgments,
                            const std::map<std::string, Votes>& gold, const CampaignConfig& config);

// Strict plurality; anything else resolves to Unsure.
Vote majority_label(std::span<const Vote> votes);

struct MajorityRow {
  std::string source;
  std::size_t candidates = 0;
  std::map<Criterion, double> percent_positive;
};

using CandidateIndex = std::map<std::string, Candidate>;

CandidateIndex index_candidates(const std::vector<HistoryItem>& histories);

std::vector<MajorityRow> aggregate_majority(const std::vector<JudgmentRecord>& judgments, const CandidateIndex& candidates,
                                            const CampaignConfig& config);

// Fleiss' kappa over rows of per-category counts (Positive, Negative, Unsure).
struct KappaResult {
  std::optional<double> kappa;  // nullopt when expected agreement is 1
  double observed = 0.0;        // mean P_i
  double expected = 0.0;        // sum p_j^2
  std::size_t items = 0;
  std::size_t raters = 0;
};

KappaResult fleiss_kappa(const std::vector<std::array<std::size_t, 3>>& table);

enum class Band { Poor, Fair, Moderate, Substantial, AlmostPerfect };
Band band(double kappa);
std::string_view to_string(Band b);

struct Rollup {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

struct AgreementReport {
  std::map<std::string, std::map<Criterion, KappaResult>> cells;  // source -> criterion
  std::map<std::string, Rollup> per_source;
  std::map<Criterion, Rollup> per_criterion;
  std::map<Criterion, Band> criterion_band;
};

AgreementReport agreement_report(const std::vector<JudgmentRecord>& judgments, const CandidateIndex& candidates);

// Percent of a source's error-labelled judgments that carry each label.
using ErrorDistribution = std::map<std::string, std::map<ErrorLabel, double>>;
ErrorDistribution error_distribution(const std::vector<JudgmentRecord>& judgments, const CandidateIndex& candidates);

std::string format_majority(const std::vector<MajorityRow>& rows);
std::string format_agreement(const AgreementReport& report);
std::string format_errors(const ErrorDistribution& dist);

nlohmann::json majority_json(const std::vector<MajorityRow>& rows);
nlohmann::json agreement_json(const AgreementReport& report);
nlohmann::json errors_json(const ErrorDistribution& dist);

// Campaign definition as posted to the service.
struct Campaign {
  CampaignConfig config;
  std::uint64_t seed = 0;
  std::vector<std::string> workers;
  std::vector<HistoryItem> histories;
  std::vector<QualificationItem> qualification;

  void validate() const;
};

Campaign campaign_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Campaign& c);
nlohmann::json plan_to_json(const Plan& plan);

}  // namespace ldwb::humaneval
