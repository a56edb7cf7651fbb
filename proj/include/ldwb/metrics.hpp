#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ldwb/interchange.hpp"

namespace ldwb::metrics {

// nll is the token-level (micro) mean in nats; ppl is always derived from it.
struct PerplexityReport {
  std::string model_id;
  double nll = 0.0;
  std::size_t tokens = 0;

  double ppl() const { return std::exp(nll); }
};

PerplexityReport perplexity(const std::vector<interchange::ScoringRecord>& records);

// One report per model_id, sorted by model_id.
std::vector<PerplexityReport> perplexity_by_model(const std::vector<interchange::ScoringRecord>& records);

enum class Smoothing { None, AddEpsilon };
enum class Pooling { Sentence, Corpus };

struct BleuConfig {
  Smoothing smoothing = Smoothing::AddEpsilon;
  double epsilon = 0.1;
  Pooling pooling = Pooling::Sentence;
};

using Tokens = std::vector<std::string>;

// Sufficient statistics for BLEU-4: clipped n-gram matches and hypothesis
// n-gram counts for n = 1..4, hypothesis length, and the closest reference
// length (ties go to the shorter reference).
struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  BleuStats& operator+=(const BleuStats& o);
};

BleuStats bleu_stats(const Tokens& hypothesis, const std::vector<Tokens>& references);

// Geometric mean of the modified precisions over the orders the hypothesis
// actually has (n <= hypothesis length), times exp(min(0, 1 - r/c)).
// Zero match counts become epsilon under AddEpsilon; under None they zero the score.
double bleu_from_stats(const BleuStats& stats, const BleuConfig& config = {});

double bleu4(const Tokens& hypothesis, const std::vector<Tokens>& references, const BleuConfig& config = {});

inline constexpr std::string_view kGroundTruth = "GroundTruth";

struct SimilarityMatrix {
  std::vector<std::string> labels;           // models in key order, then GroundTruth
  std::vector<std::vector<double>> cells;    // cells[a][b]: a's responses scored against b's
  std::vector<std::vector<std::size_t>> shared;

  std::size_t index(std::string_view label) const;
  double cell(std::string_view a, std::string_view b) const { return cells[index(a)][index(b)]; }
};

SimilarityMatrix similarity_matrix(const std::map<std::string, std::vector<interchange::GenerationRecord>>& generations,
                                   const std::map<std::string, std::string>& ground_truth,
                                   const BleuConfig& config = {});

struct CurvePoint {
  double fraction = 0.0;
  PerplexityReport report;
};

struct CurveSeries {
  std::string model_id;
  std::vector<CurvePoint> points;  // ascending fraction
};

// Every model must report exactly the fractions in `fractions`.
std::vector<CurveSeries> learning_curve(const std::vector<CurvePoint>& points, const std::vector<double>& fractions);

std::string format_perplexity(const std::vector<PerplexityReport>& reports);
std::string format_matrix(const SimilarityMatrix& m);
std::string format_curve(const std::vector<CurveSeries>& series);

}  // namespace ldwb::metrics
