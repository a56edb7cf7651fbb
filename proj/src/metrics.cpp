#include "ldwb/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ldwb/error.hpp"
#include "ldwb/text.hpp"

namespace ldwb::metrics {

namespace {

// Neumaier-compensated sum so pooled means do not depend on record order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

PerplexityReport perplexity(const std::vector<interchange::ScoringRecord>& records) {
  if (records.empty()) throw DataError("perplexity: no scoring records");
  PerplexityReport report;
  report.model_id = records.front().model_id;
  CompensatedSum sum;
  for (const auto& r : records) {
    if (r.model_id != report.model_id) {
      throw DataError("perplexity: mixed model_ids '" + report.model_id + "' and '" + r.model_id + "'");
    }
    for (double x : r.token_nll) sum.add(x);
    report.tokens += r.token_nll.size();
  }
  if (report.tokens == 0) throw DataError("perplexity: no scored tokens");
  report.nll = sum.value() / static_cast<double>(report.tokens);
  return report;
}

std::vector<PerplexityReport> perplexity_by_model(const std::vector<interchange::ScoringRecord>& records) {
  std::map<std::string, std::vector<interchange::ScoringRecord>> groups;
  for (const auto& r : records) groups[r.model_id].push_back(r);
  std::vector<PerplexityReport> out;
  for (const auto& [_, g] : groups) out.push_back(perplexity(g));
  if (out.empty()) throw DataError("perplexity: no scoring records");
  return out;
}

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_length += o.hyp_length;
  ref_length += o.ref_length;
  return *this;
}

namespace {

std::map<Tokens, std::size_t> ngram_counts(const Tokens& toks, std::size_t n) {
  std::map<Tokens, std::size_t> counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[Tokens(toks.begin() + static_cast<std::ptrdiff_t>(i), toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

BleuStats bleu_stats(const Tokens& hypothesis, const std::vector<Tokens>& references) {
  if (hypothesis.empty()) throw DataError("bleu: empty hypothesis");
  bool any_ref = false;
  for (const auto& r : references) any_ref = any_ref || !r.empty();
  if (!any_ref) throw DataError("bleu: no non-empty reference");

  BleuStats s;
  s.hyp_length = hypothesis.size();
  std::size_t best = 0;
  std::size_t best_diff = static_cast<std::size_t>(-1);
  for (const auto& r : references) {
    if (r.empty()) continue;
    const std::size_t diff = r.size() > hypothesis.size() ? r.size() - hypothesis.size() : hypothesis.size() - r.size();
    if (diff < best_diff || (diff == best_diff && r.size() < best)) {
      best = r.size();
      best_diff = diff;
    }
  }
  s.ref_length = best;

  for (std::size_t n = 1; n <= 4; ++n) {
    const auto hyp = ngram_counts(hypothesis, n);
    std::map<Tokens, std::size_t> max_ref;
    for (const auto& r : references) {
      for (const auto& [g, c] : ngram_counts(r, n)) max_ref[g] = std::max(max_ref[g], c);
    }
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& [g, c] : hyp) {
      total += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) matched += std::min(c, it->second);
    }
    s.matches[n - 1] = matched;
    s.totals[n - 1] = total;
  }
  return s;
}

double bleu_from_stats(const BleuStats& s, const BleuConfig& config) {
  if (s.hyp_length == 0) throw DataError("bleu: empty hypothesis");
  if (config.smoothing == Smoothing::AddEpsilon && !(config.epsilon > 0.0 && config.epsilon <= 1.0)) {
    throw UsageError("bleu: epsilon must lie in (0, 1]");
  }
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (s.totals[n] == 0) continue;
    ++orders;
    const double total = static_cast<double>(s.totals[n]);
    if (s.matches[n] > 0) {
      log_sum += std::log(static_cast<double>(s.matches[n]) / total);
    } else if (config.smoothing == Smoothing::AddEpsilon) {
      log_sum += std::log(config.epsilon / total);
    } else {
      return 0.0;
    }
  }
  const double brevity = std::min(0.0, 1.0 - static_cast<double>(s.ref_length) / static_cast<double>(s.hyp_length));
  return std::exp(log_sum / static_cast<double>(orders) + brevity);
}

double bleu4(const Tokens& hypothesis, const std::vector<Tokens>& references, const BleuConfig& config) {
  return bleu_from_stats(bleu_stats(hypothesis, references), config);
}

std::size_t SimilarityMatrix::index(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw DataError("similarity matrix: unknown label '" + std::string(label) + "'");
}

SimilarityMatrix similarity_matrix(const std::map<std::string, std::vector<interchange::GenerationRecord>>& generations,
                                   const std::map<std::string, std::string>& ground_truth, const BleuConfig& config) {
  std::vector<std::map<std::string, Tokens>> responses;
  SimilarityMatrix m;
  for (const auto& [model, records] : generations) {
    if (model == kGroundTruth) throw DataError("similarity matrix: model_id '" + model + "' is reserved");
    std::map<std::string, Tokens> by_sample;
    for (const auto& r : records) {
      if (r.model_id != model) throw DataError("similarity matrix: record of '" + r.model_id + "' grouped under '" + model + "'");
      if (!by_sample.emplace(r.sample_id, text::bleu_tokenize(r.response_text)).second) {
        throw DataError("similarity matrix: duplicate sample '" + r.sample_id + "' for model '" + model + "'");
      }
    }
    m.labels.push_back(model);
    responses.push_back(std::move(by_sample));
  }
  {
    std::map<std::string, Tokens> gt;
    for (const auto& [sample, target] : ground_truth) gt.emplace(sample, text::bleu_tokenize(target));
    m.labels.emplace_back(kGroundTruth);
    responses.push_back(std::move(gt));
  }
  if (m.labels.size() < 2) throw DataError("similarity matrix: need at least two labels");

  const std::size_t k = m.labels.size();
  m.cells.assign(k, std::vector<double>(k, 0.0));
  m.shared.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      BleuStats pooled;
      CompensatedSum sum;
      std::size_t shared = 0;
      for (const auto& [sample, hyp] : responses[a]) {
        auto it = responses[b].find(sample);
        if (it == responses[b].end()) continue;
        ++shared;
        const auto stats = bleu_stats(hyp, {it->second});
        if (config.pooling == Pooling::Corpus) {
          pooled += stats;
        } else {
          sum.add(bleu_from_stats(stats, config));
        }
      }
      if (shared == 0) {
        throw DataError("similarity matrix: labels '" + m.labels[a] + "' and '" + m.labels[b] + "' share no samples");
      }
      m.shared[a][b] = shared;
      m.cells[a][b] = config.pooling == Pooling::Corpus ? bleu_from_stats(pooled, config)
                                                        : sum.value() / static_cast<double>(shared);
    }
  }
  return m;
}

std::vector<CurveSeries> learning_curve(const std::vector<CurvePoint>& points, const std::vector<double>& fractions) {
  const std::set<double> expected(fractions.begin(), fractions.end());
  if (expected.size() != fractions.size()) throw UsageError("learning curve: duplicate fraction in subset chain");
  std::map<std::string, std::map<double, PerplexityReport>> by_model;
  for (const auto& p : points) {
    if (!expected.count(p.fraction)) {
      throw DataError("learning curve: fraction " + text::fixed(p.fraction, 4) + " is not in the subset chain");
    }
    auto& series = by_model[p.report.model_id];
    if (!series.emplace(p.fraction, p.report).second) {
      throw DataError("learning curve: duplicate fraction " + text::fixed(p.fraction, 4) + " for model '" +
                      p.report.model_id + "'");
    }
  }
  if (by_model.empty()) throw DataError("learning curve: no points");
  std::vector<CurveSeries> out;
  for (auto& [model, series] : by_model) {
    for (double f : expected) {
      if (!series.count(f)) {
        throw DataError("learning curve: model '" + model + "' is missing fraction " + text::fixed(f, 4));
      }
    }
    CurveSeries cs{model, {}};
    for (auto& [f, r] : series) cs.points.push_back({f, r});
    out.push_back(std::move(cs));
  }
  return out;
}

std::string format_perplexity(const std::vector<PerplexityReport>& reports) {
  std::ostringstream out;
  out << "model\ttokens\tnll\tppl\n";
  for (const auto& r : reports) {
    out << r.model_id << '\t' << r.tokens << '\t' << text::fixed(r.nll, 4) << '\t' << text::fixed(r.ppl(), 4) << '\n';
  }
  return out.str();
}

std::string format_matrix(const SimilarityMatrix& m) {
  std::ostringstream out;
  out << "hypothesis\\reference";
  for (const auto& l : m.labels) out << '\t' << l;
  out << '\n';
  for (std::size_t a = 0; a < m.labels.size(); ++a) {
    out << m.labels[a];
    for (std::size_t b = 0; b < m.labels.size(); ++b) out << '\t' << text::fixed(m.cells[a][b], 6);
    out << '\n';
  }
  return out.str();
}

std::string format_curve(const std::vector<CurveSeries>& series) {
  std::ostringstream out;
  out << "model\tfraction\ttokens\tnll\tppl\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out << s.model_id << '\t' << text::fixed(p.fraction, 4) << '\t' << p.report.tokens << '\t'
          << text::fixed(p.report.nll, 4) << '\t' << text::fixed(p.report.ppl(), 4) << '\n';
    }
  }
  return out.str();
}

}  // namespace ldwb::metrics
