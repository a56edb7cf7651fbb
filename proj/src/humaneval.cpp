#include "ldwb/humaneval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ldwb/error.hpp"
#include "ldwb/jsonl.hpp"
#include "ldwb/text.hpp"

namespace ldwb::humaneval {

using jsonl::json;

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::Correctness: return "correctness";
    case Criterion::Appropriateness: return "appropriateness";
    case Criterion::Contextualization: return "contextualization";
    case Criterion::Listening: return "listening";
  }
  return "?";
}

std::string_view to_string(Vote v) {
  switch (v) {
    case Vote::Positive: return "positive";
    case Vote::Negative: return "negative";
    case Vote::Unsure: return "unsure";
  }
  return "?";
}

std::string_view to_string(ErrorLabel l) {
  switch (l) {
    case ErrorLabel::Generic: return "generic";
    case ErrorLabel::Hallucination: return "hallucination";
    case ErrorLabel::Incoherent: return "incoherent";
    case ErrorLabel::Other: return "other";
  }
  return "?";
}

Criterion parse_criterion(std::string_view s) {
  for (auto c : kCriteria) {
    if (to_string(c) == s) return c;
  }
  throw DataError("unknown criterion '" + std::string(s) + "'");
}

Vote parse_vote(std::string_view s) {
  for (auto v : kVotes) {
    if (to_string(v) == s) return v;
  }
  throw DataError("unknown vote '" + std::string(s) + "'");
}

ErrorLabel parse_error_label(std::string_view s) {
  for (auto l : kErrorLabels) {
    if (to_string(l) == s) return l;
  }
  throw DataError("unknown error label '" + std::string(s) + "'");
}

void CampaignConfig::validate() const {
  if (raters_per_item == 0 || histories_per_worker == 0 || candidates_per_history == 0 || qualification_size == 0) {
    throw UsageError("campaign config values must be positive integers");
  }
  if (!(qualification_threshold >= 0.0 && qualification_threshold <= 1.0)) {
    throw UsageError("qualification_threshold must lie in [0, 1]");
  }
}

bool requires_error_labels(const Votes& votes) {
  auto neg = [&](Criterion c) {
    auto it = votes.find(c);
    return it != votes.end() && it->second == Vote::Negative;
  };
  return neg(Criterion::Appropriateness) || neg(Criterion::Contextualization);
}

void validate_judgment(const JudgmentRecord& j) {
  if (text::trim(j.worker_id).empty()) throw DataError("judgment: empty worker_id");
  if (text::trim(j.candidate_id).empty()) throw DataError("judgment: empty candidate_id");
  for (auto c : kCriteria) {
    if (!j.votes.count(c)) throw DataError("judgment: missing vote for " + std::string(to_string(c)));
  }
  if (j.votes.size() != kCriteria.size()) throw DataError("judgment: unexpected criterion in votes");
  if (requires_error_labels(j.votes) && j.error_labels.empty()) {
    throw DataError("judgment: error_labels are required when appropriateness or contextualization is negative");
  }
}

json to_json(const JudgmentRecord& j) {
  json votes = json::object();
  for (const auto& [c, v] : j.votes) votes[std::string(to_string(c))] = to_string(v);
  json labels = json::array();
  for (auto l : j.error_labels) labels.push_back(to_string(l));
  return {{"worker_id", j.worker_id},
          {"candidate_id", j.candidate_id},
          {"votes", std::move(votes)},
          {"error_labels", std::move(labels)},
          {"timestamp", j.timestamp}};
}

JudgmentRecord judgment_from_json(const json& value, std::string_view source, std::size_t line) {
  jsonl::Record rec(value, source, line);
  rec.only_keys({"worker_id", "candidate_id", "votes", "error_labels", "timestamp"});
  JudgmentRecord j;
  j.worker_id = rec.non_empty_string("worker_id");
  j.candidate_id = rec.non_empty_string("candidate_id");
  j.timestamp = rec.non_empty_string("timestamp");
  try {
    for (const auto& [k, v] : rec.object("votes").items()) {
      if (!v.is_string()) rec.fail("votes must map criteria to strings");
      j.votes[parse_criterion(k)] = parse_vote(v.get<std::string>());
    }
    if (rec.has("error_labels")) {
      for (const auto& l : rec.array("error_labels")) {
        if (!l.is_string()) rec.fail("error_labels must be strings");
        if (!j.error_labels.insert(parse_error_label(l.get<std::string>())).second) rec.fail("duplicate error label");
      }
    }
    validate_judgment(j);
  } catch (const DataError& e) {
    if (e.line()) throw;
    rec.fail(e.what());
  }
  return j;
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool plan_ok(const Plan& plan, std::size_t quota) {
  for (const auto& [_, tasks] : plan) {
    if (tasks.size() > quota) return false;
  }
  return true;
}

}  // namespace

Plan plan_assignments(const std::vector<HistoryItem>& histories, const std::vector<std::string>& workers,
                      const CampaignConfig& config, std::uint64_t seed) {
  config.validate();
  std::unordered_set<std::string> worker_set;
  for (const auto& w : workers) {
    if (text::trim(w).empty()) throw DataError("plan: empty worker id");
    if (!worker_set.insert(w).second) throw DataError("plan: duplicate worker '" + w + "'");
  }
  std::unordered_set<std::string> cand_set;
  std::size_t total = 0;
  for (const auto& h : histories) {
    for (const auto& c : h.candidates) {
      if (!cand_set.insert(c.candidate_id).second) throw DataError("plan: duplicate candidate '" + c.candidate_id + "'");
      ++total;
    }
  }
  const std::size_t r = config.raters_per_item;
  const std::size_t w = workers.size();
  const std::size_t quota = config.worker_quota();
  if (r > w) {
    throw DataError("infeasible plan: raters_per_item (" + std::to_string(r) + ") exceeds the worker pool (" +
                    std::to_string(w) + ")");
  }
  if (r * total > w * quota) {
    throw DataError("infeasible plan: worker capacity (" + std::to_string(w) + " workers x quota " +
                    std::to_string(quota) + " = " + std::to_string(w * quota) + ") is below the " +
                    std::to_string(r * total) + " required tasks (" + std::to_string(total) + " candidates x " +
                    std::to_string(r) + " raters)");
  }

  const auto pool = corpus::SeededPermutation(derive_seed(seed, 0)).apply(workers);
  const auto hist_order = corpus::SeededPermutation(derive_seed(seed, 1)).indices(histories.size());
  std::vector<std::vector<Task>> chunks;
  for (std::size_t hi = 0; hi < hist_order.size(); ++hi) {
    const auto& h = histories[hist_order[hi]];
    const auto cand_order = corpus::SeededPermutation(derive_seed(seed, 2 + hi)).indices(h.candidates.size());
    for (std::size_t k = 0; k < cand_order.size(); k += config.candidates_per_history) {
      std::vector<Task> chunk;
      for (std::size_t j = k; j < std::min(k + config.candidates_per_history, cand_order.size()); ++j) {
        chunk.push_back({h.history_id, h.candidates[cand_order[j]].candidate_id});
      }
      chunks.push_back(std::move(chunk));
    }
  }

  // Chunk-level round robin: the r copies of a chunk land on r consecutive
  // (hence distinct) workers.
  Plan plan;
  for (const auto& id : pool) plan[id];
  std::size_t b = 0;
  for (const auto& chunk : chunks) {
    for (std::size_t rep = 0; rep < r; ++rep, ++b) {
      auto& tasks = plan[pool[b % w]];
      tasks.insert(tasks.end(), chunk.begin(), chunk.end());
    }
  }
  if (plan_ok(plan, quota)) return plan;

  // Task-level round robin always fits once the capacity check passed.
  plan.clear();
  for (const auto& id : pool) plan[id];
  std::size_t t = 0;
  for (const auto& chunk : chunks) {
    for (const auto& task : chunk) {
      for (std::size_t rep = 0; rep < r; ++rep, ++t) plan[pool[t % w]].push_back(task);
    }
  }
  return plan;
}

QualificationResult qualify(std::string_view worker_id, const std::vector<JudgmentRecord>& judgments,
                            const std::map<std::string, Votes>& gold, const CampaignConfig& config) {
  std::set<std::string> judged;
  QualificationResult out;
  for (const auto& j : judgments) {
    if (j.worker_id != worker_id) continue;
    auto g = gold.find(j.candidate_id);
    if (g == gold.end()) throw DataError("qualification: candidate '" + j.candidate_id + "' is not a qualification item");
    if (!judged.insert(j.candidate_id).second) {
      throw DataError("qualification: candidate '" + j.candidate_id + "' judged twice");
    }
    for (auto c : kCriteria) {
      ++out.total;
      auto v = j.votes.find(c);
      auto e = g->second.find(c);
      if (v != j.votes.end() && e != g->second.end() && v->second != Vote::Unsure && v->second == e->second) ++out.matches;
    }
  }
  if (judged.size() != config.qualification_size) {
    throw DataError("incomplete qualification for worker '" + std::string(worker_id) + "': " +
                    std::to_string(judged.size()) + " of " + std::to_string(config.qualification_size) + " samples");
  }
  out.agreement = static_cast<double>(out.matches) / static_cast<double>(out.total);
  out.passed = static_cast<double>(out.matches) + 1e-9 >= config.qualification_threshold * static_cast<double>(out.total);
  return out;
}

Vote majority_label(std::span<const Vote> votes) {
  std::array<std::size_t, 3> counts{};
  for (auto v : votes) ++counts[static_cast<std::size_t>(v)];
  for (std::size_t i = 0; i < 3; ++i) {
    bool strict = true;
    for (std::size_t j = 0; j < 3; ++j) strict = strict && (i == j || counts[i] > counts[j]);
    if (strict) return kVotes[i];
  }
  return Vote::Unsure;
}

CandidateIndex index_candidates(const std::vector<HistoryItem>& histories) {
  CandidateIndex idx;
  for (const auto& h : histories) {
    for (const auto& c : h.candidates) {
      if (!idx.emplace(c.candidate_id, c).second) throw DataError("duplicate candidate '" + c.candidate_id + "'");
    }
  }
  return idx;
}

namespace {

// candidate_id -> judgments, rejecting unknown candidates and duplicate raters.
std::map<std::string, std::vector<const JudgmentRecord*>> group_by_candidate(const std::vector<JudgmentRecord>& judgments,
                                                                              const CandidateIndex& candidates) {
  std::map<std::string, std::vector<const JudgmentRecord*>> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& j : judgments) {
    if (!candidates.count(j.candidate_id)) throw DataError("judgment for unknown candidate '" + j.candidate_id + "'");
    if (!seen.insert({j.worker_id, j.candidate_id}).second) {
      throw DataError("duplicate judgment by '" + j.worker_id + "' on '" + j.candidate_id + "'");
    }
    out[j.candidate_id].push_back(&j);
  }
  return out;
}

std::vector<std::string> ordered_sources(const std::set<std::string>& sources) {
  std::vector<std::string> out;
  if (sources.count(std::string(kGroundTruth))) out.emplace_back(kGroundTruth);
  for (const auto& s : sources) {
    if (s != kGroundTruth) out.push_back(s);
  }
  return out;
}

Rollup rollup(const std::vector<double>& xs) {
  Rollup r;
  r.count = xs.size();
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(var / static_cast<double>(xs.size()));
  return r;
}

}  // namespace

std::vector<MajorityRow> aggregate_majority(const std::vector<JudgmentRecord>& judgments, const CandidateIndex& candidates,
                                            const CampaignConfig& config) {
  const auto grouped = group_by_candidate(judgments, candidates);
  std::map<std::string, MajorityRow> rows;
  std::map<std::string, std::map<Criterion, std::size_t>> positives;
  for (const auto& [id, cand] : candidates) {
    auto it = grouped.find(id);
    const std::size_t n = it == grouped.end() ? 0 : it->second.size();
    if (n != config.raters_per_item) {
      throw DataError("under-annotated candidate '" + id + "': " + std::to_string(n) + " judgments, expected " +
                      std::to_string(config.raters_per_item));
    }
    auto& row = rows[cand.source];
    row.source = cand.source;
    ++row.candidates;
    for (auto c : kCriteria) {
      std::vector<Vote> votes;
      for (const auto* j : it->second) votes.push_back(j->votes.at(c));
      if (majority_label(votes) == Vote::Positive) ++positives[cand.source][c];
    }
  }
  std::set<std::string> sources;
  for (const auto& [s, _] : rows) sources.insert(s);
  std::vector<MajorityRow> out;
  for (const auto& s : ordered_sources(sources)) {
    auto row = rows[s];
    for (auto c : kCriteria) {
      row.percent_positive[c] = 100.0 * static_cast<double>(positives[s][c]) / static_cast<double>(row.candidates);
    }
    out.push_back(std::move(row));
  }
  return out;
}

KappaResult fleiss_kappa(const std::vector<std::array<std::size_t, 3>>& table) {
  if (table.empty()) throw DataError("fleiss_kappa: no items");
  KappaResult out;
  out.items = table.size();
  out.raters = table.front()[0] + table.front()[1] + table.front()[2];
  if (out.raters < 2) throw DataError("fleiss_kappa: need at least 2 ratings per item");
  std::array<std::size_t, 3> column{};
  std::size_t agreement_sum = 0;  // sum_i sum_j n_ij^2
  for (const auto& row : table) {
    if (row[0] + row[1] + row[2] != out.raters) throw DataError("fleiss_kappa: unequal rating counts across items");
    for (std::size_t j = 0; j < 3; ++j) {
      column[j] += row[j];
      agreement_sum += row[j] * row[j];
    }
  }
  const double n = static_cast<double>(out.raters);
  const double items = static_cast<double>(out.items);
  out.observed = (static_cast<double>(agreement_sum) - items * n) / (items * n * (n - 1.0));
  for (auto c : column) {
    const double p = static_cast<double>(c) / (items * n);
    out.expected += p * p;
  }
  if (out.expected >= 1.0) return out;
  out.kappa = (out.observed - out.expected) / (1.0 - out.expected);
  return out;
}

Band band(double kappa) {
  if (kappa <= 0.20) return Band::Poor;
  if (kappa <= 0.40) return Band::Fair;
  if (kappa <= 0.60) return Band::Moderate;
  if (kappa <= 0.80) return Band::Substantial;
  return Band::AlmostPerfect;
}

std::string_view to_string(Band b) {
  switch (b) {
    case Band::Poor: return "Poor";
    case Band::Fair: return "Fair";
    case Band::Moderate: return "Moderate";
    case Band::Substantial: return "Substantial";
    case Band::AlmostPerfect: return "Almost Perfect";
  }
  return "?";
}

AgreementReport agreement_report(const std::vector<JudgmentRecord>& judgments, const CandidateIndex& candidates) {
  const auto grouped = group_by_candidate(judgments, candidates);
  std::map<std::string, std::map<Criterion, std::vector<std::array<std::size_t, 3>>>> tables;
  for (const auto& [id, js] : grouped) {
    const auto& source = candidates.at(id).source;
    for (auto c : kCriteria) {
      std::array<std::size_t, 3> row{};
      for (const auto* j : js) ++row[static_cast<std::size_t>(j->votes.at(c))];
      tables[source][c].push_back(row);
    }
  }
  AgreementReport report;
  std::map<Criterion, std::vector<double>> by_criterion;
  for (const auto& [source, per_crit] : tables) {
    std::vector<double> by_source;
    for (const auto& [c, table] : per_crit) {
      auto k = fleiss_kappa(table);
      if (k.kappa) {
        by_source.push_back(*k.kappa);
        by_criterion[c].push_back(*k.kappa);
      }
      report.cells[source][c] = k;
    }
    report.per_source[source] = rollup(by_source);
  }
  for (const auto& [c, xs] : by_criterion) {
    report.per_criterion[c] = rollup(xs);
    report.criterion_band[c] = band(report.per_criterion[c].mean);
  }
  return report;
}

ErrorDistribution error_distribution(const std::vector<JudgmentRecord>& judgments, const CandidateIndex& candidates) {
  std::map<std::string, std::size_t> denominators;
  std::map<std::string, std::map<ErrorLabel, std::size_t>> numerators;
  for (const auto& j : judgments) {
    auto it = candidates.find(j.candidate_id);
    if (it == candidates.end()) throw DataError("judgment for unknown candidate '" + j.candidate_id + "'");
    const auto& source = it->second.source;
    denominators[source];
    if (j.error_labels.empty()) continue;
    ++denominators[source];
    for (auto l : j.error_labels) ++numerators[source][l];
  }
  ErrorDistribution out;
  for (const auto& [source, d] : denominators) {
    for (auto l : kErrorLabels) {
      const std::size_t num = numerators[source][l];
      out[source][l] = d == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(d);
    }
  }
  return out;
}

std::string format_majority(const std::vector<MajorityRow>& rows) {
  std::ostringstream out;
  out << "source\tcandidates";
  for (auto c : kCriteria) out << '\t' << to_string(c);
  out << '\n';
  for (const auto& r : rows) {
    out << r.source << '\t' << r.candidates;
    for (auto c : kCriteria) out << '\t' << text::fixed(r.percent_positive.at(c), 2) << '%';
    out << '\n';
  }
  return out.str();
}

std::string format_agreement(const AgreementReport& report) {
  std::ostringstream out;
  auto cell = [](const KappaResult& k) { return k.kappa ? text::fixed(*k.kappa, 2) : std::string("undefined"); };
  auto roll = [](const Rollup& r) { return text::fixed(r.mean, 2) + "+-" + text::fixed(r.std, 2); };
  out << "source";
  for (auto c : kCriteria) out << '\t' << to_string(c);
  out << "\tper_source\n";
  std::set<std::string> sources;
  for (const auto& [s, _] : report.cells) sources.insert(s);
  for (const auto& s : ordered_sources(sources)) {
    out << s;
    const auto& row = report.cells.at(s);
    for (auto c : kCriteria) out << '\t' << (row.count(c) ? cell(row.at(c)) : "-");
    out << '\t' << roll(report.per_source.at(s)) << '\n';
  }
  out << "per_criterion";
  for (auto c : kCriteria) out << '\t' << (report.per_criterion.count(c) ? roll(report.per_criterion.at(c)) : "-");
  out << "\t-\nband";
  for (auto c : kCriteria) out << '\t' << (report.criterion_band.count(c) ? to_string(report.criterion_band.at(c)) : "-");
  out << "\t-\n";
  return out.str();
}

std::string format_errors(const ErrorDistribution& dist) {
  std::ostringstream out;
  out << "source";
  for (auto l : kErrorLabels) out << '\t' << to_string(l);
  out << '\n';
  std::set<std::string> sources;
  for (const auto& [s, _] : dist) sources.insert(s);
  for (const auto& s : ordered_sources(sources)) {
    out << s;
    for (auto l : kErrorLabels) out << '\t' << text::fixed(dist.at(s).at(l), 2) << '%';
    out << '\n';
  }
  return out.str();
}

json majority_json(const std::vector<MajorityRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json pp = json::object();
    for (const auto& [c, v] : r.percent_positive) pp[std::string(to_string(c))] = v;
    out.push_back({{"source", r.source}, {"candidates", r.candidates}, {"percent_positive", std::move(pp)}});
  }
  return out;
}

json agreement_json(const AgreementReport& report) {
  json cells = json::object();
  for (const auto& [s, row] : report.cells) {
    json r = json::object();
    for (const auto& [c, k] : row) r[std::string(to_string(c))] = k.kappa ? json(*k.kappa) : json(nullptr);
    cells[s] = std::move(r);
  }
  auto roll = [](const Rollup& r) { return json{{"mean", r.mean}, {"std", r.std}, {"count", r.count}}; };
  json per_source = json::object();
  for (const auto& [s, r] : report.per_source) per_source[s] = roll(r);
  json per_criterion = json::object();
  for (const auto& [c, r] : report.per_criterion) {
    auto j = roll(r);
    j["band"] = to_string(report.criterion_band.at(c));
    per_criterion[std::string(to_string(c))] = std::move(j);
  }
  return {{"kappa", std::move(cells)}, {"per_source", std::move(per_source)}, {"per_criterion", std::move(per_criterion)}};
}

json errors_json(const ErrorDistribution& dist) {
  json out = json::object();
  for (const auto& [s, row] : dist) {
    json r = json::object();
    for (const auto& [l, v] : row) r[std::string(to_string(l))] = v;
    out[s] = std::move(r);
  }
  return out;
}

namespace {

std::vector<corpus::Turn> turns_from(const jsonl::Record& rec, std::string_view key) {
  std::vector<corpus::Turn> turns;
  for (const auto& t : rec.array(key)) {
    auto tr = rec.child(t);
    tr.only_keys({"speaker", "text"});
    corpus::Turn turn;
    try {
      turn.speaker = corpus::parse_speaker(tr.string("speaker"));
    } catch (const DataError& e) {
      rec.fail(e.what());
    }
    turn.text = tr.non_empty_string("text");
    turn.turn_index = turns.size();
    turns.push_back(std::move(turn));
  }
  return turns;
}

json turns_json(const std::vector<corpus::Turn>& turns) {
  json out = json::array();
  for (const auto& t : turns) out.push_back({{"speaker", corpus::to_string(t.speaker)}, {"text", t.text}});
  return out;
}

Candidate candidate_from(const jsonl::Record& rec) {
  rec.only_keys({"candidate_id", "sample_id", "source", "text"});
  return {rec.non_empty_string("candidate_id"), rec.non_empty_string("sample_id"), rec.non_empty_string("source"),
          rec.non_empty_string("text")};
}

json candidate_json(const Candidate& c) {
  return {{"candidate_id", c.candidate_id}, {"sample_id", c.sample_id}, {"source", c.source}, {"text", c.text}};
}

std::size_t positive_int(const jsonl::Record& rec, std::string_view key, std::size_t fallback) {
  if (!rec.has(key)) return fallback;
  auto v = rec.integer(key);
  if (v <= 0) rec.fail("'" + std::string(key) + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

void Campaign::validate() const {
  config.validate();
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> history_ids;
  if (histories.empty()) throw DataError("campaign: no histories");
  for (const auto& h : histories) {
    if (!history_ids.insert(h.history_id).second) throw DataError("campaign: duplicate history '" + h.history_id + "'");
    if (h.history.empty()) throw DataError("campaign: history '" + h.history_id + "' has no turns");
    std::size_t gt = 0;
    for (const auto& c : h.candidates) {
      if (!ids.insert(c.candidate_id).second) throw DataError("campaign: duplicate candidate '" + c.candidate_id + "'");
      if (c.source == kGroundTruth) ++gt;
    }
    if (gt != 1) throw DataError("campaign: history '" + h.history_id + "' needs exactly one GroundTruth candidate");
  }
  if (qualification.size() != config.qualification_size) {
    throw DataError("campaign: " + std::to_string(qualification.size()) + " qualification items, expected " +
                    std::to_string(config.qualification_size));
  }
  for (const auto& q : qualification) {
    if (!ids.insert(q.candidate.candidate_id).second) {
      throw DataError("campaign: duplicate candidate '" + q.candidate.candidate_id + "'");
    }
    for (auto c : kCriteria) {
      if (!q.gold.count(c)) throw DataError("campaign: qualification gold lacks " + std::string(to_string(c)));
    }
  }
  std::unordered_set<std::string> ws;
  for (const auto& w : workers) {
    if (!ws.insert(w).second) throw DataError("campaign: duplicate worker '" + w + "'");
  }
}

Campaign campaign_from_json(const json& j) {
  jsonl::Record rec(j, "campaign", 0);
  rec.only_keys({"config", "seed", "workers", "histories", "qualification"});
  Campaign c;
  if (rec.has("config")) {
    auto cr = rec.child(rec.object("config"));
    cr.only_keys({"raters_per_item", "histories_per_worker", "candidates_per_history", "qualification_size",
                  "qualification_threshold"});
    c.config.raters_per_item = positive_int(cr, "raters_per_item", c.config.raters_per_item);
    c.config.histories_per_worker = positive_int(cr, "histories_per_worker", c.config.histories_per_worker);
    c.config.candidates_per_history = positive_int(cr, "candidates_per_history", c.config.candidates_per_history);
    c.config.qualification_size = positive_int(cr, "qualification_size", c.config.qualification_size);
    if (cr.has("qualification_threshold")) c.config.qualification_threshold = cr.number("qualification_threshold");
  }
  if (rec.has("seed")) c.seed = static_cast<std::uint64_t>(rec.integer("seed"));
  for (const auto& w : rec.array("workers")) {
    if (!w.is_string() || text::trim(w.get<std::string>()).empty()) rec.fail("workers must be non-empty strings");
    c.workers.push_back(w.get<std::string>());
  }
  for (const auto& h : rec.array("histories")) {
    auto hr = rec.child(h);
    hr.only_keys({"history_id", "history", "candidates"});
    HistoryItem item;
    item.history_id = hr.non_empty_string("history_id");
    item.history = turns_from(hr, "history");
    for (const auto& cj : hr.array("candidates")) item.candidates.push_back(candidate_from(hr.child(cj)));
    c.histories.push_back(std::move(item));
  }
  if (rec.has("qualification")) {
    for (const auto& q : rec.array("qualification")) {
      auto qr = rec.child(q);
      qr.only_keys({"history_id", "history", "candidate", "gold"});
      QualificationItem item;
      item.history_id = qr.non_empty_string("history_id");
      item.history = turns_from(qr, "history");
      item.candidate = candidate_from(qr.child(qr.object("candidate")));
      try {
        for (const auto& [k, v] : qr.object("gold").items()) {
          if (!v.is_string()) qr.fail("gold votes must be strings");
          item.gold[parse_criterion(k)] = parse_vote(v.get<std::string>());
        }
      } catch (const DataError& e) {
        if (e.line()) throw;
        qr.fail(e.what());
      }
      c.qualification.push_back(std::move(item));
    }
  }
  try {
    c.validate();
  } catch (const UsageError& e) {
    throw DataError(std::string("campaign: ") + e.what());
  }
  return c;
}

json to_json(const Campaign& c) {
  json histories = json::array();
  for (const auto& h : c.histories) {
    json cands = json::array();
    for (const auto& cand : h.candidates) cands.push_back(candidate_json(cand));
    histories.push_back({{"history_id", h.history_id}, {"history", turns_json(h.history)}, {"candidates", std::move(cands)}});
  }
  json qual = json::array();
  for (const auto& q : c.qualification) {
    json gold = json::object();
    for (const auto& [k, v] : q.gold) gold[std::string(to_string(k))] = to_string(v);
    qual.push_back({{"history_id", q.history_id},
                    {"history", turns_json(q.history)},
                    {"candidate", candidate_json(q.candidate)},
                    {"gold", std::move(gold)}});
  }
  return {{"config",
           {{"raters_per_item", c.config.raters_per_item},
            {"histories_per_worker", c.config.histories_per_worker},
            {"candidates_per_history", c.config.candidates_per_history},
            {"qualification_size", c.config.qualification_size},
            {"qualification_threshold", c.config.qualification_threshold}}},
          {"seed", c.seed},
          {"workers", c.workers},
          {"histories", std::move(histories)},
          {"qualification", std::move(qual)}};
}

json plan_to_json(const Plan& plan) {
  json out = json::object();
  for (const auto& [w, tasks] : plan) {
    json ts = json::array();
    for (const auto& t : tasks) ts.push_back({{"history_id", t.history_id}, {"candidate_id", t.candidate_id}});
    out[w] = std::move(ts);
  }
  return out;
}

}  // namespace ldwb::humaneval
