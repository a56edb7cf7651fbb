#include "ldwb/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ldwb/error.hpp"
#include "ldwb/text.hpp"

namespace ldwb::attribution {

using knowledge::Role;
using knowledge::Segment;

namespace {

const std::string& common_model(const std::vector<interchange::AttributionRecord>& records, const char* what) {
  if (records.empty()) throw DataError(std::string(what) + ": no attribution records");
  const auto& model = records.front().model_id;
  for (const auto& r : records) {
    if (r.model_id != model) throw DataError(std::string(what) + ": mixed model_ids '" + model + "' and '" + r.model_id + "'");
  }
  return model;
}

}  // namespace

PositiveProfile positive_stats(const std::vector<interchange::AttributionRecord>& records, knowledge::Repr repr,
                               const PositiveOptions& options) {
  PositiveProfile p;
  p.model_id = common_model(records, "positive_stats");
  p.repr = repr;
  std::map<std::string, std::size_t> upos_counts;
  std::map<Role, std::size_t> role_counts;
  std::size_t role_total = 0;
  for (const auto& r : records) {
    for (const auto& t : r.tokens) {
      if (options.segment && t.segment != *options.segment) continue;
      if (options.exclude_tags && t.role == Role::Tag) continue;
      ++p.considered;
      if (!(t.score > 0.0)) continue;
      ++p.positive;
      ++upos_counts[t.upos.value_or("_")];
      if (t.role == Role::Event || t.role == Role::Participant) {
        ++role_counts[t.role];
        ++role_total;
      }
    }
  }
  if (p.considered == 0) throw DataError("positive_stats: no tokens to consider");
  p.positive_fraction = static_cast<double>(p.positive) / static_cast<double>(p.considered);
  for (const auto& [upos, c] : upos_counts) p.by_upos[upos] = static_cast<double>(c) / static_cast<double>(p.positive);
  for (const auto& [role, c] : role_counts) p.by_role[role] = static_cast<double>(c) / static_cast<double>(role_total);
  return p;
}

RecordShares record_shares(const interchange::AttributionRecord& record, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw UsageError("top_fraction must lie in (0, 1]");
  RecordShares s;
  s.sample_id = record.sample_id;
  const std::size_t n = record.tokens.size();
  for (const auto& t : record.tokens) {
    (t.segment == Segment::Knowledge ? s.knowledge_length : s.history_length) += 1;
  }
  if (s.knowledge_length == 0 || s.history_length == 0) {
    throw DataError("significant_stats: record '" + record.sample_id + "' has an empty " +
                    (s.knowledge_length == 0 ? "knowledge" : "history") + " segment");
  }
  s.top_k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(n) - 1e-9)), 1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return record.tokens[a].score > record.tokens[b].score; });
  for (std::size_t i = 0; i < s.top_k; ++i) {
    (record.tokens[order[i]].segment == Segment::Knowledge ? s.knowledge_top : s.history_top) += 1;
  }
  const double nk = static_cast<double>(s.knowledge_top) / static_cast<double>(s.knowledge_length);
  const double nh = static_cast<double>(s.history_top) / static_cast<double>(s.history_length);
  s.knowledge_share = 100.0 * nk / (nk + nh);
  s.history_share = 100.0 * nh / (nk + nh);
  return s;
}

std::vector<interchange::AttributionRecord> without_empty_segments(const std::vector<interchange::AttributionRecord>& records,
                                                                   std::size_t& skipped) {
  std::vector<interchange::AttributionRecord> out;
  skipped = 0;
  for (const auto& r : records) {
    bool k = false, h = false;
    for (const auto& t : r.tokens) (t.segment == Segment::Knowledge ? k : h) = true;
    if (k && h) {
      out.push_back(r);
    } else {
      ++skipped;
    }
  }
  return out;
}

SignificantShares significant_stats(const std::vector<interchange::AttributionRecord>& records, knowledge::Repr repr,
                                    double top_fraction, SharePooling pooling) {
  SignificantShares out;
  out.model_id = common_model(records, "significant_stats");
  out.repr = repr;
  double k_sum = 0.0;
  double h_sum = 0.0;
  std::size_t k_top = 0, k_len = 0, h_top = 0, h_len = 0;
  for (const auto& r : records) {
    auto s = record_shares(r, top_fraction);
    k_sum += s.knowledge_share;
    h_sum += s.history_share;
    k_top += s.knowledge_top;
    k_len += s.knowledge_length;
    h_top += s.history_top;
    h_len += s.history_length;
    out.per_record.push_back(std::move(s));
  }
  if (pooling == SharePooling::MeanOfRecords) {
    out.knowledge_share = k_sum / static_cast<double>(records.size());
    out.history_share = h_sum / static_cast<double>(records.size());
  } else {
    const double nk = static_cast<double>(k_top) / static_cast<double>(k_len);
    const double nh = static_cast<double>(h_top) / static_cast<double>(h_len);
    out.knowledge_share = 100.0 * nk / (nk + nh);
    out.history_share = 100.0 * nh / (nk + nh);
  }
  return out;
}

std::string format_shares(const SignificantShares& s) {
  return text::fixed(s.knowledge_share, 1) + "% | " + text::fixed(s.history_share, 1) + "%";
}

std::string format_significant_table(const std::vector<SignificantShares>& rows) {
  std::ostringstream out;
  out << "model\trepr\trecords\tskipped\tknowledge\thistory\n";
  for (const auto& r : rows) {
    out << r.model_id << '\t' << knowledge::to_string(r.repr) << '\t' << r.per_record.size() << '\t' << r.skipped << '\t'
        << text::fixed(r.knowledge_share, 1) << "%\t" << text::fixed(r.history_share, 1) << "%\n";
  }
  return out.str();
}

std::string format_record_dump(const SignificantShares& s) {
  std::ostringstream out;
  out << "sample_id\tknowledge_len\thistory_len\ttop_k\tknowledge_top\thistory_top\tknowledge\thistory\n";
  for (const auto& r : s.per_record) {
    out << r.sample_id << '\t' << r.knowledge_length << '\t' << r.history_length << '\t' << r.top_k << '\t'
        << r.knowledge_top << '\t' << r.history_top << '\t' << text::fixed(r.knowledge_share, 4) << '\t'
        << text::fixed(r.history_share, 4) << '\n';
  }
  return out.str();
}

std::string format_positive_table(const std::vector<PositiveProfile>& rows) {
  std::ostringstream out;
  out << "model\trepr\tconsidered\tpositive\tpositive_fraction\tbreakdown\tkey\tshare\n";
  for (const auto& p : rows) {
    const std::string head = p.model_id + '\t' + std::string(knowledge::to_string(p.repr)) + '\t' +
                             std::to_string(p.considered) + '\t' + std::to_string(p.positive) + '\t' +
                             text::fixed(p.positive_fraction, 4);
    out << head << "\ttotal\t-\t-\n";
    for (const auto& [upos, f] : p.by_upos) out << head << "\tupos\t" << upos << '\t' << text::fixed(f, 4) << '\n';
    for (const auto& [role, f] : p.by_role) {
      out << head << "\trole\t" << knowledge::to_string(role) << '\t' << text::fixed(f, 4) << '\n';
    }
  }
  return out.str();
}

}  // namespace ldwb::attribution
