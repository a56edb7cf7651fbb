#include "oracles.hpp"

#include <cmath>
#include <set>

namespace oracle {

namespace {

std::map<std::string, int> grams(const std::vector<std::string>& toks, std::size_t n) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key;
    for (std::size_t j = i; j < i + n; ++j) key += toks[j] + '\x01';
    out[key] += 1;
  }
  return out;
}

}  // namespace

double textbook_bleu(const std::vector<std::string>& hyp, const std::vector<std::vector<std::string>>& refs,
                     double epsilon) {
  const double c = static_cast<double>(hyp.size());
  double r = 0;
  double best = 1e300;
  for (const auto& ref : refs) {
    const double len = static_cast<double>(ref.size());
    const double d = std::fabs(len - c);
    if (d < best || (d == best && len < r)) {
      best = d;
      r = len;
    }
  }
  double product = 1.0;
  int orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto h = grams(hyp, n);
    if (h.empty()) break;
    int total = 0;
    int clipped = 0;
    for (const auto& [g, count] : h) {
      int max_ref = 0;
      for (const auto& ref : refs) {
        auto rg = grams(ref, n);
        if (rg.count(g) && rg[g] > max_ref) max_ref = rg[g];
      }
      total += count;
      clipped += count < max_ref ? count : max_ref;
    }
    double p = static_cast<double>(clipped) / total;
    if (clipped == 0) {
      if (epsilon <= 0) return 0.0;
      p = epsilon / total;
    }
    product *= p;
    ++orders;
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::pow(product, 1.0 / orders);
}

std::optional<double> fleiss(const std::vector<std::array<std::size_t, 3>>& table) {
  const double N = static_cast<double>(table.size());
  const double n = static_cast<double>(table[0][0] + table[0][1] + table[0][2]);
  double p_bar = 0.0;
  std::array<double, 3> p{};
  for (const auto& row : table) {
    double agree = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double x = static_cast<double>(row[j]);
      agree += x * (x - 1.0);
      p[j] += x;
    }
    p_bar += agree / (n * (n - 1.0));
  }
  p_bar /= N;
  double p_e = 0.0;
  for (auto& pj : p) {
    pj /= N * n;
    p_e += pj * pj;
  }
  if (std::fabs(1.0 - p_e) < 1e-15) return std::nullopt;
  return (p_bar - p_e) / (1.0 - p_e);
}

std::optional<std::string> check_plan(const std::vector<ldwb::humaneval::HistoryItem>& histories,
                                      const std::vector<std::string>& workers,
                                      const ldwb::humaneval::CampaignConfig& config,
                                      const ldwb::humaneval::Plan& plan) {
  std::map<std::string, std::string> history_of;
  for (const auto& h : histories) {
    for (const auto& c : h.candidates) history_of[c.candidate_id] = h.history_id;
  }
  const std::set<std::string> pool(workers.begin(), workers.end());
  std::map<std::string, std::size_t> raters;
  for (const auto& [w, tasks] : plan) {
    if (!pool.count(w)) return "plan names unknown worker " + w;
    if (tasks.size() > config.histories_per_worker * config.candidates_per_history) {
      return "worker " + w + " exceeds quota with " + std::to_string(tasks.size());
    }
    std::set<std::string> seen;
    for (const auto& t : tasks) {
      if (!history_of.count(t.candidate_id)) return "unknown candidate " + t.candidate_id;
      if (history_of[t.candidate_id] != t.history_id) return "candidate " + t.candidate_id + " under wrong history";
      if (!seen.insert(t.candidate_id).second) return "worker " + w + " sees " + t.candidate_id + " twice";
      raters[t.candidate_id] += 1;
    }
  }
  for (const auto& [cand, _] : history_of) {
    if (raters[cand] != config.raters_per_item) {
      return "candidate " + cand + " has " + std::to_string(raters[cand]) + " raters";
    }
  }
  return std::nullopt;
}

TopCounts brute_force_shares(const ldwb::interchange::AttributionRecord& record, double top_fraction) {
  const auto& toks = record.tokens;
  const std::size_t L = toks.size();
  TopCounts out;
  out.k = static_cast<std::size_t>(std::ceil(top_fraction * L - 1e-9));
  if (out.k < 1) out.k = 1;
  if (out.k > L) out.k = L;
  std::size_t klen = 0, hlen = 0;
  for (std::size_t i = 0; i < L; ++i) {
    std::size_t above = 0;
    for (std::size_t j = 0; j < L; ++j) {
      if (toks[j].score > toks[i].score || (toks[j].score == toks[i].score && j < i)) ++above;
    }
    const bool knowledge = toks[i].segment == ldwb::knowledge::Segment::Knowledge;
    (knowledge ? klen : hlen) += 1;
    if (above < out.k) (knowledge ? out.knowledge_top : out.history_top) += 1;
  }
  const double nk = static_cast<double>(out.knowledge_top) / klen;
  const double nh = static_cast<double>(out.history_top) / hlen;
  out.knowledge_share = 100.0 * nk / (nk + nh);
  out.history_share = 100.0 * nh / (nk + nh);
  return out;
}

}  // namespace oracle
