#include "ldwb/service.hpp"

#include <mutex>
#include <sstream>

#include <httplib.h>

#include "ldwb/error.hpp"
#include "ldwb/jsonl.hpp"

namespace ldwb::service {

namespace he = humaneval;
using nlohmann::json;

std::vector<he::JudgmentRecord> read_judgments(std::istream& in, std::string_view source) {
  std::vector<he::JudgmentRecord> out;
  for (const auto& line : jsonl::read(in, kJudgmentSchema, source)) {
    out.push_back(he::judgment_from_json(line.value, source, line.number));
  }
  return out;
}

std::vector<he::JudgmentRecord> load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_judgments(in, path.string());
}

void write_judgments(std::ostream& out, const std::vector<he::JudgmentRecord>& judgments) {
  jsonl::write_header(out, kJudgmentSchema);
  for (const auto& j : judgments) jsonl::write_line(out, he::to_json(j));
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out.flush()) throw DataError("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, p);
}

json turns_json(const std::vector<corpus::Turn>& turns) {
  json out = json::array();
  for (const auto& t : turns) out.push_back({{"speaker", corpus::to_string(t.speaker)}, {"text", t.text}});
  return out;
}

json task_json(std::string_view kind, const std::string& history_id, const std::vector<corpus::Turn>& history,
               const he::Candidate& c) {
  json criteria = json::array();
  for (auto k : he::kCriteria) criteria.push_back(he::to_string(k));
  json labels = json::array();
  for (auto l : he::kErrorLabels) labels.push_back(he::to_string(l));
  return {{"done", false},
          {"kind", kind},
          {"history_id", history_id},
          {"history", turns_json(history)},
          {"candidate_id", c.candidate_id},
          {"text", c.text},
          {"criteria", std::move(criteria)},
          {"error_labels", std::move(labels)}};
}

}  // namespace

EvaluationService::EvaluationService(std::filesystem::path state_dir) : dir_(std::move(state_dir)) {
  std::filesystem::create_directories(dir_);
  const auto campaign_path = dir_ / "campaign.json";
  if (!std::filesystem::exists(campaign_path)) return;
  json j;
  try {
    j = json::parse(slurp(campaign_path));
  } catch (const json::parse_error& e) {
    throw DataError(campaign_path.string() + ": " + e.what());
  }
  install(he::campaign_from_json(j));
  replay();
}

bool EvaluationService::has_campaign() const {
  std::shared_lock lock(mutex_);
  return state_ != nullptr;
}

const EvaluationService::State& EvaluationService::state() const {
  if (!state_) throw ServiceError(404, "no campaign has been created");
  return *state_;
}

void EvaluationService::install(he::Campaign campaign) {
  auto st = std::make_unique<State>();
  st->campaign = std::move(campaign);
  st->candidates = he::index_candidates(st->campaign.histories);
  st->plan = he::plan_assignments(st->campaign.histories, st->campaign.workers, st->campaign.config, st->campaign.seed);
  for (const auto& [w, tasks] : st->plan) {
    auto& set = st->assigned[w];
    for (const auto& t : tasks) set.insert(t.candidate_id);
  }
  for (const auto& q : st->campaign.qualification) {
    st->gold[q.candidate.candidate_id] = q.gold;
    st->qualification[q.candidate.candidate_id] = &q;
  }
  state_ = std::move(st);
}

void EvaluationService::create_campaign(const he::Campaign& campaign) {
  std::unique_lock lock(mutex_);
  if (state_) throw ServiceError(409, "a campaign already exists in " + dir_.string());
  try {
    install(campaign);
  } catch (const DataError& e) {
    state_.reset();
    throw ServiceError(422, e.what());
  }
  write_file(dir_ / "campaign.json", he::to_json(state_->campaign).dump(2) + "\n");
  write_file(dir_ / "plan.json", he::plan_to_json(state_->plan).dump(2) + "\n");
  std::ostringstream header;
  jsonl::write_header(header, kJudgmentSchema);
  write_file(dir_ / "journal.jsonl", header.str());
  out_.open(dir_ / "journal.jsonl", std::ios::app | std::ios::binary);
}

void EvaluationService::replay() {
  const auto path = dir_ / "journal.jsonl";
  std::string content = std::filesystem::exists(path) ? slurp(path) : std::string();
  // A crash mid-append leaves an unterminated last line; drop it.
  if (!content.empty() && content.back() != '\n') {
    content.erase(content.rfind('\n') == std::string::npos ? 0 : content.rfind('\n') + 1);
    write_file(path, content);
  }
  if (content.empty()) {
    std::ostringstream header;
    jsonl::write_header(header, kJudgmentSchema);
    content = header.str();
    write_file(path, content);
  }
  std::istringstream in(content);
  for (const auto& j : read_judgments(in, path.string())) {
    try {
      check(j);
    } catch (const ServiceError& e) {
      throw DataError(path.string() + ": inconsistent journal: " + e.what());
    }
    record(j);
  }
  out_.open(path, std::ios::app | std::ios::binary);
}

std::optional<he::QualificationResult> EvaluationService::qualification_of(const std::string& worker) const {
  const auto& st = state();
  auto it = qual_judgments_.find(worker);
  const std::size_t n = it == qual_judgments_.end() ? 0 : it->second.size();
  if (n < st.campaign.config.qualification_size) return std::nullopt;
  return he::qualify(worker, it->second, st.gold, st.campaign.config);
}

void EvaluationService::check(const he::JudgmentRecord& j) const {
  const auto& st = state();
  try {
    he::validate_judgment(j);
  } catch (const DataError& e) {
    throw ServiceError(422, e.what());
  }
  if (j.timestamp.empty()) throw ServiceError(422, "judgment: empty timestamp");
  if (!st.plan.count(j.worker_id)) throw ServiceError(403, "unknown worker '" + j.worker_id + "'");
  const bool is_qual = st.qualification.count(j.candidate_id) > 0;
  if (!is_qual && !st.candidates.count(j.candidate_id)) {
    throw ServiceError(404, "unknown candidate '" + j.candidate_id + "'");
  }
  if (judged_.count({j.worker_id, j.candidate_id})) {
    throw ServiceError(409, "worker '" + j.worker_id + "' already judged '" + j.candidate_id + "'");
  }
  if (is_qual) return;
  auto q = qualification_of(j.worker_id);
  if (!q) throw ServiceError(403, "worker '" + j.worker_id + "' has not completed qualification");
  if (!q->passed) throw ServiceError(403, "worker '" + j.worker_id + "' did not pass qualification");
  if (!st.assigned.at(j.worker_id).count(j.candidate_id)) {
    throw ServiceError(403, "candidate '" + j.candidate_id + "' is not assigned to '" + j.worker_id + "'");
  }
}

void EvaluationService::record(const he::JudgmentRecord& j) {
  judged_.insert({j.worker_id, j.candidate_id});
  if (state_->qualification.count(j.candidate_id)) {
    qual_judgments_[j.worker_id].push_back(j);
  } else {
    journal_.push_back(j);
  }
}

void EvaluationService::submit(const he::JudgmentRecord& judgment) {
  std::unique_lock lock(mutex_);
  check(judgment);
  jsonl::write_line(out_, he::to_json(judgment));
  if (!out_.flush()) throw ServiceError(500, "journal write failed");
  record(judgment);
}

json EvaluationService::next_task(const std::string& worker) const {
  std::shared_lock lock(mutex_);
  const auto& st = state();
  if (!st.plan.count(worker)) throw ServiceError(403, "unknown worker '" + worker + "'");
  auto q = qualification_of(worker);
  if (!q) {
    for (const auto& item : st.campaign.qualification) {
      if (!judged_.count({worker, item.candidate.candidate_id})) {
        return task_json("qualification", item.history_id, item.history, item.candidate);
      }
    }
    throw ServiceError(500, "qualification state is inconsistent");
  }
  if (!q->passed) throw ServiceError(403, "worker '" + worker + "' did not pass qualification");
  std::map<std::string, const he::HistoryItem*> histories;
  for (const auto& h : st.campaign.histories) histories[h.history_id] = &h;
  for (const auto& t : st.plan.at(worker)) {
    if (judged_.count({worker, t.candidate_id})) continue;
    return task_json("main", t.history_id, histories.at(t.history_id)->history, st.candidates.at(t.candidate_id));
  }
  return {{"done", true}};
}

json EvaluationService::progress(const std::string& worker) const {
  std::shared_lock lock(mutex_);
  const auto& st = state();
  auto plan = st.plan.find(worker);
  if (plan == st.plan.end()) throw ServiceError(403, "unknown worker '" + worker + "'");
  auto q = qualification_of(worker);
  auto it = qual_judgments_.find(worker);
  json qual = {{"required", st.campaign.config.qualification_size},
               {"completed", it == qual_judgments_.end() ? 0 : it->second.size()},
               {"status", !q ? "pending" : (q->passed ? "passed" : "failed")}};
  if (q) qual["agreement"] = q->agreement;
  std::size_t done = 0;
  for (const auto& t : plan->second) done += judged_.count({worker, t.candidate_id});
  return {{"worker_id", worker},
          {"qualification", std::move(qual)},
          {"assigned", plan->second.size()},
          {"completed", done},
          {"remaining", plan->second.size() - done}};
}

json EvaluationService::progress() const {
  std::shared_lock lock(mutex_);
  const auto& st = state();
  std::map<std::string, std::size_t> per_candidate;
  for (const auto& j : journal_) ++per_candidate[j.candidate_id];
  std::size_t complete = 0;
  for (const auto& [_, n] : per_candidate) complete += n >= st.campaign.config.raters_per_item;
  return {{"candidates", st.candidates.size()},
          {"raters_per_item", st.campaign.config.raters_per_item},
          {"judgments", journal_.size()},
          {"required_judgments", st.candidates.size() * st.campaign.config.raters_per_item},
          {"complete_candidates", complete}};
}

std::vector<he::JudgmentRecord> EvaluationService::main_judgments() const {
  std::shared_lock lock(mutex_);
  state();
  return journal_;
}

std::string EvaluationService::export_jsonl() const {
  std::ostringstream out;
  write_judgments(out, main_judgments());
  return out.str();
}

json EvaluationService::report(const std::string& name) const {
  std::shared_lock lock(mutex_);
  const auto& st = state();
  try {
    if (name == "majority") return he::majority_json(he::aggregate_majority(journal_, st.candidates, st.campaign.config));
    if (name == "kappa") return he::agreement_json(he::agreement_report(journal_, st.candidates));
    if (name == "errors") return he::errors_json(he::error_distribution(journal_, st.candidates));
  } catch (const DataError& e) {
    throw ServiceError(409, e.what());
  }
  throw ServiceError(404, "unknown report '" + name + "'");
}

struct HttpFrontEnd::Impl {
  EvaluationService& service;
  httplib::Server server;

  explicit Impl(EvaluationService& s) : service(s) {}

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      auto fail = [&](int status, const std::string& msg) {
        res.status = status;
        res.set_content(json{{"error", msg}}.dump(), "application/json");
      };
      try {
        f(req, res);
      } catch (const ServiceError& e) {
        fail(e.status(), e.what());
      } catch (const json::exception& e) {
        fail(400, std::string("malformed JSON: ") + e.what());
      } catch (const DataError& e) {
        fail(422, e.what());
      } catch (const UsageError& e) {
        fail(400, e.what());
      } catch (const std::exception& e) {
        fail(500, e.what());
      }
    };
  }

  static std::string worker_of(const httplib::Request& req) {
    if (!req.has_param("worker") || req.get_param_value("worker").empty()) {
      throw ServiceError(400, "missing 'worker' query parameter");
    }
    return req.get_param_value("worker");
  }

  static void reply(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void routes() {
    server.Get("/task/next", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 reply(res, service.next_task(worker_of(req)));
               }));
    server.Post("/judgment", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto j = he::judgment_from_json(json::parse(req.body), "request");
                  service.submit(j);
                  reply(res, {{"ok", true}}, 201);
                }));
    server.Get("/progress", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 reply(res, req.has_param("worker") ? service.progress(worker_of(req)) : service.progress());
               }));
    server.Post("/campaign", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto c = he::campaign_from_json(json::parse(req.body));
                  service.create_campaign(c);
                  reply(res, {{"ok", true}, {"candidates", he::index_candidates(c.histories).size()}}, 201);
                }));
    server.Get("/export", guarded([this](const httplib::Request&, httplib::Response& res) {
                 res.set_content(service.export_jsonl(), "application/x-ndjson");
               }));
    server.Get(R"(/reports/([a-z]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 reply(res, service.report(req.matches[1]));
               }));
  }
};

HttpFrontEnd::HttpFrontEnd(EvaluationService& service) : impl_(std::make_unique<Impl>(service)) { impl_->routes(); }

HttpFrontEnd::~HttpFrontEnd() = default;

int HttpFrontEnd::bind(const std::string& host, int port) {
  if (port == 0) {
    int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw UsageError("cannot bind " + host);
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) throw UsageError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpFrontEnd::listen() { impl_->server.listen_after_bind(); }

void HttpFrontEnd::stop() { impl_->server.stop(); }

}  // namespace ldwb::service
