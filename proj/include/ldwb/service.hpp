#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldwb/humaneval.hpp"

namespace ldwb::service {

inline constexpr std::string_view kJudgmentSchema = "ldwb.judgment";

// Failure carrying the HTTP status the front end should answer with.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

std::vector<humaneval::JudgmentRecord> read_judgments(std::istream& in, std::string_view source);
std::vector<humaneval::JudgmentRecord> load_judgments(const std::filesystem::path& path);
void write_judgments(std::ostream& out, const std::vector<humaneval::JudgmentRecord>& judgments);

// Campaign state backed by a directory holding campaign.json, plan.json and
// an append-only journal.jsonl. Restarting on the same directory replays the
// journal. Writes are serialized; reads run concurrently.
class EvaluationService {
 public:
  explicit EvaluationService(std::filesystem::path state_dir);

  bool has_campaign() const;
  void create_campaign(const humaneval::Campaign& campaign);

  // Next task for the worker, or {"done": true}. Qualification items come
  // first; candidate sources are never revealed.
  nlohmann::json next_task(const std::string& worker) const;
  void submit(const humaneval::JudgmentRecord& judgment);
  nlohmann::json progress(const std::string& worker) const;
  nlohmann::json progress() const;

  // Judgments on campaign candidates, qualification excluded, journal order.
  std::vector<humaneval::JudgmentRecord> main_judgments() const;
  std::string export_jsonl() const;

  nlohmann::json report(const std::string& name) const;  // majority | kappa | errors

 private:
  struct State {
    humaneval::Campaign campaign;
    humaneval::Plan plan;
    humaneval::CandidateIndex candidates;
    std::map<std::string, humaneval::Votes> gold;
    std::map<std::string, const humaneval::QualificationItem*> qualification;
    std::map<std::string, std::set<std::string>> assigned;  // worker -> candidate ids
  };

  void install(humaneval::Campaign campaign);
  void replay();
  void check(const humaneval::JudgmentRecord& j) const;
  void record(const humaneval::JudgmentRecord& j);
  std::optional<humaneval::QualificationResult> qualification_of(const std::string& worker) const;
  const State& state() const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<State> state_;
  std::vector<humaneval::JudgmentRecord> journal_;
  std::set<std::pair<std::string, std::string>> judged_;  // (worker, candidate)
  std::map<std::string, std::vector<humaneval::JudgmentRecord>> qual_judgments_;
  std::ofstream out_;
};

// HTTP front end.
//   GET  /task/next?worker=ID     POST /judgment
//   GET  /progress[?worker=ID]    POST /campaign
//   GET  /export                  GET  /reports/{majority,kappa,errors}
class HttpFrontEnd {
 public:
  explicit HttpFrontEnd(EvaluationService& service);
  ~HttpFrontEnd();

  // Binds and returns the port; port 0 picks a free one.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ldwb::service
