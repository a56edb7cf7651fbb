#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldwb/attribution.hpp"
#include "ldwb/corpus.hpp"
#include "ldwb/humaneval.hpp"
#include "ldwb/knowledge.hpp"
#include "ldwb/metrics.hpp"

namespace ldwb::config {

struct Paths {
  std::filesystem::path corpus;
  std::filesystem::path parses;
  std::filesystem::path output = "out";
};

struct SplitConfig {
  corpus::SplitFractions fractions;
  std::uint64_t seed = 13;
};

struct SubsetConfig {
  std::vector<double> fractions{0.25, 0.5, 0.75, 1.0};
  std::uint64_t seed = 17;
};

struct AttributionConfig {
  double top_fraction = 0.25;
  attribution::SharePooling pooling = attribution::SharePooling::MeanOfRecords;
  bool exclude_tags = true;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path state_dir = "campaign-state";  // relative to output root
};

struct WorkbenchConfig {
  Paths paths;
  SplitConfig split;
  std::map<std::string, std::size_t> windows{{"decoder", 2}, {"seq2seq", 4}};
  knowledge::Repr representation = knowledge::Repr::Raw;
  knowledge::Layout layout;
  knowledge::PsgOptions psg;
  metrics::BleuConfig bleu;
  SubsetConfig subsets;
  AttributionConfig attribution;
  humaneval::CampaignConfig campaign;
  ServiceConfig service;
};

// Unknown keys and ill-typed values throw UsageError. Relative paths are
// resolved against `base`, the directory holding the config file.
WorkbenchConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
WorkbenchConfig load(const std::filesystem::path& path);
nlohmann::json to_json(const WorkbenchConfig& c);

// LDWB_CORPUS, LDWB_PARSES and LDWB_OUTPUT replace the configured paths.
void apply_env(WorkbenchConfig& c);

}  // namespace ldwb::config
