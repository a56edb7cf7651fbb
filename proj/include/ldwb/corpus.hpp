#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ldwb::corpus {

enum class Speaker { User, Agent };
enum class SessionIndex { First = 1, Second = 2 };

std::string_view to_string(Speaker s);
Speaker parse_speaker(std::string_view s);  // "user" | "agent"

struct Turn {
  Speaker speaker = Speaker::User;
  std::string text;
  std::size_t turn_index = 0;

  bool operator==(const Turn&) const = default;
};

struct Session {
  SessionIndex session_index = SessionIndex::First;
  std::vector<Turn> turns;

  bool operator==(const Session&) const = default;
};

struct DialoguePair {
  std::string dialogue_id;
  std::string user_id;
  Session first;
  Session second;

  bool operator==(const DialoguePair&) const = default;
};

inline constexpr std::string_view kCorpusSchema = "ldwb.corpus";

// Line-delimited corpus file: schema header, then one DialoguePair per line.
std::vector<DialoguePair> load_corpus(const std::filesystem::path& path);
std::vector<DialoguePair> read_corpus(std::istream& in, std::string_view source);
void write_corpus(std::ostream& out, const std::vector<DialoguePair>& pairs);

// Portable shuffle: std::mt19937_64 seeded with `seed` drives a Fisher-Yates
// pass from the last position down, each draw reduced to [0, i] by unbiased
// rejection (Lemire's threshold). The result only depends on the standard
// engine's output sequence, which is fixed by the C++ standard.
class SeededPermutation {
 public:
  explicit SeededPermutation(std::uint64_t seed) : seed_(seed) {}

  std::vector<std::size_t> indices(std::size_t n) const;

  template <typename T>
  std::vector<T> apply(const std::vector<T>& items) const {
    std::vector<T> out;
    out.reserve(items.size());
    for (auto i : indices(items.size())) out.push_back(items[i]);
    return out;
  }

 private:
  std::uint64_t seed_;
};

struct SplitFractions {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> valid;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  bool operator==(const SplitAssignment&) const = default;
};

// |train| = floor(f_train * N), |valid| = floor(f_valid * N), test takes the
// remainder. Ids keep their shuffled order.
SplitAssignment split_corpus(const std::vector<DialoguePair>& pairs, const SplitFractions& fractions,
                             std::uint64_t seed);

struct GroundedSample {
  std::string sample_id;
  std::string dialogue_id;
  std::vector<Turn> history;
  Turn target;
  std::string knowledge_ref;

  bool operator==(const GroundedSample&) const = default;
};

std::string sample_id_for(std::string_view dialogue_id, std::size_t turn_index);

// One sample per Agent turn of the second session that has at least one
// preceding turn; history holds the min(window, available) turns right before it.
std::vector<GroundedSample> make_samples(const DialoguePair& pair, std::size_t window);

// Nested training subsets: set k is the first ceil(f_k * N) ids of a single
// seeded permutation, so every set contains all smaller ones.
std::vector<std::vector<std::string>> subset_chain(const std::vector<std::string>& train_ids,
                                                   const std::vector<double>& fractions,
                                                   std::uint64_t seed);

}  // namespace ldwb::corpus
