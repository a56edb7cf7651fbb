#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ldwb::syntax {

struct ParsedToken {
  std::size_t index = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  std::size_t head = 0;  // 0 = root
  std::string deprel;

  bool operator==(const ParsedToken&) const = default;
};

struct SourceTurn {
  std::string dialogue_id;
  int session = 1;
  std::size_t turn = 0;

  bool operator==(const SourceTurn&) const = default;
};

struct ParsedSentence {
  std::vector<ParsedToken> tokens;
  SourceTurn source_turn;
  // `# key = value` comments, in file order. Comments without " = " are kept
  // with an empty value.
  std::vector<std::pair<std::string, std::string>> metadata;

  std::optional<std::string> meta(std::string_view key) const;
  // 1-based index of the single root token.
  std::size_t root() const;
  const ParsedToken& token(std::size_t index) const { return tokens.at(index - 1); }
};

// Checks that `heads` (heads[i] = governor of token i+1, 0 = root) forms a
// single-rooted tree. Returns an error description or nullopt when valid.
std::optional<std::string> tree_error(const std::vector<std::size_t>& heads);

// CoNLL-U reader. Multiword ranges ("2-3") and empty nodes ("2.1") are skipped.
// Required sentence comments: dialogue_id, session, turn.
std::vector<ParsedSentence> read_parses(std::istream& in, std::string_view source);
std::vector<ParsedSentence> load_parses(const std::filesystem::path& path);

void write_conllu(std::ostream& out, const ParsedSentence& sentence);

}  // namespace ldwb::syntax
