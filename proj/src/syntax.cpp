#include "ldwb/syntax.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "ldwb/error.hpp"
#include "ldwb/text.hpp"

namespace ldwb::syntax {

std::optional<std::string> ParsedSentence::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::size_t ParsedSentence::root() const {
  for (const auto& t : tokens) {
    if (t.head == 0) return t.index;
  }
  return 0;
}

std::optional<std::string> tree_error(const std::vector<std::size_t>& heads) {
  const std::size_t n = heads.size();
  if (n == 0) return "empty sentence";
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t id = i + 1;
    if (heads[i] > n) return "head " + std::to_string(heads[i]) + " of token " + std::to_string(id) + " out of range";
    if (heads[i] == id) return "token " + std::to_string(id) + " is its own head";
    if (heads[i] == 0) ++roots;
  }
  if (roots == 0) return "no root";
  if (roots > 1) return "multiple roots (" + std::to_string(roots) + ")";
  // 0 = unvisited, 1 = on current path, 2 = reaches the root
  std::vector<int> state(n + 1, 0);
  state[0] = 2;
  for (std::size_t start = 1; start <= n; ++start) {
    std::vector<std::size_t> path;
    std::size_t cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = heads[cur - 1];
    }
    if (state[cur] == 1) return "cycle through token " + std::to_string(cur);
    for (auto p : path) state[p] = 2;
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_size(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

struct Pending {
  ParsedSentence sentence;
  std::size_t first_line = 0;
  bool any = false;
};

void finish(Pending& p, std::vector<ParsedSentence>& out, const std::string& where) {
  if (!p.any) return;
  auto& s = p.sentence;
  if (s.tokens.empty()) throw DataError(where, p.first_line, "sentence without tokens");
  std::vector<std::size_t> heads;
  for (const auto& t : s.tokens) heads.push_back(t.head);
  if (auto err = tree_error(heads)) throw DataError(where, p.first_line, "invalid dependency tree: " + *err);

  auto dialogue = s.meta("dialogue_id");
  auto session = s.meta("session");
  auto turn = s.meta("turn");
  if (!dialogue || dialogue->empty()) throw DataError(where, p.first_line, "missing source_turn metadata 'dialogue_id'");
  if (!session) throw DataError(where, p.first_line, "missing source_turn metadata 'session'");
  if (!turn) throw DataError(where, p.first_line, "missing source_turn metadata 'turn'");
  std::size_t session_no = 0;
  if (!parse_size(*session, session_no) || (session_no != 1 && session_no != 2)) {
    throw DataError(where, p.first_line, "metadata 'session' must be 1 or 2");
  }
  std::size_t turn_no = 0;
  if (!parse_size(*turn, turn_no)) throw DataError(where, p.first_line, "metadata 'turn' must be a non-negative integer");
  s.source_turn = {*dialogue, static_cast<int>(session_no), turn_no};
  out.push_back(std::move(s));
  p = Pending{};
}

}  // namespace

std::vector<ParsedSentence> read_parses(std::istream& in, std::string_view source) {
  const std::string where(source);
  std::vector<ParsedSentence> out;
  Pending pending;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) {
      finish(pending, out, where);
      continue;
    }
    if (!pending.any) {
      pending.any = true;
      pending.first_line = number;
    }
    if (line[0] == '#') {
      std::string body(text::trim(std::string_view(line).substr(1)));
      auto eq = body.find(" = ");
      if (eq == std::string::npos) {
        pending.sentence.metadata.emplace_back(body, "");
      } else {
        pending.sentence.metadata.emplace_back(std::string(text::trim(body.substr(0, eq))),
                                               std::string(text::trim(body.substr(eq + 3))));
      }
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10) throw DataError(where, number, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) continue;
    ParsedToken tok;
    if (!parse_size(cols[0], tok.index)) throw DataError(where, number, "bad token id '" + cols[0] + "'");
    if (tok.index != pending.sentence.tokens.size() + 1) {
      throw DataError(where, number, "token id " + cols[0] + " out of sequence");
    }
    if (!parse_size(cols[6], tok.head)) throw DataError(where, number, "bad head '" + cols[6] + "'");
    tok.form = cols[1];
    tok.lemma = cols[2] == "_" && cols[1] != "_" ? cols[1] : cols[2];
    tok.upos = cols[3];
    tok.deprel = cols[7];
    pending.sentence.tokens.push_back(std::move(tok));
  }
  finish(pending, out, where);
  return out;
}

std::vector<ParsedSentence> load_parses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open parses " + path.string());
  return read_parses(in, path.string());
}

void write_conllu(std::ostream& out, const ParsedSentence& sentence) {
  for (const auto& [k, v] : sentence.metadata) {
    out << "# " << k;
    if (!v.empty()) out << " = " << v;
    out << '\n';
  }
  for (const auto& t : sentence.tokens) {
    out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t" << t.head << '\t'
        << t.deprel << "\t_\t_\n";
  }
  out << '\n';
}

}  // namespace ldwb::syntax
