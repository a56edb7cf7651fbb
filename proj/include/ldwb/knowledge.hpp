#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ldwb/corpus.hpp"
#include "ldwb/syntax.hpp"

namespace ldwb::knowledge {

enum class Repr { None, Raw, HeadNouns, LinearGraph };
std::string_view to_string(Repr r);  // none | raw | boh | psg
Repr parse_repr(std::string_view s);

struct LinearizationTags {
  std::string event = "[E]";
  std::string subject = "[S]";
  std::string object = "[O]";
};

struct Layout {
  std::string separator = "<brk>";
  std::string user_marker = "<user>";
  std::string agent_marker = "<agent>";
  LinearizationTags tags;
};

Layout layout_from_json(const nlohmann::json& j);
nlohmann::json layout_to_json(const Layout& layout);
Layout load_layout(const std::filesystem::path& path);

// --- RAW -------------------------------------------------------------------

struct RawKnowledge {
  std::string text;
  std::size_t token_count = 0;

  bool operator==(const RawKnowledge&) const = default;
};

// User turns of the first session joined in order, one separator token
// between consecutive turns. The separator counts as a token.
RawKnowledge build_raw(const corpus::Session& first, std::string_view separator = "<brk>");

// --- BOH -------------------------------------------------------------------

struct HeadNounKnowledge {
  std::vector<std::string> lemmas;

  bool operator==(const HeadNounKnowledge&) const = default;
};

// NOUN/PROPN tokens whose governor is not itself NOUN/PROPN; lowercased lemmas,
// deduplicated, first occurrence wins.
HeadNounKnowledge extract_head_nouns(const std::vector<syntax::ParsedSentence>& parses);

// --- PSG -------------------------------------------------------------------

struct Event {
  std::string predicate;
  std::optional<std::string> subject;
  std::optional<std::string> object;
  std::size_t occurrence = 0;  // position in first-occurrence order

  bool operator==(const Event&) const = default;
};

struct PersonalSpaceGraph {
  std::vector<std::string> nodes;  // unique labels, first-appearance order
  std::vector<Event> events;

  // Throws DataError when an invariant does not hold.
  void validate() const;
  bool operator==(const PersonalSpaceGraph&) const = default;
};

enum class ParticipantMode {
  Lemma,    // the dependent's lowercased lemma
  Subtree,  // the dependent's whole subtree, lowercased forms in order
};

struct PsgOptions {
  ParticipantMode participants = ParticipantMode::Lemma;
  // Keep only events with both a subject and an object.
  bool require_both_roles = false;
};

PersonalSpaceGraph build_psg(const std::vector<syntax::ParsedSentence>& parses, const PsgOptions& options = {});

struct LinearizedGraph {
  std::string text;
  std::vector<std::size_t> tag_positions;  // whitespace-token indices of tags

  bool operator==(const LinearizedGraph&) const = default;
};

// "<E> predicate <S> subject <O> object" per event, absent roles omitted.
// Label tokens that collide with a tag or start with '\' are escaped with a
// leading '\'.
LinearizedGraph linearize_psg(const PersonalSpaceGraph& graph, const LinearizationTags& tags = {});
std::vector<Event> parse_linearized(std::string_view text, const LinearizationTags& tags = {});

// Parses that belong to first-session User turns of `pair`, in turn order.
std::vector<syntax::ParsedSentence> knowledge_parses(const corpus::DialoguePair& pair,
                                                     const std::vector<syntax::ParsedSentence>& parses);

// --- Model input -----------------------------------------------------------

enum class Segment { Knowledge, History };
enum class Role { Event, Participant, Tag, Other };

std::string_view to_string(Segment s);
std::string_view to_string(Role r);
Segment parse_segment(std::string_view s);
Role parse_role(std::string_view s);

struct InputToken {
  std::string text;
  Segment segment = Segment::History;
  Role role = Role::Other;

  bool operator==(const InputToken&) const = default;
};

struct InputSequence {
  std::string sample_id;
  Repr repr = Repr::None;
  std::vector<InputToken> tokens;
  std::string target_text;

  bool operator==(const InputSequence&) const = default;
};

using Knowledge = std::variant<std::monostate, RawKnowledge, HeadNounKnowledge, LinearizedGraph>;

Repr repr_of(const Knowledge& k);

// Knowledge tokens first, then each history turn prefixed by its speaker marker.
InputSequence assemble_input(const corpus::GroundedSample& sample, const Knowledge& knowledge, const Layout& layout);

inline constexpr std::string_view kInputSchema = "ldwb.input_sequence";
inline constexpr std::string_view kKnowledgeSchema = "ldwb.knowledge";

nlohmann::json to_json(const InputSequence& seq);
void write_input_sequences(std::ostream& out, const std::vector<InputSequence>& seqs);
std::vector<InputSequence> read_input_sequences(std::istream& in, std::string_view source);
std::vector<InputSequence> load_input_sequences(const std::filesystem::path& path);

// Knowledge files written by `represent`: one record per dialogue.
struct KnowledgeRecord {
  std::string dialogue_id;
  Knowledge knowledge;
  std::optional<PersonalSpaceGraph> graph;  // psg records only
};

nlohmann::json to_json(const KnowledgeRecord& rec);
void write_knowledge(std::ostream& out, const std::vector<KnowledgeRecord>& records);
std::vector<KnowledgeRecord> read_knowledge(std::istream& in, std::string_view source);
std::vector<KnowledgeRecord> load_knowledge(const std::filesystem::path& path);

}  // namespace ldwb::knowledge
