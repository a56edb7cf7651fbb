#include "ldwb/knowledge.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>
#include <unordered_set>

#include "ldwb/error.hpp"
#include "ldwb/jsonl.hpp"
#include "ldwb/text.hpp"

namespace ldwb::knowledge {

using jsonl::json;

std::string_view to_string(Repr r) {
  switch (r) {
    case Repr::None: return "none";
    case Repr::Raw: return "raw";
    case Repr::HeadNouns: return "boh";
    case Repr::LinearGraph: return "psg";
  }
  return "none";
}

Repr parse_repr(std::string_view s) {
  if (s == "none") return Repr::None;
  if (s == "raw") return Repr::Raw;
  if (s == "boh") return Repr::HeadNouns;
  if (s == "psg") return Repr::LinearGraph;
  throw DataError("unknown knowledge representation '" + std::string(s) + "'");
}

namespace {

bool is_single_token(const std::string& s) { return !s.empty() && text::split_ws(s).size() == 1 && text::trim(s) == s; }

std::string normalize_label(std::string_view s) { return text::join(text::split_ws(s), " "); }

bool is_noun(const std::string& upos) { return upos == "NOUN" || upos == "PROPN"; }

}  // namespace

Layout layout_from_json(const json& j) {
  jsonl::Record rec(j, "layout", 0);
  rec.only_keys({"separator", "user_marker", "agent_marker", "tags"});
  Layout layout;
  if (rec.has("separator")) layout.separator = rec.string("separator");
  if (rec.has("user_marker")) layout.user_marker = rec.string("user_marker");
  if (rec.has("agent_marker")) layout.agent_marker = rec.string("agent_marker");
  if (rec.has("tags")) {
    auto tags = rec.child(rec.object("tags"));
    tags.only_keys({"event", "subject", "object"});
    if (tags.has("event")) layout.tags.event = tags.string("event");
    if (tags.has("subject")) layout.tags.subject = tags.string("subject");
    if (tags.has("object")) layout.tags.object = tags.string("object");
  }
  for (const auto* s : {&layout.separator, &layout.tags.event, &layout.tags.subject, &layout.tags.object}) {
    if (!is_single_token(*s)) throw UsageError("layout: separator and tags must be single non-empty tokens");
  }
  const auto& t = layout.tags;
  if (t.event == t.subject || t.event == t.object || t.subject == t.object) {
    throw UsageError("layout: linearization tags must be distinct");
  }
  return layout;
}

json layout_to_json(const Layout& layout) {
  return {{"separator", layout.separator},
          {"user_marker", layout.user_marker},
          {"agent_marker", layout.agent_marker},
          {"tags", {{"event", layout.tags.event}, {"subject", layout.tags.subject}, {"object", layout.tags.object}}}};
}

Layout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open layout " + path.string());
  try {
    return layout_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw UsageError("layout " + path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

RawKnowledge build_raw(const corpus::Session& first, std::string_view separator) {
  std::vector<std::string> parts;
  for (const auto& t : first.turns) {
    if (t.speaker == corpus::Speaker::User) parts.emplace_back(text::trim(t.text));
  }
  if (parts.empty()) throw DataError("empty knowledge source: no user turns in first session");
  RawKnowledge raw;
  raw.text = text::join(parts, " " + std::string(separator) + " ");
  raw.token_count = text::split_ws(raw.text).size();
  return raw;
}

HeadNounKnowledge extract_head_nouns(const std::vector<syntax::ParsedSentence>& parses) {
  HeadNounKnowledge out;
  std::unordered_set<std::string> seen;
  for (const auto& s : parses) {
    for (const auto& t : s.tokens) {
      if (!is_noun(t.upos)) continue;
      if (t.head != 0 && is_noun(s.token(t.head).upos)) continue;
      auto lemma = text::to_lower(t.lemma);
      if (seen.insert(lemma).second) out.lemmas.push_back(std::move(lemma));
    }
  }
  return out;
}

void PersonalSpaceGraph::validate() const {
  std::unordered_set<std::string> labels;
  for (const auto& n : nodes) {
    if (n.empty() || normalize_label(n) != n) throw DataError("graph node label '" + n + "' is empty or not whitespace-normalized");
    if (!labels.insert(n).second) throw DataError("duplicate graph node '" + n + "'");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.predicate.empty() || normalize_label(e.predicate) != e.predicate) {
      throw DataError("event predicate '" + e.predicate + "' is empty or not whitespace-normalized");
    }
    if (!e.subject && !e.object) throw DataError("event '" + e.predicate + "' has no participant");
    for (const auto& role : {e.subject, e.object}) {
      if (role && !labels.count(*role)) throw DataError("event participant '" + *role + "' is not a graph node");
    }
    if (e.occurrence != i) throw DataError("event occurrences must follow list order");
  }
}

namespace {

std::string participant_label(const syntax::ParsedSentence& s, const syntax::ParsedToken& dep, ParticipantMode mode) {
  if (mode == ParticipantMode::Lemma) return normalize_label(text::to_lower(dep.lemma));
  std::vector<std::size_t> members{dep.index};
  for (std::size_t k = 0; k < members.size(); ++k) {
    for (const auto& t : s.tokens) {
      if (t.head == members[k]) members.push_back(t.index);
    }
  }
  std::sort(members.begin(), members.end());
  std::vector<std::string> forms;
  for (auto m : members) forms.push_back(text::to_lower(s.token(m).form));
  return normalize_label(text::join(forms, " "));
}

}  // namespace

PersonalSpaceGraph build_psg(const std::vector<syntax::ParsedSentence>& parses, const PsgOptions& options) {
  PersonalSpaceGraph g;
  std::unordered_set<std::string> node_set;
  std::set<std::tuple<std::string, std::optional<std::string>, std::optional<std::string>>> seen;
  auto add_node = [&](const std::optional<std::string>& label) {
    if (label && node_set.insert(*label).second) g.nodes.push_back(*label);
  };
  for (const auto& s : parses) {
    for (const auto& verb : s.tokens) {
      if (verb.upos != "VERB") continue;
      const syntax::ParsedToken* subj = nullptr;
      const syntax::ParsedToken* obj = nullptr;
      const syntax::ParsedToken* iobj = nullptr;
      for (const auto& dep : s.tokens) {
        if (dep.head != verb.index) continue;
        if ((dep.deprel == "nsubj" || dep.deprel == "nsubj:pass") && !subj) subj = &dep;
        if (dep.deprel == "obj" && !obj) obj = &dep;
        if (dep.deprel == "iobj" && !iobj) iobj = &dep;
      }
      if (!obj) obj = iobj;
      if (!subj && !obj) continue;
      if (options.require_both_roles && (!subj || !obj)) continue;
      Event e;
      e.predicate = normalize_label(text::to_lower(verb.lemma));
      if (subj) e.subject = participant_label(s, *subj, options.participants);
      if (obj) e.object = participant_label(s, *obj, options.participants);
      if (!seen.insert({e.predicate, e.subject, e.object}).second) continue;
      e.occurrence = g.events.size();
      add_node(e.subject);
      add_node(e.object);
      g.events.push_back(std::move(e));
    }
  }
  return g;
}

namespace {

bool is_tag(const std::string& tok, const LinearizationTags& tags) {
  return tok == tags.event || tok == tags.subject || tok == tags.object;
}

std::string escape(const std::string& tok, const LinearizationTags& tags) {
  if (is_tag(tok, tags) || (!tok.empty() && tok[0] == '\\')) return "\\" + tok;
  return tok;
}

}  // namespace

LinearizedGraph linearize_psg(const PersonalSpaceGraph& graph, const LinearizationTags& tags) {
  graph.validate();
  std::vector<std::string> toks;
  LinearizedGraph out;
  auto emit = [&](const std::string& tag, const std::string& label) {
    out.tag_positions.push_back(toks.size());
    toks.push_back(tag);
    for (const auto& t : text::split_ws(label)) toks.push_back(escape(t, tags));
  };
  for (const auto& e : graph.events) {
    emit(tags.event, e.predicate);
    if (e.subject) emit(tags.subject, *e.subject);
    if (e.object) emit(tags.object, *e.object);
  }
  out.text = text::join(toks, " ");
  return out;
}

std::vector<Event> parse_linearized(std::string_view linear, const LinearizationTags& tags) {
  const auto toks = text::split_ws(linear);
  std::vector<Event> events;
  std::size_t i = 0;
  auto read_label = [&]() {
    std::vector<std::string> parts;
    while (i < toks.size() && !is_tag(toks[i], tags)) {
      const auto& t = toks[i++];
      parts.push_back(!t.empty() && t[0] == '\\' ? t.substr(1) : t);
    }
    if (parts.empty()) throw DataError("linearized graph: empty label before token " + std::to_string(i));
    return text::join(parts, " ");
  };
  while (i < toks.size()) {
    if (toks[i] != tags.event) throw DataError("linearized graph: expected event tag at token " + std::to_string(i));
    ++i;
    Event e;
    e.predicate = read_label();
    if (i < toks.size() && toks[i] == tags.subject) {
      ++i;
      e.subject = read_label();
    }
    if (i < toks.size() && toks[i] == tags.object) {
      ++i;
      e.object = read_label();
    }
    if (!e.subject && !e.object) throw DataError("linearized graph: event '" + e.predicate + "' has no participant");
    e.occurrence = events.size();
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<syntax::ParsedSentence> knowledge_parses(const corpus::DialoguePair& pair,
                                                     const std::vector<syntax::ParsedSentence>& parses) {
  std::vector<syntax::ParsedSentence> out;
  for (const auto& s : parses) {
    const auto& src = s.source_turn;
    if (src.dialogue_id != pair.dialogue_id || src.session != 1) continue;
    if (src.turn >= pair.first.turns.size()) continue;
    if (pair.first.turns[src.turn].speaker != corpus::Speaker::User) continue;
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.source_turn.turn < b.source_turn.turn; });
  return out;
}

std::string_view to_string(Segment s) { return s == Segment::Knowledge ? "knowledge" : "history"; }

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Event: return "event";
    case Role::Participant: return "participant";
    case Role::Tag: return "tag";
    case Role::Other: return "other";
  }
  return "other";
}

Segment parse_segment(std::string_view s) {
  if (s == "knowledge") return Segment::Knowledge;
  if (s == "history") return Segment::History;
  throw DataError("unknown segment '" + std::string(s) + "'");
}

Role parse_role(std::string_view s) {
  if (s == "event") return Role::Event;
  if (s == "participant") return Role::Participant;
  if (s == "tag") return Role::Tag;
  if (s == "other") return Role::Other;
  throw DataError("unknown role '" + std::string(s) + "'");
}

Repr repr_of(const Knowledge& k) {
  switch (k.index()) {
    case 1: return Repr::Raw;
    case 2: return Repr::HeadNouns;
    case 3: return Repr::LinearGraph;
    default: return Repr::None;
  }
}

namespace {

void push_plain(std::vector<InputToken>& out, std::string_view s, Segment seg) {
  for (auto& t : text::split_ws(s)) out.push_back({std::move(t), seg, Role::Other});
}

void push_graph(std::vector<InputToken>& out, const LinearizedGraph& g, const LinearizationTags& tags) {
  const auto toks = text::split_ws(g.text);
  std::vector<bool> tag_at(toks.size(), false);
  for (auto p : g.tag_positions) {
    if (p >= toks.size()) throw DataError("linearized graph tag position out of range");
    tag_at[p] = true;
  }
  Role current = Role::Other;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (tag_at[i]) {
      current = toks[i] == tags.event ? Role::Event : Role::Participant;
      out.push_back({toks[i], Segment::Knowledge, Role::Tag});
    } else {
      out.push_back({toks[i], Segment::Knowledge, current});
    }
  }
}

}  // namespace

InputSequence assemble_input(const corpus::GroundedSample& sample, const Knowledge& knowledge, const Layout& layout) {
  if (!is_single_token(layout.user_marker) || !is_single_token(layout.agent_marker)) {
    throw UsageError("layout is missing speaker markers");
  }
  if (sample.history.empty()) throw DataError("sample '" + sample.sample_id + "' has an empty history");
  InputSequence seq;
  seq.sample_id = sample.sample_id;
  seq.repr = repr_of(knowledge);
  seq.target_text = sample.target.text;
  if (const auto* raw = std::get_if<RawKnowledge>(&knowledge)) {
    push_plain(seq.tokens, raw->text, Segment::Knowledge);
  } else if (const auto* boh = std::get_if<HeadNounKnowledge>(&knowledge)) {
    for (const auto& l : boh->lemmas) push_plain(seq.tokens, l, Segment::Knowledge);
  } else if (const auto* g = std::get_if<LinearizedGraph>(&knowledge)) {
    push_graph(seq.tokens, *g, layout.tags);
  }
  for (const auto& turn : sample.history) {
    const auto& marker = turn.speaker == corpus::Speaker::User ? layout.user_marker : layout.agent_marker;
    seq.tokens.push_back({marker, Segment::History, Role::Other});
    push_plain(seq.tokens, turn.text, Segment::History);
  }
  return seq;
}

json to_json(const InputSequence& seq) {
  json toks = json::array();
  for (const auto& t : seq.tokens) {
    toks.push_back({{"text", t.text}, {"segment", to_string(t.segment)}, {"role", to_string(t.role)}});
  }
  return {{"sample_id", seq.sample_id}, {"repr", to_string(seq.repr)}, {"tokens", std::move(toks)}, {"target_text", seq.target_text}};
}

void write_input_sequences(std::ostream& out, const std::vector<InputSequence>& seqs) {
  jsonl::write_header(out, kInputSchema);
  for (const auto& s : seqs) jsonl::write_line(out, to_json(s));
}

std::vector<InputSequence> read_input_sequences(std::istream& in, std::string_view source) {
  std::vector<InputSequence> out;
  std::unordered_set<std::string> ids;
  for (const auto& line : jsonl::read(in, kInputSchema, source)) {
    jsonl::Record rec(line.value, source, line.number);
    rec.only_keys({"sample_id", "repr", "tokens", "target_text"});
    InputSequence seq;
    seq.sample_id = rec.non_empty_string("sample_id");
    try {
      seq.repr = parse_repr(rec.string("repr"));
      bool seen_history = false;
      for (const auto& t : rec.array("tokens")) {
        auto tr = rec.child(t);
        tr.only_keys({"text", "segment", "role"});
        InputToken tok{tr.non_empty_string("text"), parse_segment(tr.string("segment")), parse_role(tr.string("role"))};
        if (tok.segment == Segment::History) seen_history = true;
        if (tok.segment == Segment::Knowledge && seen_history) rec.fail("knowledge token after history tokens");
        if (tok.role != Role::Other && seq.repr != Repr::LinearGraph) rec.fail("structural role outside a linearized graph");
        seq.tokens.push_back(std::move(tok));
      }
    } catch (const DataError& e) {
      if (e.line()) throw;
      rec.fail(e.what());
    }
    seq.target_text = rec.string("target_text");
    if (!ids.insert(seq.sample_id).second) rec.fail("duplicate sample_id '" + seq.sample_id + "'");
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<InputSequence> load_input_sequences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input sequences " + path.string());
  return read_input_sequences(in, path.string());
}

json to_json(const KnowledgeRecord& rec) {
  json j{{"dialogue_id", rec.dialogue_id}, {"repr", to_string(repr_of(rec.knowledge))}};
  if (const auto* raw = std::get_if<RawKnowledge>(&rec.knowledge)) {
    j["text"] = raw->text;
    j["token_count"] = raw->token_count;
  } else if (const auto* boh = std::get_if<HeadNounKnowledge>(&rec.knowledge)) {
    j["lemmas"] = boh->lemmas;
  } else if (const auto* lin = std::get_if<LinearizedGraph>(&rec.knowledge)) {
    j["text"] = lin->text;
    j["tag_positions"] = lin->tag_positions;
    if (rec.graph) {
      j["nodes"] = rec.graph->nodes;
      json events = json::array();
      for (const auto& e : rec.graph->events) {
        json ej{{"predicate", e.predicate}, {"occurrence", e.occurrence}};
        if (e.subject) ej["subject"] = *e.subject;
        if (e.object) ej["object"] = *e.object;
        events.push_back(std::move(ej));
      }
      j["events"] = std::move(events);
    }
  }
  return j;
}

void write_knowledge(std::ostream& out, const std::vector<KnowledgeRecord>& records) {
  jsonl::write_header(out, kKnowledgeSchema);
  for (const auto& r : records) jsonl::write_line(out, to_json(r));
}

std::vector<KnowledgeRecord> read_knowledge(std::istream& in, std::string_view source) {
  std::vector<KnowledgeRecord> out;
  for (const auto& line : jsonl::read(in, kKnowledgeSchema, source)) {
    jsonl::Record rec(line.value, source, line.number);
    KnowledgeRecord kr;
    kr.dialogue_id = rec.non_empty_string("dialogue_id");
    const auto repr = rec.string("repr");
    if (repr == "raw") {
      rec.only_keys({"dialogue_id", "repr", "text", "token_count"});
      RawKnowledge raw{rec.string("text"), static_cast<std::size_t>(rec.integer("token_count"))};
      if (text::split_ws(raw.text).size() != raw.token_count) rec.fail("token_count does not match text");
      kr.knowledge = std::move(raw);
    } else if (repr == "boh") {
      rec.only_keys({"dialogue_id", "repr", "lemmas"});
      HeadNounKnowledge boh;
      for (const auto& l : rec.array("lemmas")) {
        if (!l.is_string()) rec.fail("lemmas must be strings");
        boh.lemmas.push_back(l.get<std::string>());
      }
      kr.knowledge = std::move(boh);
    } else if (repr == "psg") {
      rec.only_keys({"dialogue_id", "repr", "text", "tag_positions", "nodes", "events"});
      LinearizedGraph lin;
      lin.text = rec.string("text");
      for (const auto& p : rec.array("tag_positions")) {
        if (!p.is_number_unsigned()) rec.fail("tag_positions must be non-negative integers");
        lin.tag_positions.push_back(p.get<std::size_t>());
      }
      if (rec.has("nodes") || rec.has("events")) {
        PersonalSpaceGraph g;
        for (const auto& n : rec.array("nodes")) {
          if (!n.is_string()) rec.fail("nodes must be strings");
          g.nodes.push_back(n.get<std::string>());
        }
        for (const auto& ev : rec.array("events")) {
          auto er = rec.child(ev);
          er.only_keys({"predicate", "subject", "object", "occurrence"});
          Event e;
          e.predicate = er.string("predicate");
          if (er.has("subject")) e.subject = er.string("subject");
          if (er.has("object")) e.object = er.string("object");
          e.occurrence = static_cast<std::size_t>(er.integer("occurrence"));
          g.events.push_back(std::move(e));
        }
        try {
          g.validate();
        } catch (const DataError& e) {
          rec.fail(e.what());
        }
        kr.graph = std::move(g);
      }
      kr.knowledge = std::move(lin);
    } else {
      rec.fail("unknown knowledge representation '" + repr + "'");
    }
    out.push_back(std::move(kr));
  }
  return out;
}

std::vector<KnowledgeRecord> load_knowledge(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open knowledge file " + path.string());
  return read_knowledge(in, path.string());
}

}  // namespace ldwb::knowledge
