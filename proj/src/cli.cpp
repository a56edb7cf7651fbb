#include "ldwb/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ldwb/attribution.hpp"
#include "ldwb/config.hpp"
#include "ldwb/corpus.hpp"
#include "ldwb/error.hpp"
#include "ldwb/humaneval.hpp"
#include "ldwb/interchange.hpp"
#include "ldwb/knowledge.hpp"
#include "ldwb/metrics.hpp"
#include "ldwb/service.hpp"
#include "ldwb/syntax.hpp"
#include "ldwb/text.hpp"

namespace ldwb::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::string repr;
  std::optional<std::size_t> window;
  std::string profile;
  std::string split = "all";
  std::vector<std::string> scoring;
  std::vector<std::string> generations;
  std::vector<std::string> points;
  std::vector<std::string> attributions;
  std::vector<std::string> inputs;
  std::string campaign;
  std::string judgments;
  std::optional<int> port;
  std::string kind;
  std::vector<std::string> files;
};

class Workbench {
 public:
  Workbench(config::WorkbenchConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out) {}

  void ingest();
  void split();
  int parse_check();
  void represent(const std::string& repr);
  void assemble(const Options& o);
  void subsets();
  void eval_ppl(const Options& o);
  void eval_bleu(const Options& o);
  void eval_curve(const Options& o);
  void attrib(const Options& o, bool significant);
  void campaign_plan(const Options& o);
  void campaign_serve(const Options& o);
  void campaign_report(const Options& o);
  void validate(const Options& o);

 private:
  const std::vector<corpus::DialoguePair>& pairs() {
    if (!pairs_) {
      if (cfg_.paths.corpus.empty()) throw UsageError("no corpus path configured (paths.corpus or LDWB_CORPUS)");
      pairs_ = corpus::load_corpus(cfg_.paths.corpus);
    }
    return *pairs_;
  }
  const std::vector<syntax::ParsedSentence>& parses() {
    if (!parses_) {
      if (cfg_.paths.parses.empty()) throw UsageError("no parses path configured (paths.parses or LDWB_PARSES)");
      parses_ = syntax::load_parses(cfg_.paths.parses);
    }
    return *parses_;
  }
  corpus::SplitAssignment assignment() { return corpus::split_corpus(pairs(), cfg_.split.fractions, cfg_.split.seed); }
  knowledge::Knowledge knowledge_for(const corpus::DialoguePair& pair, knowledge::Repr repr,
                                     std::optional<knowledge::PersonalSpaceGraph>* graph = nullptr);
  void emit(const fs::path& rel, const std::string& content, bool echo = false);
  humaneval::Campaign load_campaign(const std::string& path);

  config::WorkbenchConfig cfg_;
  std::ostream& out_;
  std::optional<std::vector<corpus::DialoguePair>> pairs_;
  std::optional<std::vector<syntax::ParsedSentence>> parses_;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ids_text(const std::vector<std::string>& ids) {
  std::string s;
  for (const auto& id : ids) s += id + "\n";
  return s;
}

std::string fraction_label(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", f);
  return buf;
}

void Workbench::emit(const fs::path& rel, const std::string& content, bool echo) {
  const auto path = cfg_.paths.output / rel;
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  if (!f.flush()) throw DataError("cannot write " + path.string());
  if (echo) out_ << content;
}

knowledge::Knowledge Workbench::knowledge_for(const corpus::DialoguePair& pair, knowledge::Repr repr,
                                              std::optional<knowledge::PersonalSpaceGraph>* graph) {
  using knowledge::Repr;
  switch (repr) {
    case Repr::None: return std::monostate{};
    case Repr::Raw: return knowledge::build_raw(pair.first, cfg_.layout.separator);
    case Repr::HeadNouns:
    case Repr::LinearGraph: {
      auto kp = knowledge::knowledge_parses(pair, parses());
      if (kp.empty()) throw DataError("dialogue '" + pair.dialogue_id + "' has no parsed first-session user turns");
      if (repr == Repr::HeadNouns) return knowledge::extract_head_nouns(kp);
      auto g = knowledge::build_psg(kp, cfg_.psg);
      auto lin = knowledge::linearize_psg(g, cfg_.layout.tags);
      if (graph) *graph = std::move(g);
      return lin;
    }
  }
  return std::monostate{};
}

void Workbench::ingest() {
  const auto& ps = pairs();
  std::size_t first_turns = 0, second_turns = 0, user_turns = 0;
  json samples = json::object();
  for (const auto& p : ps) {
    first_turns += p.first.turns.size();
    second_turns += p.second.turns.size();
    for (const auto& t : p.first.turns) user_turns += t.speaker == corpus::Speaker::User;
  }
  for (const auto& [profile, w] : cfg_.windows) {
    std::size_t n = 0;
    for (const auto& p : ps) n += corpus::make_samples(p, w).size();
    samples[profile] = {{"window", w}, {"samples", n}};
  }
  std::ostringstream corpus_out;
  corpus::write_corpus(corpus_out, ps);
  emit("corpus.jsonl", corpus_out.str());
  json stats = {{"dialogues", ps.size()},
                {"first_session_turns", first_turns},
                {"first_session_user_turns", user_turns},
                {"second_session_turns", second_turns},
                {"samples", samples}};
  emit("ingest.json", stats.dump(2) + "\n");
  out_ << "dialogues\t" << ps.size() << "\nfirst_session_turns\t" << first_turns << "\nsecond_session_turns\t"
       << second_turns << "\n";
  for (const auto& [profile, v] : samples.items()) {
    out_ << "samples[" << profile << ",W=" << v["window"].get<std::size_t>() << "]\t" << v["samples"].get<std::size_t>()
         << "\n";
  }
}

void Workbench::split() {
  const auto a = assignment();
  emit("split/train.ids", ids_text(a.train));
  emit("split/valid.ids", ids_text(a.valid));
  emit("split/test.ids", ids_text(a.test));
  const auto& f = cfg_.split.fractions;
  json meta = {{"seed", a.seed},
               {"fractions", {{"train", f.train}, {"valid", f.valid}, {"test", f.test}}},
               {"counts", {{"train", a.train.size()}, {"valid", a.valid.size()}, {"test", a.test.size()}}},
               {"permutation", "mt19937_64 Fisher-Yates, descending, rejection-sampled"}};
  emit("split/split.json", meta.dump(2) + "\n");
  out_ << "train\t" << a.train.size() << "\nvalid\t" << a.valid.size() << "\ntest\t" << a.test.size() << "\n";
}

int Workbench::parse_check() {
  const auto& ps = pairs();
  const auto& sentences = parses();
  std::map<std::string, const corpus::DialoguePair*> by_id;
  for (const auto& p : ps) by_id[p.dialogue_id] = &p;
  std::set<std::tuple<std::string, int, std::size_t>> covered;
  std::size_t tokens = 0;
  for (const auto& s : sentences) {
    tokens += s.tokens.size();
    const auto& src = s.source_turn;
    auto it = by_id.find(src.dialogue_id);
    if (it == by_id.end()) throw DataError("parse references unknown dialogue '" + src.dialogue_id + "'");
    const auto& session = src.session == 1 ? it->second->first : it->second->second;
    if (src.turn >= session.turns.size()) {
      throw DataError("parse references missing turn " + std::to_string(src.turn) + " of dialogue '" + src.dialogue_id +
                      "' session " + std::to_string(src.session));
    }
    covered.insert({src.dialogue_id, src.session, src.turn});
  }
  json missing = json::array();
  std::size_t required = 0;
  for (const auto& p : ps) {
    for (const auto& t : p.first.turns) {
      if (t.speaker != corpus::Speaker::User) continue;
      ++required;
      if (!covered.count({p.dialogue_id, 1, t.turn_index})) {
        missing.push_back(p.dialogue_id + ":1:" + std::to_string(t.turn_index));
      }
    }
  }
  json report = {{"sentences", sentences.size()},
                 {"tokens", tokens},
                 {"dialogues", ps.size()},
                 {"required_turns", required},
                 {"covered_turns", required - missing.size()},
                 {"missing", missing}};
  emit("parse-check.json", report.dump(2) + "\n");
  out_ << "sentences\t" << sentences.size() << "\ntokens\t" << tokens << "\ncovered_turns\t"
       << required - missing.size() << "/" << required << "\n";
  if (!missing.empty()) {
    out_ << "missing\t" << text::join(missing.get<std::vector<std::string>>(), " ") << "\n";
    return 1;
  }
  return 0;
}

void Workbench::represent(const std::string& repr_name) {
  const auto repr = repr_name.empty() ? cfg_.representation : knowledge::parse_repr(repr_name);
  if (repr == knowledge::Repr::None) throw UsageError("represent needs one of raw, boh, psg");
  std::vector<knowledge::KnowledgeRecord> records;
  for (const auto& p : pairs()) {
    knowledge::KnowledgeRecord rec;
    rec.dialogue_id = p.dialogue_id;
    rec.knowledge = knowledge_for(p, repr, &rec.graph);
    records.push_back(std::move(rec));
  }
  std::ostringstream s;
  knowledge::write_knowledge(s, records);
  const auto name = std::string(knowledge::to_string(repr));
  emit("knowledge/" + name + ".jsonl", s.str());
  out_ << name << "\t" << records.size() << " records\n";
}

void Workbench::assemble(const Options& o) {
  std::size_t window = 0;
  if (o.window) {
    window = *o.window;
  } else if (!o.profile.empty()) {
    auto it = cfg_.windows.find(o.profile);
    if (it == cfg_.windows.end()) throw UsageError("unknown window profile '" + o.profile + "'");
    window = it->second;
  } else {
    throw UsageError("assemble needs --window or --profile");
  }
  if (window == 0) throw UsageError("--window must be positive");
  const auto repr = o.repr.empty() ? cfg_.representation : knowledge::parse_repr(o.repr);
  std::optional<std::set<std::string>> keep;
  if (o.split != "all") {
    const auto a = assignment();
    const auto& ids = o.split == "train" ? a.train : o.split == "valid" ? a.valid : a.test;
    keep.emplace(ids.begin(), ids.end());
  }
  std::vector<knowledge::InputSequence> seqs;
  for (const auto& p : pairs()) {
    if (keep && !keep->count(p.dialogue_id)) continue;
    const auto k = knowledge_for(p, repr);
    for (const auto& s : corpus::make_samples(p, window)) seqs.push_back(knowledge::assemble_input(s, k, cfg_.layout));
  }
  std::ostringstream s;
  knowledge::write_input_sequences(s, seqs);
  const auto name = std::string(knowledge::to_string(repr)) + "_w" + std::to_string(window) + "_" + o.split;
  emit("inputs/" + name + ".jsonl", s.str());
  out_ << name << "\t" << seqs.size() << " samples\n";
}

void Workbench::subsets() {
  const auto a = assignment();
  const auto chain = corpus::subset_chain(a.train, cfg_.subsets.fractions, cfg_.subsets.seed);
  json meta = {{"seed", cfg_.subsets.seed}, {"sets", json::array()}};
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto label = fraction_label(cfg_.subsets.fractions[k]);
    emit("subsets/train_" + label + ".ids", ids_text(chain[k]));
    meta["sets"].push_back({{"fraction", cfg_.subsets.fractions[k]}, {"size", chain[k].size()}});
    out_ << "train_" << label << "\t" << chain[k].size() << "\n";
  }
  emit("subsets/subsets.json", meta.dump(2) + "\n");
}

void Workbench::eval_ppl(const Options& o) {
  if (o.scoring.empty()) throw UsageError("eval ppl needs --scoring FILE");
  std::vector<interchange::ScoringRecord> all;
  for (const auto& f : o.scoring) {
    auto rs = interchange::load_scoring(f);
    all.insert(all.end(), rs.begin(), rs.end());
  }
  emit("reports/perplexity.tsv", metrics::format_perplexity(metrics::perplexity_by_model(all)), true);
}

void Workbench::eval_bleu(const Options& o) {
  if (o.generations.empty()) throw UsageError("eval bleu needs --generations FILE");
  std::map<std::string, std::vector<interchange::GenerationRecord>> by_model;
  for (const auto& f : o.generations) {
    for (auto& r : interchange::load_generations(f)) by_model[r.model_id].push_back(std::move(r));
  }
  std::map<std::string, std::string> truth;
  for (const auto& p : pairs()) {
    for (const auto& t : p.second.turns) {
      if (t.speaker == corpus::Speaker::Agent) truth[corpus::sample_id_for(p.dialogue_id, t.turn_index)] = t.text;
    }
  }
  const auto m = metrics::similarity_matrix(by_model, truth, cfg_.bleu);
  emit("reports/bleu_matrix.tsv", metrics::format_matrix(m), true);
  std::ostringstream plot;
  plot << "hypothesis\treference\tbleu4\tshared\n";
  for (std::size_t a = 0; a < m.labels.size(); ++a) {
    for (std::size_t b = 0; b < m.labels.size(); ++b) {
      plot << m.labels[a] << '\t' << m.labels[b] << '\t' << text::fixed(m.cells[a][b], 6) << '\t' << m.shared[a][b]
           << '\n';
    }
  }
  emit("reports/bleu_plot.tsv", plot.str());
}

void Workbench::eval_curve(const Options& o) {
  if (o.points.empty()) throw UsageError("eval curve needs --point FRACTION=FILE");
  std::vector<metrics::CurvePoint> points;
  for (const auto& spec : o.points) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--point expects FRACTION=FILE, got '" + spec + "'");
    double fraction = 0.0;
    try {
      std::size_t used = 0;
      fraction = std::stod(spec.substr(0, eq), &used);
      if (used != eq) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--point: bad fraction in '" + spec + "'");
    }
    for (auto& r : metrics::perplexity_by_model(interchange::load_scoring(spec.substr(eq + 1)))) {
      points.push_back({fraction, std::move(r)});
    }
  }
  emit("reports/curve.tsv", metrics::format_curve(metrics::learning_curve(points, cfg_.subsets.fractions)), true);
}

void Workbench::attrib(const Options& o, bool significant) {
  if (o.attributions.empty() || o.attributions.size() != o.inputs.size()) {
    throw UsageError("attrib needs matching --attributions FILE and --inputs FILE pairs");
  }
  std::vector<attribution::PositiveProfile> positives;
  std::vector<attribution::SignificantShares> shares;
  std::string dumps;
  for (std::size_t i = 0; i < o.attributions.size(); ++i) {
    auto records = interchange::load_attributions(o.attributions[i]);
    const auto seqs = knowledge::load_input_sequences(o.inputs[i]);
    if (seqs.empty()) throw DataError(o.inputs[i] + ": no input sequences");
    const auto repr = seqs.front().repr;
    for (const auto& s : seqs) {
      if (s.repr != repr) throw DataError(o.inputs[i] + ": mixed representations");
    }
    interchange::align_all(records, seqs);
    std::map<std::string, std::vector<interchange::AttributionRecord>> by_model;
    for (auto& r : records) by_model[r.model_id].push_back(std::move(r));
    for (const auto& [model, rs] : by_model) {
      if (significant) {
        std::size_t skipped = 0;
        const auto usable = attribution::without_empty_segments(rs, skipped);
        if (usable.empty()) throw DataError("model '" + model + "': every record has an empty segment");
        shares.push_back(
            attribution::significant_stats(usable, repr, cfg_.attribution.top_fraction, cfg_.attribution.pooling));
        shares.back().skipped = skipped;
        dumps += attribution::format_record_dump(shares.back());
      } else {
        attribution::PositiveOptions po;
        po.exclude_tags = cfg_.attribution.exclude_tags;
        positives.push_back(attribution::positive_stats(rs, repr, po));
      }
    }
  }
  if (significant) {
    emit("reports/attrib_significant.tsv", attribution::format_significant_table(shares), true);
    emit("reports/attrib_significant_records.tsv", dumps);
  } else {
    emit("reports/attrib_positive.tsv", attribution::format_positive_table(positives), true);
  }
}

humaneval::Campaign Workbench::load_campaign(const std::string& path) {
  if (path.empty()) throw UsageError("--campaign FILE is required");
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  if (j.is_object() && !j.contains("config")) {
    const auto& c = cfg_.campaign;
    j["config"] = {{"raters_per_item", c.raters_per_item},
                   {"histories_per_worker", c.histories_per_worker},
                   {"candidates_per_history", c.candidates_per_history},
                   {"qualification_size", c.qualification_size},
                   {"qualification_threshold", c.qualification_threshold}};
  }
  try {
    return humaneval::campaign_from_json(j);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void Workbench::campaign_plan(const Options& o) {
  const auto c = load_campaign(o.campaign);
  const auto plan = humaneval::plan_assignments(c.histories, c.workers, c.config, c.seed);
  emit("campaign/plan.json", humaneval::plan_to_json(plan).dump(2) + "\n");
  std::size_t total = 0;
  for (const auto& [w, tasks] : plan) {
    out_ << w << "\t" << tasks.size() << "\n";
    total += tasks.size();
  }
  out_ << "total\t" << total << "\n";
}

void Workbench::campaign_serve(const Options& o) {
  auto dir = cfg_.service.state_dir;
  if (dir.is_relative()) dir = cfg_.paths.output / dir;
  service::EvaluationService svc(dir);
  if (!o.campaign.empty() && !svc.has_campaign()) {
    try {
      svc.create_campaign(load_campaign(o.campaign));
    } catch (const service::ServiceError& e) {
      throw DataError(e.what());
    }
  }
  service::HttpFrontEnd http(svc);
  const int port = http.bind(cfg_.service.host, o.port.value_or(cfg_.service.port));
  out_ << "listening on " << cfg_.service.host << ":" << port << std::endl;
  http.listen();
}

void Workbench::campaign_report(const Options& o) {
  const auto c = load_campaign(o.campaign);
  if (o.judgments.empty()) throw UsageError("--judgments FILE is required");
  std::set<std::string> qual_ids;
  for (const auto& q : c.qualification) qual_ids.insert(q.candidate.candidate_id);
  std::vector<humaneval::JudgmentRecord> main;
  for (auto& j : service::load_judgments(o.judgments)) {
    if (!qual_ids.count(j.candidate_id)) main.push_back(std::move(j));
  }
  const auto index = humaneval::index_candidates(c.histories);
  const auto majority = humaneval::aggregate_majority(main, index, c.config);
  const auto agreement = humaneval::agreement_report(main, index);
  const auto errors = humaneval::error_distribution(main, index);
  emit("reports/human_majority.tsv", humaneval::format_majority(majority), true);
  emit("reports/human_kappa.tsv", humaneval::format_agreement(agreement), true);
  emit("reports/human_errors.tsv", humaneval::format_errors(errors), true);
  json all = {{"majority", humaneval::majority_json(majority)},
              {"kappa", humaneval::agreement_json(agreement)},
              {"errors", humaneval::errors_json(errors)}};
  emit("reports/human_report.json", all.dump(2) + "\n");
}

void Workbench::validate(const Options& o) {
  for (const auto& f : o.files) {
    std::size_t n = 0;
    if (o.kind == "corpus") n = corpus::load_corpus(f).size();
    else if (o.kind == "parses") n = syntax::load_parses(f).size();
    else if (o.kind == "knowledge") n = knowledge::load_knowledge(f).size();
    else if (o.kind == "input_sequence") n = knowledge::load_input_sequences(f).size();
    else if (o.kind == "generation") n = interchange::load_generations(f).size();
    else if (o.kind == "scoring") n = interchange::load_scoring(f).size();
    else if (o.kind == "attribution") n = interchange::load_attributions(f).size();
    else if (o.kind == "judgment") n = service::load_judgments(f).size();
    else if (o.kind == "campaign") n = load_campaign(f).histories.size();
    out_ << f << '\t' << o.kind << '\t' << n << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Longitudinal dialogue workbench", "ldwb"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "workbench config (JSON)");

  auto* ingest = app.add_subcommand("ingest", "validate the corpus and write corpus statistics");
  auto* split = app.add_subcommand("split", "write train/valid/test dialogue id lists");
  auto* parse_check = app.add_subcommand("parse-check", "validate parses against the corpus");
  auto* represent = app.add_subcommand("represent", "build knowledge representations");
  represent->add_option("--repr", o.repr, "raw | boh | psg")->check(CLI::IsMember({"raw", "boh", "psg"}));
  auto* assemble = app.add_subcommand("assemble", "assemble model input sequences");
  assemble->add_option("--window", o.window, "history window in turns");
  assemble->add_option("--profile", o.profile, "window profile from the config");
  assemble->add_option("--repr", o.repr, "none | raw | boh | psg")->check(CLI::IsMember({"none", "raw", "boh", "psg"}));
  assemble->add_option("--split", o.split, "all | train | valid | test")
      ->check(CLI::IsMember({"all", "train", "valid", "test"}));
  auto* subsets = app.add_subcommand("subsets", "write nested training subsets");

  auto* eval = app.add_subcommand("eval", "automatic evaluation reports");
  eval->require_subcommand(1);
  auto* ppl = eval->add_subcommand("ppl", "perplexity per model");
  ppl->add_option("--scoring", o.scoring, "scoring record files")->required();
  auto* bleu = eval->add_subcommand("bleu", "BLEU-4 similarity matrix");
  bleu->add_option("--generations", o.generations, "generation record files")->required();
  auto* curve = eval->add_subcommand("curve", "perplexity learning curve");
  curve->add_option("--point", o.points, "FRACTION=scoring file")->required();

  auto* attrib = app.add_subcommand("attrib", "attribution analytics");
  attrib->require_subcommand(1);
  auto* positive = attrib->add_subcommand("positive", "positively attributed tokens");
  auto* significant = attrib->add_subcommand("significant", "segment shares among top tokens");
  for (auto* sc : {positive, significant}) {
    sc->add_option("--attributions", o.attributions, "attribution record files")->required();
    sc->add_option("--inputs", o.inputs, "matching input sequence files")->required();
  }

  auto* campaign = app.add_subcommand("campaign", "human evaluation campaign");
  campaign->require_subcommand(1);
  auto* plan = campaign->add_subcommand("plan", "assign candidates to workers");
  plan->add_option("--campaign", o.campaign, "campaign definition (JSON)")->required();
  auto* serve = campaign->add_subcommand("serve", "run the evaluation service");
  serve->add_option("--campaign", o.campaign, "campaign definition to load when the state is empty");
  serve->add_option("--port", o.port, "override the configured port");
  auto* report = campaign->add_subcommand("report", "human evaluation reports");
  report->add_option("--campaign", o.campaign, "campaign definition (JSON)")->required();
  report->add_option("--judgments", o.judgments, "judgment journal or export")->required();

  auto* validate = app.add_subcommand("validate", "check files against their record schema");
  validate->add_option("--kind", o.kind, "record kind")
      ->required()
      ->check(CLI::IsMember({"corpus", "parses", "knowledge", "input_sequence", "generation", "scoring", "attribution",
                             "judgment", "campaign"}));
  validate->add_option("files", o.files, "files to check")->required();

  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      ++i;
      continue;
    }
    if (args[i].rfind('-', 0) == 0) continue;
    if (!app.get_subcommand_no_throw(args[i])) {
      err << "error: unknown subcommand '" << args[i] << "'\n\n" << app.help();
      return 2;
    }
    break;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    config::WorkbenchConfig cfg;
    if (!o.config_path.empty()) cfg = config::load(o.config_path);
    config::apply_env(cfg);
    Workbench wb(std::move(cfg), out);
    if (ingest->parsed()) wb.ingest();
    if (split->parsed()) wb.split();
    if (parse_check->parsed()) return wb.parse_check();
    if (represent->parsed()) wb.represent(o.repr);
    if (assemble->parsed()) wb.assemble(o);
    if (subsets->parsed()) wb.subsets();
    if (ppl->parsed()) wb.eval_ppl(o);
    if (bleu->parsed()) wb.eval_bleu(o);
    if (curve->parsed()) wb.eval_curve(o);
    if (positive->parsed()) wb.attrib(o, false);
    if (significant->parsed()) wb.attrib(o, true);
    if (plan->parsed()) wb.campaign_plan(o);
    if (serve->parsed()) wb.campaign_serve(o);
    if (report->parsed()) wb.campaign_report(o);
    if (validate->parsed()) wb.validate(o);
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ldwb::cli
