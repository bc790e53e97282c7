#include "dlu/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dlu/errors.hpp"

namespace dlu {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(v[i]);
  }
  return out;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "corpus_path") cfg.corpus_path = value;
    else if (key == "corpus_format") {
      if (value == "csv") cfg.corpus_format = CorpusFormat::Csv;
      else if (value == "text") cfg.corpus_format = CorpusFormat::Text;
      else throw ConfigError("corpus_format must be csv or text");
    } else if (key == "embedding_kind") {
      if (value != "hashed-random" && value != "file-backed")
        throw ConfigError("embedding_kind must be hashed-random or file-backed");
      cfg.embedding_kind = value;
    } else if (key == "embedding_dim") cfg.embedding_dim = std::stoi(value);
    else if (key == "embedding_seed") cfg.embedding_seed = std::stoull(value);
    else if (key == "embedding_file") cfg.embedding_file = value;
    else if (key == "mode") {
      if (value == "linear-cca") cfg.mode = DiscourseMode::LinearCca;
      else if (value == "dcca") cfg.mode = DiscourseMode::Dcca;
      else throw ConfigError("mode must be linear-cca or dcca");
    } else if (key == "reg_r") cfg.reg_r = std::stod(value);
    else if (key == "eig_floor") cfg.eig_floor = std::stod(value);
    else if (key == "dedup_tau") cfg.dedup_tau = std::stod(value);
    else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
    else if (key == "max_iters") cfg.max_iters = std::stoi(value);
    else if (key == "tol") cfg.tol = std::stod(value);
    else if (key == "hidden_widths") cfg.hidden_widths = parse_int_list(value);
    else if (key == "num_candidates") cfg.num_candidates = std::stoi(value);
    else if (key == "ks") cfg.ks = parse_int_list(value);
    else if (key == "negatives") cfg.negatives = std::stoi(value);
    else if (key == "max_context_turns") cfg.max_context_turns = std::stoi(value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "seed") cfg.seed = std::stoull(value);
    else throw ConfigError("unknown config key: " + key);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got: " + key_equals_value);
  set_key(cfg, trim(key_equals_value.substr(0, eq)),
          trim(key_equals_value.substr(eq + 1)));
}

void validate_config(const RunConfig& cfg, bool require_corpus) {
  if (cfg.embedding_dim < 2) throw ConfigError("embedding_dim must be >= 2");
  if (!(cfg.dedup_tau > 0.0 && cfg.dedup_tau <= 1.0))
    throw ConfigError("dedup_tau must be in (0, 1]");
  if (cfg.reg_r < 0.0) throw ConfigError("reg_r must be non-negative");
  if (cfg.eig_floor <= 0.0) throw ConfigError("eig_floor must be positive");
  if (cfg.num_candidates < 2) throw ConfigError("num_candidates must be >= 2");
  if (cfg.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (cfg.max_iters < 0) throw ConfigError("max_iters must be non-negative");
  if (cfg.tol <= 0.0) throw ConfigError("tol must be positive");
  if (require_corpus && !std::filesystem::exists(cfg.corpus_path))
    throw ConfigError("corpus_path does not exist: " + cfg.corpus_path);
  if (cfg.embedding_kind == "file-backed" &&
      !std::filesystem::exists(cfg.embedding_file))
    throw ConfigError("embedding_file does not exist: " + cfg.embedding_file);
}

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "corpus_path = " << cfg.corpus_path << '\n'
      << "corpus_format = "
      << (cfg.corpus_format == CorpusFormat::Csv ? "csv" : "text") << '\n'
      << "embedding_kind = " << cfg.embedding_kind << '\n'
      << "embedding_dim = " << cfg.embedding_dim << '\n'
      << "embedding_seed = " << cfg.embedding_seed << '\n'
      << "embedding_file = " << cfg.embedding_file << '\n'
      << "mode = " << (cfg.mode == DiscourseMode::Dcca ? "dcca" : "linear-cca")
      << '\n'
      << "reg_r = " << cfg.reg_r << '\n'
      << "eig_floor = " << cfg.eig_floor << '\n'
      << "dedup_tau = " << cfg.dedup_tau << '\n'
      << "learning_rate = " << cfg.learning_rate << '\n'
      << "max_iters = " << cfg.max_iters << '\n'
      << "tol = " << cfg.tol << '\n'
      << "hidden_widths = " << join_ints(cfg.hidden_widths) << '\n'
      << "num_candidates = " << cfg.num_candidates << '\n'
      << "ks = " << join_ints(cfg.ks) << '\n'
      << "negatives = " << cfg.negatives << '\n'
      << "max_context_turns = " << cfg.max_context_turns << '\n'
      << "output_dir = " << cfg.output_dir << '\n'
      << "seed = " << cfg.seed << '\n';
  return out.str();
}

EmbeddingProvider make_provider(const RunConfig& cfg) {
  if (cfg.embedding_kind == "file-backed")
    return EmbeddingProvider::from_file(cfg.embedding_file);
  return EmbeddingProvider::hashed_random(cfg.embedding_dim, cfg.embedding_seed);
}

DiscourseConfig make_discourse_config(const RunConfig& cfg) {
  DiscourseConfig dc;
  dc.mode = cfg.mode;
  dc.dedup_tau = cfg.dedup_tau;
  dc.cca.reg_r = cfg.reg_r;
  dc.cca.eig_floor = cfg.eig_floor;
  dc.train.learning_rate = cfg.learning_rate;
  dc.train.max_iters = cfg.max_iters;
  dc.train.tol = cfg.tol;
  dc.hidden_widths = cfg.hidden_widths;
  dc.seed = cfg.seed;
  return dc;
}

RankResult rank_instance(const RetrievalInstance& inst, const RunConfig& cfg,
                         const EmbeddingProvider& provider) {
  std::vector<std::string> context = inst.context;
  if (cfg.max_context_turns > 0 &&
      static_cast<int>(context.size()) > cfg.max_context_turns) {
    context.assign(context.end() - cfg.max_context_turns, context.end());
  }

  std::vector<UtteranceMatrix> matrices;
  for (const std::string& turn : context) {
    const auto tokens = tokenize(turn);
    if (tokens.empty()) continue;
    matrices.push_back(embed_utterance(provider, tokens));
  }
  if (matrices.empty()) throw EmptyUtterance();

  const DiscourseState state = build_discourse(matrices, make_discourse_config(cfg));

  CandidateSet cands;
  for (std::size_t c = 0; c < inst.candidates.size(); ++c) {
    auto tokens = tokenize(inst.candidates[c]);
    if (tokens.empty()) tokens.push_back("<empty>");
    cands.candidates.emplace_back(static_cast<int>(c),
                                  embed_utterance(provider, tokens));
  }
  cands.truth_id = inst.truth_index;

  const RankedCandidates ranked = rank(state, cands);

  RankResult result;
  result.id = inst.id;
  result.order = ranked.order;
  for (int id : ranked.order) result.scores.push_back(ranked.scores.at(id));
  return result;
}

std::string rankings_to_jsonl(const std::vector<RankResult>& results) {
  std::string out;
  for (const RankResult& r : results) {
    json j{{"id", r.id}, {"order", r.order}, {"scores", r.scores}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<RankResult> rankings_from_jsonl(std::istream& in) {
  std::vector<RankResult> results;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    RankResult r;
    r.id = j.at("id").get<int>();
    r.order = j.at("order").get<std::vector<int>>();
    r.scores = j.at("scores").get<std::vector<double>>();
    results.push_back(std::move(r));
  }
  return results;
}

EvalReport evaluate_pipeline(const std::vector<RankResult>& rankings,
                             const std::vector<RetrievalInstance>& instances,
                             const RunConfig& cfg) {
  std::vector<RankingRecord> records;
  for (const RankResult& r : rankings) records.push_back({r.id, r.order, 0});
  // truth ids come from the instances
  std::size_t i = 0;
  for (RankingRecord& rec : records) {
    bool found = false;
    for (const RetrievalInstance& inst : instances) {
      if (inst.id == rec.id) {
        rec.truth_id = inst.truth_index;
        found = true;
        break;
      }
    }
    if (!found)
      throw ConfigError("ranking id " + std::to_string(rec.id) +
                        " has no matching instance");
    ++i;
  }

  std::vector<std::vector<std::string>> lm_refs;
  for (const RetrievalInstance& inst : instances)
    lm_refs.push_back(tokenize(inst.candidates.at(inst.truth_index)));

  EvalReport report = evaluate_run(records, instances, lm_refs, cfg.ks);
  report.config_echo = config_to_text(cfg);
  return report;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

}  // namespace dlu
