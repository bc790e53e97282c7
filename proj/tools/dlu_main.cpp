#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dlu/errors.hpp"
#include "dlu/pipeline.hpp"
#include "dlu/synthetic.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

dlu::RunConfig load_config(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
  dlu::RunConfig cfg;
  if (!config_path.empty()) cfg = dlu::parse_config_file(config_path);
  for (const auto& o : overrides) dlu::apply_override(cfg, o);
  return cfg;
}

std::vector<dlu::RetrievalInstance> read_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dlu::ConfigError("cannot open instances file: " + path);
  auto instances = dlu::instances_from_jsonl(in);
  if (instances.empty()) throw dlu::ConfigError("instances file is empty: " + path);
  return instances;
}

int cmd_gen_synthetic(const dlu::RunConfig& cfg, const std::string& out_path,
                      int dialogues, std::uint64_t gen_seed) {
  dlu::SyntheticConfig sc;
  sc.num_dialogues = dialogues;
  sc.seed = gen_seed;
  const auto corpus = dlu::generate_synthetic_corpus(sc);
  const std::string path =
      out_path.empty() ? cfg.output_dir + "/corpus.txt" : out_path;
  dlu::write_file_atomic(path, dlu::dialogues_to_text(corpus));
  std::cout << "wrote " << corpus.size() << " dialogues to " << path << "\n";
  return 0;
}

int cmd_ingest(const dlu::RunConfig& cfg) {
  dlu::validate_config(cfg, /*require_corpus=*/true);
  const auto dialogues = dlu::load_corpus(cfg.corpus_path, cfg.corpus_format);
  const auto instances =
      dlu::make_instances(dialogues, cfg.num_candidates, cfg.seed);
  const std::string path = cfg.output_dir + "/instances.jsonl";
  dlu::write_file_atomic(path, dlu::instances_to_jsonl(instances));
  std::cout << "dialogues: " << dialogues.size() << "\n"
            << "instances: " << instances.size() << " (" << cfg.num_candidates
            << " candidates each) -> " << path << "\n";
  return 0;
}

int cmd_extract_discourse(const dlu::RunConfig& cfg, const std::string& instances_path,
                          int instance_id) {
  dlu::validate_config(cfg, /*require_corpus=*/false);
  const auto instances = read_instances(instances_path);
  const dlu::RetrievalInstance* inst = nullptr;
  for (const auto& i : instances)
    if (i.id == instance_id) inst = &i;
  if (!inst)
    throw dlu::ConfigError("no instance with id " + std::to_string(instance_id));

  const auto provider = dlu::make_provider(cfg);
  std::vector<dlu::UtteranceMatrix> matrices;
  for (const auto& turn : inst->context) {
    const auto tokens = dlu::tokenize(turn);
    if (!tokens.empty()) matrices.push_back(dlu::embed_utterance(provider, tokens));
  }
  const auto state = dlu::build_discourse(matrices, dlu::make_discourse_config(cfg));

  std::string out;
  for (std::size_t i = 0; i < state.tokens.size(); ++i) {
    const auto& t = state.tokens[i];
    std::vector<double> v(t.vector.data(), t.vector.data() + t.vector.size());
    json j{{"index", i},
           {"vector", v},
           {"correlation", t.correlation},
           {"origin", {t.origin_utterance, t.origin_component}}};
    out += j.dump();
    out.push_back('\n');
  }
  const std::string path =
      cfg.output_dir + "/discourse_" + std::to_string(instance_id) + ".jsonl";
  dlu::write_file_atomic(path, out);
  std::cout << "discourse tokens: " << state.tokens.size() << " -> " << path << "\n";
  return 0;
}

int cmd_train_dcca(const dlu::RunConfig& cfg, const std::string& instances_path,
                   int instance_id) {
  dlu::validate_config(cfg, /*require_corpus=*/false);
  const auto instances = read_instances(instances_path);
  const dlu::RetrievalInstance* inst = nullptr;
  for (const auto& i : instances)
    if (i.id == instance_id) inst = &i;
  if (!inst)
    throw dlu::ConfigError("no instance with id " + std::to_string(instance_id));
  if (inst->context.size() < 2)
    throw dlu::ConfigError("instance context has fewer than 2 utterances");

  const auto provider = dlu::make_provider(cfg);
  const auto utt1 = dlu::embed_utterance(provider, dlu::tokenize(inst->context[0]));
  const auto utt2 = dlu::embed_utterance(provider, dlu::tokenize(inst->context[1]));

  dlu::NetworkSpec s1, s2;
  s1.input_dim = utt1.token_count();
  s2.input_dim = utt2.token_count();
  s1.output_dim = s2.output_dim =
      std::min(utt1.token_count(), utt2.token_count());
  s1.hidden_widths = s2.hidden_widths = cfg.hidden_widths;

  dlu::TrainConfig tc;
  tc.learning_rate = cfg.learning_rate;
  tc.max_iters = cfg.max_iters;
  tc.tol = cfg.tol;
  tc.seed = cfg.seed;
  tc.cca.reg_r = cfg.reg_r;
  tc.cca.eig_floor = cfg.eig_floor;
  tc.cca.num_components_k = s1.output_dim;

  const auto model = dlu::train(utt1, utt2, s1, s2, tc);
  const std::string path = cfg.output_dir + "/dcca_model.json";
  dlu::write_file_atomic(path, dlu::serialize_model(model));
  std::cout << "trained " << model.train_log.size() << " iterations, objective "
            << (model.train_log.empty() ? 0.0 : model.train_log.back().second)
            << " -> " << path << "\n";
  return 0;
}

int cmd_rank(const dlu::RunConfig& cfg, const std::string& instances_path) {
  dlu::validate_config(cfg, /*require_corpus=*/false);
  const auto instances = read_instances(instances_path);
  const auto provider = dlu::make_provider(cfg);

  std::vector<dlu::RankResult> results;
  std::size_t failures = 0;
  for (const auto& inst : instances) {
    try {
      results.push_back(dlu::rank_instance(inst, cfg, provider));
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "instance " << inst.id << " failed: " << e.what() << "\n";
    }
  }
  if (results.empty())
    throw dlu::Error("all " + std::to_string(failures) + " instances failed");

  const std::string path = cfg.output_dir + "/rankings.jsonl";
  dlu::write_file_atomic(path, dlu::rankings_to_jsonl(results));
  std::cout << "ranked " << results.size() << " instances (" << failures
            << " failed) -> " << path << "\n";
  return 0;
}

int cmd_evaluate(const dlu::RunConfig& cfg, const std::string& rankings_path,
                 const std::string& instances_path) {
  dlu::validate_config(cfg, /*require_corpus=*/false);
  const auto instances = read_instances(instances_path);
  std::ifstream rin(rankings_path);
  if (!rin) throw dlu::ConfigError("cannot open rankings file: " + rankings_path);
  const auto rankings = dlu::rankings_from_jsonl(rin);
  if (rankings.empty())
    throw dlu::ConfigError("rankings file is empty: " + rankings_path);

  const auto report = dlu::evaluate_pipeline(rankings, instances, cfg);
  const std::string json_path = cfg.output_dir + "/report.json";
  const std::string csv_path = cfg.output_dir + "/report.csv";
  dlu::write_file_atomic(json_path, dlu::report_to_json(report));
  dlu::write_file_atomic(csv_path, dlu::report_to_csv(report));
  std::cout << "evaluated " << report.num_instances << " instances -> "
            << json_path << ", " << csv_path << "\n";
  return 0;
}

int cmd_report(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in) throw dlu::ConfigError("cannot open report file: " + report_path);
  json j;
  in >> j;
  std::cout << "instances:  " << j.at("num_instances").get<int>() << "\n";
  for (const auto& [k, v] : j.at("recall_at").items())
    std::cout << "recall@" << k << ":  " << v.get<double>() << "\n";
  std::cout << "bleu:       " << j.at("bleu").get<double>() << "\n"
            << "rouge-1:    " << j.at("rouge1_f").get<double>() << "\n"
            << "rouge-L:    " << j.at("rougeL_f").get<double>() << "\n"
            << "distinct-1: " << j.at("distinct1").get<double>() << "\n"
            << "distinct-2: " << j.at("distinct2").get<double>() << "\n"
            << "perplexity: " << j.at("perplexity").get<double>() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discourse-token dialogue retrieval pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "Run configuration file");
  app.add_option("--set", overrides, "Override config values (key=value)");

  auto* gen = app.add_subcommand("gen-synthetic", "Generate a synthetic corpus");
  std::string gen_out;
  int gen_dialogues = 200;
  std::uint64_t gen_seed = 7;
  gen->add_option("--out", gen_out, "Output corpus path");
  gen->add_option("--dialogues", gen_dialogues, "Number of dialogues");
  gen->add_option("--gen-seed", gen_seed, "Generator seed");

  auto* ingest = app.add_subcommand("ingest", "Corpus -> retrieval instances");

  auto* extract =
      app.add_subcommand("extract-discourse", "Dump discourse tokens for one instance");
  std::string ex_instances;
  int ex_id = 0;
  extract->add_option("--instances", ex_instances, "Instances file")->required();
  extract->add_option("--id", ex_id, "Instance id")->required();

  auto* train = app.add_subcommand("train-dcca", "Train and dump one DCCA model");
  std::string tr_instances;
  int tr_id = 0;
  train->add_option("--instances", tr_instances, "Instances file")->required();
  train->add_option("--id", tr_id, "Instance id")->required();

  auto* rank_cmd = app.add_subcommand("rank", "Rank candidates for every instance");
  std::string rk_instances;
  rank_cmd->add_option("--instances", rk_instances, "Instances file")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "Compute the metric report");
  std::string ev_rankings, ev_instances;
  eval_cmd->add_option("--rankings", ev_rankings, "Rankings file")->required();
  eval_cmd->add_option("--instances", ev_instances, "Instances file")->required();

  auto* report_cmd = app.add_subcommand("report", "Pretty-print a report");
  std::string rp_path;
  report_cmd->add_option("--report", rp_path, "Report JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const dlu::RunConfig cfg = load_config(config_path, overrides);
    if (gen->parsed()) return cmd_gen_synthetic(cfg, gen_out, gen_dialogues, gen_seed);
    if (ingest->parsed()) return cmd_ingest(cfg);
    if (extract->parsed()) return cmd_extract_discourse(cfg, ex_instances, ex_id);
    if (train->parsed()) return cmd_train_dcca(cfg, tr_instances, tr_id);
    if (rank_cmd->parsed()) return cmd_rank(cfg, rk_instances);
    if (eval_cmd->parsed()) return cmd_evaluate(cfg, ev_rankings, ev_instances);
    if (report_cmd->parsed()) return cmd_report(rp_path);
  } catch (const dlu::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
