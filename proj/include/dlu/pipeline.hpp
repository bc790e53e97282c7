#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dlu/data.hpp"
#include "dlu/discourse.hpp"
#include "dlu/eval.hpp"
#include "dlu/retrieval.hpp"

namespace dlu {

// Declarative run configuration; file format is `key = value` lines with
// `#` comments, overridable via --set key=value.
struct RunConfig {
  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::Text;

  std::string embedding_kind = "hashed-random";  // or "file-backed"
  int embedding_dim = 64;
  std::uint64_t embedding_seed = 1;
  std::string embedding_file;

  DiscourseMode mode = DiscourseMode::LinearCca;
  double reg_r = 1e-4;
  double eig_floor = 1e-10;
  double dedup_tau = 0.99;

  double learning_rate = 1e-2;
  int max_iters = 500;
  double tol = 1e-7;
  std::vector<int> hidden_widths{16};

  int num_candidates = 10;
  std::vector<int> ks{1, 3, 5, 10};
  int negatives = 1;
  int max_context_turns = 0;  // 0 = no truncation

  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key_equals_value);
// Throws ConfigError on bad values or missing referenced paths.
void validate_config(const RunConfig& cfg, bool require_corpus);
// Canonical key=value form, used as config_echo in reports.
std::string config_to_text(const RunConfig& cfg);

EmbeddingProvider make_provider(const RunConfig& cfg);
DiscourseConfig make_discourse_config(const RunConfig& cfg);

struct RankResult {
  int id = 0;
  std::vector<int> order;  // candidate indices, best first
  std::vector<double> scores;
};

// Embeds the context, folds it into a discourse state, and ranks the
// candidates of one instance.
RankResult rank_instance(const RetrievalInstance& inst, const RunConfig& cfg,
                         const EmbeddingProvider& provider);

std::string rankings_to_jsonl(const std::vector<RankResult>& results);
std::vector<RankResult> rankings_from_jsonl(std::istream& in);

// Pairs rankings with instances (by id) and computes the full report; the
// LM is trained on the instances' true responses.
EvalReport evaluate_pipeline(const std::vector<RankResult>& rankings,
                             const std::vector<RetrievalInstance>& instances,
                             const RunConfig& cfg);

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dlu
