#pragma once

#include <map>
#include <string>
#include <vector>

#include "dlu/data.hpp"

namespace dlu {

struct RankingRecord {
  int id = 0;
  std::vector<int> order;  // candidate indices, best first
  int truth_id = 0;        // index of the true candidate
};

struct EvalReport {
  std::map<int, double> recall_at;  // k -> rate in [0, 1]
  double bleu = 0.0;
  double rouge1_f = 0.0;
  double rougeL_f = 0.0;
  double distinct1 = 0.0;
  double distinct2 = 0.0;
  double perplexity = 1.0;
  int num_instances = 0;
  std::string config_echo;
};

// Bigram language model with add-one smoothing and sentence boundaries.
struct NgramLm {
  std::map<std::string, long> unigram_counts;              // includes <s>
  std::map<std::pair<std::string, std::string>, long> bigram_counts;
  long vocab_size = 0;  // distinct words + UNK + </s>
};

// Fraction of instances whose true candidate appears in the top k.
double recall_at_k(const std::vector<RankingRecord>& rankings, int k);

// Sentence BLEU, n = 1..4, add-one smoothed precisions, brevity penalty.
// Exact token equality yields exactly 1.0; an empty candidate yields 0.
double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::string>& reference);

double rouge1(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference);

double rougeL(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference);

// Unique n-grams over total n-grams across all responses; 0 when empty.
double distinct_n(const std::vector<std::vector<std::string>>& responses, int n);

NgramLm train_lm(const std::vector<std::vector<std::string>>& references);

// exp of the mean negative log-probability per predicted token
// (each word plus the end-of-sentence symbol).
double perplexity(const NgramLm& lm,
                  const std::vector<std::vector<std::string>>& responses);

EvalReport evaluate_run(const std::vector<RankingRecord>& rankings,
                        const std::vector<RetrievalInstance>& instances,
                        const std::vector<std::vector<std::string>>& lm_refs,
                        const std::vector<int>& ks);

std::string report_to_json(const EvalReport& report);
// Recall columns are formatted x100 in the CSV; ks emitted ascending.
std::string report_to_csv(const EvalReport& report);

}  // namespace dlu
