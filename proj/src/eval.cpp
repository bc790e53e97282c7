#include "dlu/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "dlu/embedding.hpp"
#include "dlu/errors.hpp"

namespace dlu {

namespace {

using nlohmann::json;

const std::string kStart = "<s>";
const std::string kEnd = "</s>";
const std::string kUnk = "<unk>";

std::map<std::vector<std::string>, long> ngram_counts(
    const std::vector<std::string>& tokens, int n) {
  std::map<std::vector<std::string>, long> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double f1(double overlap, double cand_len, double ref_len) {
  if (overlap <= 0.0 || cand_len <= 0.0 || ref_len <= 0.0) return 0.0;
  const double p = overlap / cand_len;
  const double r = overlap / ref_len;
  return 2.0 * p * r / (p + r);
}

}  // namespace

double recall_at_k(const std::vector<RankingRecord>& rankings, int k) {
  if (rankings.empty()) return 0.0;
  std::size_t hits = 0;
  for (const RankingRecord& r : rankings) {
    const auto end = r.order.begin() +
                     std::min<std::size_t>(static_cast<std::size_t>(k), r.order.size());
    if (std::find(r.order.begin(), end, r.truth_id) != end) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::string>& reference) {
  if (candidate.empty()) return 0.0;
  if (candidate == reference) return 1.0;

  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    long matches = 0;
    long total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matches += std::min(count, it->second);
    }
    // add-one smoothing on each n-gram precision
    log_sum += std::log(static_cast<double>(matches + 1) /
                        static_cast<double>(total + 1));
  }
  double score = std::exp(log_sum / 4.0);
  if (candidate.size() < reference.size()) {
    score *= std::exp(1.0 - static_cast<double>(reference.size()) /
                                static_cast<double>(candidate.size()));
  }
  return score;
}

double rouge1(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference) {
  const auto cand = ngram_counts(candidate, 1);
  const auto ref = ngram_counts(reference, 1);
  long overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  return f1(static_cast<double>(overlap), static_cast<double>(candidate.size()),
            static_cast<double>(reference.size()));
}

double rougeL(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference) {
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  return f1(lcs, static_cast<double>(candidate.size()),
            static_cast<double>(reference.size()));
}

double distinct_n(const std::vector<std::vector<std::string>>& responses, int n) {
  std::set<std::vector<std::string>> unique;
  long total = 0;
  for (const auto& tokens : responses) {
    for (const auto& [gram, count] : ngram_counts(tokens, n)) {
      unique.insert(gram);
      total += count;
    }
  }
  return total == 0 ? 0.0
                    : static_cast<double>(unique.size()) / static_cast<double>(total);
}

NgramLm train_lm(const std::vector<std::vector<std::string>>& references) {
  if (references.empty()) throw EmptyResponses();
  NgramLm lm;
  std::set<std::string> words;
  for (const auto& sentence : references) {
    std::string prev = kStart;
    for (const auto& w : sentence) {
      words.insert(w);
      ++lm.bigram_counts[{prev, w}];
      ++lm.unigram_counts[prev];
      prev = w;
    }
    ++lm.bigram_counts[{prev, kEnd}];
    ++lm.unigram_counts[prev];
  }
  lm.vocab_size = static_cast<long>(words.size()) + 2;  // + UNK + </s>
  return lm;
}

double perplexity(const NgramLm& lm,
                  const std::vector<std::vector<std::string>>& responses) {
  if (responses.empty()) throw EmptyResponses();
  // every training word occurs as a bigram context, so the context-count map
  // doubles as the vocabulary
  auto map_word = [&](const std::string& w) {
    return lm.unigram_counts.count(w) != 0 ? w : kUnk;
  };

  double log_sum = 0.0;
  long predicted = 0;
  for (const auto& sentence : responses) {
    std::string prev = kStart;
    auto step = [&](const std::string& w) {
      long big = 0, ctx = 0;
      if (auto it = lm.bigram_counts.find({prev, w}); it != lm.bigram_counts.end())
        big = it->second;
      if (auto it = lm.unigram_counts.find(prev); it != lm.unigram_counts.end())
        ctx = it->second;
      const double p = static_cast<double>(big + 1) /
                       static_cast<double>(ctx + lm.vocab_size);
      log_sum += std::log(p);
      ++predicted;
      prev = w;
    };
    for (const auto& w : sentence) step(map_word(w));
    step(kEnd);
  }
  return std::exp(-log_sum / static_cast<double>(predicted));
}

EvalReport evaluate_run(const std::vector<RankingRecord>& rankings,
                        const std::vector<RetrievalInstance>& instances,
                        const std::vector<std::vector<std::string>>& lm_refs,
                        const std::vector<int>& ks) {
  std::unordered_map<int, const RetrievalInstance*> by_id;
  for (const RetrievalInstance& inst : instances) by_id[inst.id] = &inst;

  EvalReport report;
  report.num_instances = static_cast<int>(rankings.size());
  for (int k : ks) report.recall_at[k] = recall_at_k(rankings, k);

  std::vector<std::vector<std::string>> selections;
  double bleu_sum = 0.0, r1_sum = 0.0, rl_sum = 0.0;
  for (const RankingRecord& r : rankings) {
    auto it = by_id.find(r.id);
    if (it == by_id.end())
      throw ConfigError("ranking id " + std::to_string(r.id) +
                        " has no matching instance");
    const RetrievalInstance& inst = *it->second;
    if (r.order.empty()) throw ConfigError("empty ranking order");
    const auto top1 = tokenize(inst.candidates.at(r.order.front()));
    const auto truth = tokenize(inst.candidates.at(inst.truth_index));
    bleu_sum += bleu(top1, truth);
    r1_sum += rouge1(top1, truth);
    rl_sum += rougeL(top1, truth);
    selections.push_back(top1);
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, rankings.size()));
  report.bleu = bleu_sum / n;
  report.rouge1_f = r1_sum / n;
  report.rougeL_f = rl_sum / n;
  report.distinct1 = distinct_n(selections, 1);
  report.distinct2 = distinct_n(selections, 2);
  if (!lm_refs.empty() && !selections.empty()) {
    report.perplexity = perplexity(train_lm(lm_refs), selections);
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json recall = json::object();
  for (const auto& [k, v] : report.recall_at) recall[std::to_string(k)] = v;
  json j{{"schema_version", 1},
         {"recall_at", recall},
         {"bleu", report.bleu},
         {"rouge1_f", report.rouge1_f},
         {"rougeL_f", report.rougeL_f},
         {"distinct1", report.distinct1},
         {"distinct2", report.distinct2},
         {"perplexity", report.perplexity},
         {"num_instances", report.num_instances},
         {"config_echo", report.config_echo}};
  return j.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream header, row;
  header << "schema_version";
  row << 1;
  for (const auto& [k, v] : report.recall_at) {  // std::map: ascending k
    header << ",recall_at_" << k;
    row << ',' << v * 100.0;
  }
  header << ",bleu,rouge1_f,rougeL_f,distinct1,distinct2,perplexity,num_instances";
  row << ',' << report.bleu << ',' << report.rouge1_f << ',' << report.rougeL_f << ','
      << report.distinct1 << ',' << report.distinct2 << ',' << report.perplexity << ','
      << report.num_instances;
  return header.str() + "\n" + row.str() + "\n";
}

}  // namespace dlu
