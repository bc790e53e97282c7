#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dlu {

struct Dialogue {
  int id = 0;
  std::vector<std::string> turns;  // >= 2; the corpus convention is >= 3
};

// (context, response, flag) record; flag 1 marks the true next utterance.
struct Triple {
  std::vector<std::string> context;
  std::string response;
  int flag = 0;
};

struct RetrievalInstance {
  int id = 0;
  std::vector<std::string> context;
  std::vector<std::string> candidates;
  int truth_index = 0;
};

enum class CorpusFormat { Csv, Text };

// Csv: header context,response,flag; context turns separated by __eot__,
//      __eou__ markers stripped; flag-1 rows become dialogues.
// Text: one dialogue per line, turns separated by tabs.
std::vector<Dialogue> load_corpus(const std::string& path, CorpusFormat format);
std::vector<Dialogue> load_corpus(std::istream& in, CorpusFormat format);

// Plain-text form of load_corpus(Text); round-trips exactly.
std::string dialogues_to_text(const std::vector<Dialogue>& dialogues);

// One positive triple per dialogue plus m seeded negatives whose responses
// are final turns of other dialogues (no repeats within an instance).
std::vector<Triple> make_triples(const std::vector<Dialogue>& dialogues,
                                 int negatives_per_positive, std::uint64_t seed);

// One instance per dialogue with num_candidates options, the true response
// at a seeded random position and distinct distractors from other dialogues.
std::vector<RetrievalInstance> make_instances(const std::vector<Dialogue>& dialogues,
                                              int num_candidates, std::uint64_t seed);

std::string instances_to_jsonl(const std::vector<RetrievalInstance>& instances);
std::vector<RetrievalInstance> instances_from_jsonl(std::istream& in);

std::string triples_to_jsonl(const std::vector<Triple>& triples);

}  // namespace dlu
