#include "dlu/data.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "dlu/errors.hpp"
#include "dlu/rng.hpp"

namespace dlu {

namespace {

using nlohmann::json;

std::string normalize_ws(const std::string& s) {
  std::string out;
  bool in_space = true;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string strip_marker(std::string s, const std::string& marker) {
  std::size_t pos;
  while ((pos = s.find(marker)) != std::string::npos) s.erase(pos, marker.size());
  return s;
}

std::vector<std::string> split_context(const std::string& cell) {
  std::vector<std::string> turns;
  std::size_t start = 0;
  const std::string eot = "__eot__";
  while (true) {
    const std::size_t pos = cell.find(eot, start);
    const std::string piece =
        pos == std::string::npos ? cell.substr(start) : cell.substr(start, pos - start);
    const std::string turn = normalize_ws(strip_marker(piece, "__eou__"));
    if (!turn.empty()) turns.push_back(turn);
    if (pos == std::string::npos) break;
    start = pos + eot.size();
  }
  return turns;
}

// Minimal CSV row parser with double-quote escaping.
std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::vector<Dialogue> load_csv(std::istream& in) {
  std::vector<Dialogue> dialogues;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  int next_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_ws(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;  // header: context,response,flag
    }
    const auto fields = parse_csv_row(line);
    if (fields.size() != 3)
      throw ParseError(line_no, "expected 3 columns, got " +
                                    std::to_string(fields.size()));
    int flag;
    try {
      flag = std::stoi(fields[2]);
    } catch (const std::exception&) {
      throw ParseError(line_no, "flag is not an integer: '" + fields[2] + "'");
    }
    if (flag != 1) continue;  // only true (context, response) pairs form dialogues
    Dialogue d;
    d.id = next_id;
    d.turns = split_context(fields[0]);
    const std::string response = normalize_ws(strip_marker(
        strip_marker(fields[1], "__eou__"), "__eot__"));
    if (!response.empty()) d.turns.push_back(response);
    if (d.turns.size() < 2)
      throw ParseError(line_no, "dialogue has fewer than 2 turns");
    if (d.turns.size() < 3)
      std::cerr << "warning: line " << line_no << ": dialogue has "
                << d.turns.size() << " turns (corpus minimum is 3)\n";
    ++next_id;
    dialogues.push_back(std::move(d));
  }
  if (dialogues.empty()) throw EmptyCorpus();
  return dialogues;
}

std::vector<Dialogue> load_text(std::istream& in) {
  std::vector<Dialogue> dialogues;
  std::string line;
  std::size_t line_no = 0;
  int next_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (normalize_ws(line).empty()) continue;
    Dialogue d;
    d.id = next_id;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find('\t', start);
      const std::string piece =
          pos == std::string::npos ? line.substr(start) : line.substr(start, pos - start);
      const std::string turn = normalize_ws(piece);
      if (!turn.empty()) d.turns.push_back(turn);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (d.turns.size() < 2)
      throw ParseError(line_no, "dialogue has fewer than 2 turns");
    if (d.turns.size() < 3)
      std::cerr << "warning: line " << line_no << ": dialogue has "
                << d.turns.size() << " turns (corpus minimum is 3)\n";
    ++next_id;
    dialogues.push_back(std::move(d));
  }
  if (dialogues.empty()) throw EmptyCorpus();
  return dialogues;
}

}  // namespace

std::vector<Dialogue> load_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::Csv ? load_csv(in) : load_text(in);
}

std::vector<Dialogue> load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file: " + path);
  return load_corpus(in, format);
}

std::string dialogues_to_text(const std::vector<Dialogue>& dialogues) {
  std::string out;
  for (const Dialogue& d : dialogues) {
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      if (i) out.push_back('\t');
      out += d.turns[i];
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<Triple> make_triples(const std::vector<Dialogue>& dialogues,
                                 int negatives_per_positive, std::uint64_t seed) {
  if (dialogues.size() < 2)
    throw NotEnoughDialogues("need >= 2 dialogues for negative sampling");
  if (negatives_per_positive > static_cast<int>(dialogues.size()) - 1)
    throw NotEnoughDialogues("not enough dialogues for requested negatives");

  Rng rng(seed);
  std::vector<Triple> triples;
  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    const Dialogue& d = dialogues[i];
    Triple pos;
    pos.context.assign(d.turns.begin(), d.turns.end() - 1);
    pos.response = d.turns.back();
    pos.flag = 1;
    triples.push_back(pos);

    std::unordered_set<std::size_t> used;
    for (int neg = 0; neg < negatives_per_positive; ++neg) {
      std::size_t j;
      do {
        j = rng.below(dialogues.size());
      } while (j == i || used.count(j));
      used.insert(j);
      Triple t;
      t.context = pos.context;
      t.response = dialogues[j].turns.back();
      t.flag = 0;
      triples.push_back(std::move(t));
    }
  }
  return triples;
}

std::vector<RetrievalInstance> make_instances(const std::vector<Dialogue>& dialogues,
                                              int num_candidates, std::uint64_t seed) {
  if (num_candidates < 2) throw ConfigError("num_candidates must be >= 2");
  if (dialogues.size() < static_cast<std::size_t>(num_candidates))
    throw NotEnoughDialogues("not enough dialogues for requested candidate count");

  Rng rng(seed);
  std::vector<RetrievalInstance> instances;
  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    const Dialogue& d = dialogues[i];
    RetrievalInstance inst;
    inst.id = d.id;
    inst.context.assign(d.turns.begin(), d.turns.end() - 1);
    const std::string& truth = d.turns.back();

    std::vector<std::string> distractors;
    std::unordered_set<std::string> seen{truth};
    std::unordered_set<std::size_t> used;
    std::size_t attempts = 0;
    const std::size_t max_attempts = dialogues.size() * 20;
    while (distractors.size() + 1 < static_cast<std::size_t>(num_candidates)) {
      if (++attempts > max_attempts)
        throw NotEnoughDialogues("could not find enough distinct distractors");
      const std::size_t j = rng.below(dialogues.size());
      if (j == i || used.count(j)) continue;
      const std::string& cand = dialogues[j].turns.back();
      used.insert(j);
      if (seen.count(cand)) continue;
      seen.insert(cand);
      distractors.push_back(cand);
    }

    inst.truth_index = static_cast<int>(rng.below(static_cast<std::size_t>(num_candidates)));
    inst.candidates = distractors;
    inst.candidates.insert(inst.candidates.begin() + inst.truth_index, truth);
    instances.push_back(std::move(inst));
  }
  return instances;
}

std::string instances_to_jsonl(const std::vector<RetrievalInstance>& instances) {
  std::string out;
  for (const RetrievalInstance& inst : instances) {
    json j{{"id", inst.id},
           {"context", inst.context},
           {"candidates", inst.candidates},
           {"truth_index", inst.truth_index}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<RetrievalInstance> instances_from_jsonl(std::istream& in) {
  std::vector<RetrievalInstance> instances;
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
    RetrievalInstance inst;
    inst.id = j.at("id").get<int>();
    inst.context = j.at("context").get<std::vector<std::string>>();
    inst.candidates = j.at("candidates").get<std::vector<std::string>>();
    inst.truth_index = j.at("truth_index").get<int>();
    instances.push_back(std::move(inst));
  }
  return instances;
}

std::string triples_to_jsonl(const std::vector<Triple>& triples) {
  std::string out;
  for (const Triple& t : triples) {
    json j{{"context", t.context}, {"response", t.response}, {"flag", t.flag}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace dlu
