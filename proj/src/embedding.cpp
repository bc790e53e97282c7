#include "dlu/embedding.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "dlu/errors.hpp"
#include "dlu/rng.hpp"

namespace dlu {

namespace {

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

Eigen::VectorXd hashed_vector(const Token& token, std::uint64_t seed, int dim_p) {
  const std::uint64_t key = hash64(token) ^ seed;
  Eigen::VectorXd v(dim_p);
  for (int i = 0; i < dim_p; ++i) {
    const std::uint64_t u = splitmix64(key + static_cast<std::uint64_t>(i));
    v[i] = 2.0 * (static_cast<double>(u >> 11) * 0x1.0p-53) - 1.0;
  }
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::istringstream iss(text);
  std::string raw;
  while (iss >> raw) {
    for (char& c : raw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    // peel leading punctuation
    std::size_t begin = 0;
    std::size_t end = raw.size();
    std::vector<Token> lead, trail;
    while (begin < end && is_punct(static_cast<unsigned char>(raw[begin]))) {
      lead.push_back(std::string(1, raw[begin]));
      ++begin;
    }
    while (end > begin && is_punct(static_cast<unsigned char>(raw[end - 1]))) {
      trail.push_back(std::string(1, raw[end - 1]));
      --end;
    }
    for (auto& t : lead) out.push_back(std::move(t));
    if (end > begin) out.push_back(raw.substr(begin, end - begin));
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) out.push_back(std::move(*it));
  }
  return out;
}

EmbeddingProvider EmbeddingProvider::hashed_random(int dim_p, std::uint64_t seed) {
  if (dim_p < 1) throw ConfigError("embedding dimension must be positive");
  return EmbeddingProvider(Kind::HashedRandom, dim_p, seed);
}

EmbeddingProvider EmbeddingProvider::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding file: " + path);

  std::string line;
  std::size_t line_no = 0;
  int dim_p = -1;
  std::unordered_map<Token, Eigen::VectorXd> vocab;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    if (first) {
      first = false;
      // optional "count dim" header
      std::istringstream probe(line);
      long long a, b;
      std::string extra;
      if ((probe >> a >> b) && !(probe >> extra)) continue;
    }
    std::string token;
    if (!(iss >> token)) throw ParseError(line_no, "missing token");
    std::vector<double> vals;
    double x;
    while (iss >> x) vals.push_back(x);
    if (vals.empty()) throw ParseError(line_no, "no vector values for token '" + token + "'");
    if (dim_p < 0) dim_p = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != dim_p)
      throw ParseError(line_no, "expected " + std::to_string(dim_p) + " values, got " +
                                    std::to_string(vals.size()));
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(vals.data(), dim_p);
    const double n = v.norm();
    if (!(n > 0.0) || !v.allFinite())
      throw ParseError(line_no, "degenerate vector for token '" + token + "'");
    vocab[token] = v / n;
  }
  if (dim_p < 0) throw ConfigError("embedding file has no vectors: " + path);
  EmbeddingProvider p(Kind::FileBacked, dim_p, 0);
  p.vocabulary_ = std::move(vocab);
  return p;
}

Eigen::VectorXd EmbeddingProvider::vector_for(const Token& token) const {
  if (kind_ == Kind::FileBacked) {
    auto it = vocabulary_.find(token);
    if (it != vocabulary_.end()) return it->second;
    return hashed_vector(token, 0, dim_p_);  // OOV fallback, seed 0
  }
  return hashed_vector(token, seed_, dim_p_);
}

UtteranceMatrix embed_utterance(const EmbeddingProvider& provider,
                                const std::vector<Token>& tokens) {
  if (tokens.empty()) throw EmptyUtterance();
  UtteranceMatrix m;
  m.tokens = tokens;
  m.rows.resize(static_cast<Eigen::Index>(tokens.size()), provider.dim_p());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    m.rows.row(static_cast<Eigen::Index>(i)) = provider.vector_for(tokens[i]).transpose();
  }
  return m;
}

Eigen::VectorXd mean_pool(const UtteranceMatrix& m) {
  return m.rows.colwise().mean().transpose();
}

}  // namespace dlu
