#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace dlu {

using Token = std::string;

// g x p matrix of token embeddings for one conversational turn.
// Row i is the embedding of tokens[i]; every entry is finite.
struct UtteranceMatrix {
  std::vector<Token> tokens;
  Eigen::MatrixXd rows;  // g x p

  int token_count() const { return static_cast<int>(rows.rows()); }
  int dim_p() const { return static_cast<int>(rows.cols()); }
};

// Produces unit-norm p-vectors for tokens. Two kinds:
//   hashed-random: derived from hash(token) ^ seed, hermetic and seeded
//   file-backed:   word-vector text file, OOV falls back to hashed seed 0
class EmbeddingProvider {
 public:
  enum class Kind { HashedRandom, FileBacked };

  static EmbeddingProvider hashed_random(int dim_p, std::uint64_t seed);
  static EmbeddingProvider from_file(const std::string& path);

  Eigen::VectorXd vector_for(const Token& token) const;

  Kind kind() const { return kind_; }
  int dim_p() const { return dim_p_; }
  std::uint64_t seed() const { return seed_; }

 private:
  EmbeddingProvider(Kind kind, int dim_p, std::uint64_t seed)
      : kind_(kind), dim_p_(dim_p), seed_(seed) {}

  Kind kind_;
  int dim_p_;
  std::uint64_t seed_;
  std::unordered_map<Token, Eigen::VectorXd> vocabulary_;
};

// Lowercases, splits on whitespace, and peels leading/trailing punctuation
// into separate tokens. Internal punctuation ("apt-get") is kept intact.
std::vector<Token> tokenize(const std::string& text);

UtteranceMatrix embed_utterance(const EmbeddingProvider& provider,
                                const std::vector<Token>& tokens);

// Arithmetic mean of the rows.
Eigen::VectorXd mean_pool(const UtteranceMatrix& m);

}  // namespace dlu
