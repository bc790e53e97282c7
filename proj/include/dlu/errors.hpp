#pragma once

#include <stdexcept>
#include <string>

namespace dlu {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyUtterance : Error {
  EmptyUtterance() : Error("utterance has no tokens") {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct TooFewSamples : Error {
  explicit TooFewSamples(const std::string& what) : Error(what) {}
};

struct NotSymmetric : Error {
  NotSymmetric() : Error("matrix is not symmetric") {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& what) : Error(what) {}
};

struct SpecMismatch : Error {
  explicit SpecMismatch(const std::string& what) : Error(what) {}
};

struct NonFiniteLoss : Error {
  NonFiniteLoss() : Error("objective became non-finite (learning rate too high?)") {}
};

struct EmptyDiscourse : Error {
  EmptyDiscourse() : Error("discourse state has no tokens") {}
};

struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

struct EmptyCorpus : Error {
  EmptyCorpus() : Error("corpus contains no dialogues") {}
};

struct NotEnoughDialogues : Error {
  explicit NotEnoughDialogues(const std::string& what) : Error(what) {}
};

struct EmptyResponses : Error {
  EmptyResponses() : Error("no responses to evaluate") {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace dlu
