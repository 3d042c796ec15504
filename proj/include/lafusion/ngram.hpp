#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lafusion/vocab.hpp"

namespace lafusion {

using Token = std::int32_t;

enum class LmLevel { word, character };

std::string_view to_string(LmLevel level);
LmLevel parse_lm_level(std::string_view text);

// Running sums of a next-token distribution: values[0] = 0 and
// values[i] = sum of p(k) for k < i. The mass of ids [lo, hi] is
// values[hi + 1] - values[lo].
struct CumSumArray {
  std::vector<double> values;

  double mass(std::int32_t lo, std::int32_t hi) const {
    return values[static_cast<std::size_t>(hi) + 1] - values[static_cast<std::size_t>(lo)];
  }
  double prob(std::int32_t token) const { return mass(token, token); }
};

CumSumArray cumulative_sums(std::span<const double> dist);

// Witten-Bell interpolated n-gram over a closed token inventory, bottoming
// out in the uniform distribution. Every probability is positive and every
// conditional distribution sums to one.
//
// Contexts are not padded at sentence starts: the first token of a sentence
// is predicted from the empty context.
class NGramModel {
 public:
  NGramModel(LmLevel level, int order, std::vector<std::string> token_names,
             std::span<const std::vector<Token>> sequences);

  LmLevel level() const { return level_; }
  int order() const { return order_; }
  std::size_t token_count() const { return names_.size(); }
  const std::vector<std::string>& token_names() const { return names_; }

  // Context is truncated to its last order-1 tokens.
  double prob(Token token, std::span<const Token> context) const;
  std::vector<double> full_distribution(std::span<const Token> context) const;
  CumSumArray cumulative_distribution(std::span<const Token> context) const;

  // Number of tokens (including sentence ends) the model was trained on.
  std::uint64_t training_tokens() const { return training_tokens_; }

  void save(const std::filesystem::path& path) const;
  static NGramModel load(const std::filesystem::path& path);

 private:
  struct ContextStats {
    std::vector<Token> tokens;  // ascending
    std::vector<std::uint32_t> counts;
    std::uint64_t total = 0;

    std::uint32_t count(Token t) const;
  };

  struct SpanHash {
    using is_transparent = void;
    std::size_t operator()(std::span<const Token> s) const;
    std::size_t operator()(const std::vector<Token>& v) const { return (*this)(std::span<const Token>(v)); }
  };
  struct SpanEqual {
    using is_transparent = void;
    template <class A, class B>
    bool operator()(const A& a, const B& b) const {
      return std::equal(a.begin(), a.end(), b.begin(), b.end());
    }
  };
  using Table = std::unordered_map<std::vector<Token>, ContextStats, SpanHash, SpanEqual>;

  NGramModel(LmLevel level, int order, std::vector<std::string> token_names);
  void add_count(std::span<const Token> context, Token token, std::uint32_t n);
  void finalize();
  std::span<const Token> truncate(std::span<const Token> context) const;
  const ContextStats* stats(std::span<const Token> context) const;
  void check_token(Token t) const;

  LmLevel level_;
  int order_;
  std::vector<std::string> names_;
  std::vector<Table> tables_;  // indexed by context length
  std::vector<double> unigram_;
  std::uint64_t training_tokens_ = 0;
};

NGramModel train_word_ngram(const Corpus& corpus, int order, const Vocabulary& vocab);
NGramModel train_char_ngram(const Corpus& corpus, int order, const LabelSet& labels);

}  // namespace lafusion
