#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "lafusion/ngram.hpp"
#include "lafusion/scorer.hpp"
#include "lafusion/trie.hpp"
#include "lafusion/vocab.hpp"

namespace lafusion {

struct FusionConfig {
  double oov_scale_multilevel = 1.0;  // scales p(<UNK>) at OOV word ends, multi-level
  double oov_scale_lookahead = 1.0;   // scales p(<UNK>) when leaving the tree, look-ahead

  void validate() const;
};

// Plain character LM: p(c | character history).
class CharLmScorer final : public LabelScorer {
 public:
  explicit CharLmScorer(std::shared_ptr<const NGramModel> char_lm);

  std::string name() const override { return "char"; }
  const LabelSet& labels() const override { return labels_; }
  ScorerState initial() const override { return {}; }
  double score(const ScorerState& state, Label c) const override;
  ScorerState advance(const ScorerState& state, Label c) const override;
  double final_score(const ScorerState& state) const override;
  bool bounded() const override { return true; }

 private:
  std::shared_ptr<const NGramModel> lm_;
  LabelSet labels_;
};

// Character LM inside words; at each word end the accumulated character
// probability of a known word is swapped for its word-LM probability, and an
// unknown word is charged p(<UNK>) times the OOV scale.
class MultiLevelScorer final : public LabelScorer {
 public:
  MultiLevelScorer(std::shared_ptr<const NGramModel> char_lm, std::shared_ptr<const NGramModel> word_lm,
                   std::shared_ptr<const Vocabulary> vocab, FusionConfig config = {});

  std::string name() const override { return "multilevel"; }
  const LabelSet& labels() const override { return labels_; }
  ScorerState initial() const override { return {}; }
  double score(const ScorerState& state, Label c) const override;
  ScorerState advance(const ScorerState& state, Label c) const override;
  double final_score(const ScorerState& state) const override;
  // Word-end ratios can exceed one.
  bool bounded() const override { return false; }

 private:
  double word_end_score(const ScorerState& state, WordId word) const;
  void push_word(std::vector<WordId>& history, WordId word) const;

  std::shared_ptr<const NGramModel> char_lm_;
  std::shared_ptr<const NGramModel> word_lm_;
  std::shared_ptr<const Vocabulary> vocab_;
  FusionConfig config_;
  LabelSet labels_;
};

// Word-LM probability mass of every word below `node`, read off the running
// sums of the word distribution.
double lookahead_prob(const PrefixTree& tree, NodeId node, const CumSumArray& cumsum);

// Bounded cache of word-distribution running sums keyed by (truncated) word
// history. Safe for concurrent use; entries are shared with live states.
class CumSumCache {
 public:
  CumSumCache(std::shared_ptr<const NGramModel> word_lm, std::size_t capacity);

  std::shared_ptr<const CumSumArray> get(std::span<const WordId> history) const;
  void clear() const;

  std::size_t hits() const;
  std::size_t misses() const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::span<const WordId> s) const;
    std::size_t operator()(const std::vector<WordId>& v) const { return (*this)(std::span<const WordId>(v)); }
  };
  struct Equal {
    using is_transparent = void;
    template <class A, class B>
    bool operator()(const A& a, const B& b) const {
      return std::equal(a.begin(), a.end(), b.begin(), b.end());
    }
  };

  std::shared_ptr<const NGramModel> lm_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::vector<WordId>, std::shared_ptr<const CumSumArray>, Hash, Equal> entries_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

// Word LM only: characters are scored by ratios of look-ahead probabilities
// along the prefix tree.
class LookaheadScorer final : public LabelScorer {
 public:
  LookaheadScorer(std::shared_ptr<const NGramModel> word_lm, std::shared_ptr<const Vocabulary> vocab,
                  LabelSet labels, FusionConfig config = {}, std::size_t cache_capacity = 256);

  std::string name() const override { return "lookahead"; }
  const LabelSet& labels() const override { return labels_; }
  ScorerState initial() const override;
  double score(const ScorerState& state, Label c) const override;
  ScorerState advance(const ScorerState& state, Label c) const override;
  double final_score(const ScorerState& state) const override;
  bool bounded() const override { return config_.oov_scale_lookahead <= 1.0; }

  // Root state after the committed words `history`.
  ScorerState root_state(std::vector<WordId> history) const;

  const PrefixTree& tree() const { return tree_; }
  const CumSumCache& cache() const { return cache_; }

 private:
  void push_word(std::vector<WordId>& history, WordId word) const;

  std::shared_ptr<const NGramModel> word_lm_;
  std::shared_ptr<const Vocabulary> vocab_;
  LabelSet labels_;
  FusionConfig config_;
  PrefixTree tree_;
  CumSumCache cache_;
};

}  // namespace lafusion
