#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lafusion/labels.hpp"
#include "lafusion/ngram.hpp"
#include "lafusion/trie.hpp"

namespace lafusion {

// Per-hypothesis state of a label scorer. Each strategy uses the subset of
// fields it needs; the rest stay empty. Values are small and are copied on
// every hypothesis expansion.
struct ScorerState {
  // Most recent committed words (truncated to the word model's order - 1).
  std::vector<WordId> word_history;
  // Characters emitted since the last word-end label.
  std::string pending_word;
  // Look-ahead position; kNoNode once the word has left the tree.
  NodeId node = kNoNode;
  // Most recent labels (truncated to the character model's order - 1).
  std::vector<Label> char_context;
  // Sum of character-model log probabilities over pending_word.
  double pending_char_logprob = 0.0;
  // Word distribution for word_history (look-ahead only).
  std::shared_ptr<const CumSumArray> cumsum;
};

// A left-to-right character scorer: the LM fusion strategies and the
// attention slot of the decoder all implement this. Scores are natural logs.
// All methods are pure functions of their arguments.
class LabelScorer {
 public:
  virtual ~LabelScorer() = default;

  virtual std::string name() const = 0;
  virtual const LabelSet& labels() const = 0;

  virtual ScorerState initial() const = 0;
  // Log score of appending `c` (never <eos>; see final_score).
  virtual double score(const ScorerState& state, Label c) const = 0;
  virtual ScorerState advance(const ScorerState& state, Label c) const = 0;
  // Log score of terminating the hypothesis with <eos>.
  virtual double final_score(const ScorerState& state) const = 0;

  // True when no score can be positive, so a hypothesis' score never grows
  // as it is extended.
  virtual bool bounded() const = 0;

  std::pair<double, ScorerState> step(const ScorerState& state, Label c) const {
    return {score(state, c), advance(state, c)};
  }
};

// Assigns probability one to every label.
class NullScorer final : public LabelScorer {
 public:
  explicit NullScorer(LabelSet labels) : labels_(std::move(labels)) {}

  std::string name() const override { return "null"; }
  const LabelSet& labels() const override { return labels_; }
  ScorerState initial() const override { return {}; }
  double score(const ScorerState&, Label) const override { return 0.0; }
  ScorerState advance(const ScorerState& s, Label) const override { return s; }
  double final_score(const ScorerState&) const override { return 0.0; }
  bool bounded() const override { return true; }

 private:
  LabelSet labels_;
};

}  // namespace lafusion
