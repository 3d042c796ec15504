#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lafusion/ctc.hpp"
#include "lafusion/scorer.hpp"
#include "lafusion/vocab.hpp"

namespace lafusion {

struct DecodeConfig {
  double ctc_weight = 0.2;  // weight of the CTC score; the attention score gets 1 - ctc_weight
  double lm_weight = 1.0;
  std::size_t beam_width = 30;
  std::optional<std::size_t> max_len;  // defaults to the number of frames
  std::size_t n_best = 1;

  void validate() const;
};

// ctc_weight * ctc + (1 - ctc_weight) * att + lm_weight * lm. A term whose
// weight is zero contributes nothing, even when its score is -inf.
double combine_scores(double ctc, double att, double lm, const DecodeConfig& config);

// Hypotheses are spellings of word sequences: <space> never starts a
// hypothesis or follows another <space>, and <eos> never follows <space>.
bool allowed_extension(std::span<const Label> prefix, Label c, const LabelSet& labels);

struct ScoredHypothesis {
  std::vector<Label> labels;  // excludes the terminating <eos>
  Sentence words;
  double ctc_score = 0.0;
  double att_score = 0.0;
  double lm_score = 0.0;
  double score = 0.0;
  bool complete = false;
};

struct NBest {
  std::vector<ScoredHypothesis> hypotheses;  // best first
  // False when no hypothesis reached <eos>; `hypotheses` then holds the best
  // incomplete one.
  bool complete = true;
};

// Orders by descending score, then ascending label sequence.
bool better(const ScoredHypothesis& a, const ScoredHypothesis& b);

// Output-label synchronous beam search over CTC prefix scores, an optional
// attention-slot scorer and an optional LM fusion scorer. Either scorer may
// be null.
NBest decode(const PosteriorMatrix& posteriors, const LabelScorer* lm, const LabelScorer* att,
             const DecodeConfig& config);

}  // namespace lafusion
