#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lafusion/ctc.hpp"
#include "lafusion/vocab.hpp"

namespace lafusion {

// Small wrapper over mt19937_64 whose derived draws do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct SynthOptions {
  std::size_t frames_per_label = 2;
  double peak = 0.9;
  std::uint64_t seed = 0;
  // Fraction of label segments whose peak is moved to a random wrong label;
  // the true label then keeps most of the remaining mass.
  double confusion_rate = 0.0;
};

// Posteriors whose frames peak on the characters of `transcript`. Columns are
// <blank> followed by the labels of `labels` other than <eos>. A blank-peaked
// frame separates repeated labels so the transcript survives CTC collapsing.
PosteriorMatrix synth_posteriors(const Sentence& transcript, const LabelSet& labels, const SynthOptions& options);

// `count` distinct lowercase pseudo-words.
std::vector<std::string> synth_words(std::size_t count, std::uint64_t seed);

// Sentences from a sparse first-order word process with Zipf-distributed
// word frequencies, so a word n-gram trained on its output is informative.
class SyntheticLanguage {
 public:
  SyntheticLanguage(std::vector<std::string> words, std::uint64_t seed, std::size_t successors = 8);

  Sentence sentence(Rng& rng) const;
  Corpus corpus(std::size_t sentences, std::uint64_t seed) const;
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::size_t zipf(Rng& rng) const;

  std::vector<std::string> words_;
  std::vector<double> zipf_cdf_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<double> successor_cdf_;
};

}  // namespace lafusion
