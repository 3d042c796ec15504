#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "lafusion/ctc.hpp"
#include "lafusion/decoder.hpp"
#include "lafusion/scorer.hpp"

namespace lafusion {

struct EvalUtterance {
  std::string id;
  PosteriorMatrix posteriors;
  Sentence reference;
};

struct Accuracy {
  double cer = 0.0;  // mean per-utterance character error rate
  double wer = 0.0;  // mean per-utterance word error rate
};

Accuracy evaluate(const std::vector<EvalUtterance>& utterances, const LabelScorer* lm, const DecodeConfig& config);

struct BenchConfiguration {
  std::string name;
  std::string strategy;  // none, char, multilevel or lookahead
  std::size_t vocab_size = 0;
  // Builds a fresh scorer for every timed run; empty for "none".
  std::function<std::unique_ptr<LabelScorer>()> make_scorer;
};

struct BenchRow {
  std::string name;
  std::string strategy;
  std::size_t vocab_size = 0;
  double seconds = 0.0;  // median over repetitions
  double ratio = 0.0;    // seconds / seconds of the "none" configuration
  double cer = 0.0;
  double wer = 0.0;
  std::vector<double> samples;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  const BenchRow& row(const std::string& name) const;
  // Median time a configuration adds over the "none" baseline.
  double added_seconds(const std::string& name) const;
  void write_tsv(std::ostream& out) const;
};

double median(std::vector<double> values);

// Decodes every utterance under every configuration `repetitions` times
// (configurations interleaved within a repetition) on the calling thread.
// Scorer construction is not timed.
BenchReport run_bench(const std::vector<EvalUtterance>& utterances, const std::vector<BenchConfiguration>& configs,
                      const DecodeConfig& decode_config, int repetitions);

}  // namespace lafusion
