#include "lafusion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

void spread(std::vector<double>& row, double mass, const std::vector<std::size_t>& targets, Rng& rng) {
  if (targets.empty() || mass <= 0.0) return;
  std::vector<double> w(targets.size());
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  for (std::size_t i = 0; i < targets.size(); ++i) row[targets[i]] += mass * w[i] / total;
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

PosteriorMatrix synth_posteriors(const Sentence& transcript, const LabelSet& labels, const SynthOptions& options) {
  std::vector<std::string> columns{std::string(kBlankLabel)};
  std::vector<std::size_t> column_of_label(labels.size(), 0);
  for (std::size_t l = 0; l < labels.size(); ++l) {
    if (static_cast<Label>(l) == labels.eos()) continue;
    column_of_label[l] = columns.size();
    columns.push_back(labels.name(static_cast<Label>(l)));
  }
  const std::size_t k = columns.size();
  if (options.frames_per_label < 1) throw UsageError("frames per label must be at least 1");
  if (!(options.peak > 1.0 / static_cast<double>(k) && options.peak <= 1.0))
    throw UsageError("peak must lie in (1/" + std::to_string(k) + ", 1]");
  if (!(options.confusion_rate >= 0.0 && options.confusion_rate <= 1.0))
    throw UsageError("confusion rate must lie in [0, 1]");

  const std::vector<Label> sequence = to_char_labels(transcript, labels);
  Rng rng(options.seed);
  const double rest = 1.0 - options.peak;
  std::vector<double> values;
  std::vector<double> row(k);
  std::vector<std::size_t> others;

  auto emit = [&](std::size_t peak_col, std::size_t second_col, double second_mass) {
    std::fill(row.begin(), row.end(), 0.0);
    row[peak_col] = options.peak;
    others.clear();
    for (std::size_t j = 0; j < k; ++j)
      if (j != peak_col && j != second_col) others.push_back(j);
    if (second_col != peak_col) row[second_col] = second_mass;
    spread(row, rest - (second_col != peak_col ? second_mass : 0.0), others, rng);
    values.insert(values.end(), row.begin(), row.end());
  };

  if (sequence.empty()) emit(0, 0, 0.0);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const std::size_t truth = column_of_label[static_cast<std::size_t>(sequence[i])];
    if (i > 0 && sequence[i] == sequence[i - 1]) emit(0, 0, 0.0);
    std::size_t peak_col = truth;
    if (options.confusion_rate > 0.0 && k > 2 && rng.uniform() < options.confusion_rate) {
      peak_col = 1 + rng.below(k - 2);  // any non-blank column except the truth
      if (peak_col >= truth) ++peak_col;
    }
    for (std::size_t f = 0; f < options.frames_per_label; ++f) {
      if (peak_col == truth)
        emit(truth, truth, 0.0);
      else
        emit(peak_col, truth, 0.8 * rest);
    }
  }
  return PosteriorMatrix(std::move(columns), std::move(values));
}

std::vector<std::string> synth_words(std::size_t count, std::uint64_t seed) {
  static constexpr std::string_view kConsonants = "bcdfghjklmnprstvwz";
  static constexpr std::string_view kVowels = "aeiouy";
  Rng rng(seed);
  std::unordered_set<std::string> seen;
  std::vector<std::string> words;
  words.reserve(count);
  while (words.size() < count) {
    const std::size_t len = 2 + rng.below(8);
    std::string w;
    bool vowel = rng.uniform() < 0.3;
    for (std::size_t i = 0; i < len; ++i) {
      w.push_back(vowel ? kVowels[rng.below(kVowels.size())] : kConsonants[rng.below(kConsonants.size())]);
      vowel = rng.uniform() < (vowel ? 0.15 : 0.8);
    }
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

SyntheticLanguage::SyntheticLanguage(std::vector<std::string> words, std::uint64_t seed, std::size_t successors)
    : words_(std::move(words)) {
  if (words_.empty()) throw UsageError("synthetic language needs at least one word");
  double acc = 0.0;
  for (std::size_t r = 0; r < words_.size(); ++r) {
    acc += 1.0 / static_cast<double>(r + 1);
    zipf_cdf_.push_back(acc);
  }
  acc = 0.0;
  for (std::size_t r = 0; r < successors; ++r) {
    acc += 1.0 / static_cast<double>(r + 1);
    successor_cdf_.push_back(acc);
  }
  Rng rng(seed);
  successors_.resize(words_.size());
  for (auto& s : successors_)
    for (std::size_t r = 0; r < successors; ++r) s.push_back(zipf(rng));
}

std::size_t SyntheticLanguage::zipf(Rng& rng) const { return sample_cdf(zipf_cdf_, rng.uniform()); }

Sentence SyntheticLanguage::sentence(Rng& rng) const {
  const std::size_t len = 3 + rng.below(6);
  Sentence out;
  std::size_t w = zipf(rng);
  out.push_back(words_[w]);
  while (out.size() < len) {
    if (!successor_cdf_.empty() && rng.uniform() < 0.75)
      w = successors_[w][sample_cdf(successor_cdf_, rng.uniform())];
    else
      w = zipf(rng);
    out.push_back(words_[w]);
  }
  return out;
}

Corpus SyntheticLanguage::corpus(std::size_t sentences, std::uint64_t seed) const {
  Rng rng(seed);
  Corpus c;
  c.sentences.reserve(sentences);
  for (std::size_t i = 0; i < sentences; ++i) c.sentences.push_back(sentence(rng));
  return c;
}

}  // namespace lafusion
