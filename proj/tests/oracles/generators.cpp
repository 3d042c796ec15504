#include "generators.hpp"

#include <cmath>
#include <set>

namespace gen {

using namespace lafusion;

std::shared_ptr<const NGramModel> uniform_model(LmLevel level, std::vector<std::string> names) {
  std::vector<Token> once(names.size());
  for (std::size_t i = 0; i < once.size(); ++i) once[i] = static_cast<Token>(i);
  const std::vector<std::vector<Token>> seqs{once};
  return std::make_shared<const NGramModel>(level, 1, std::move(names), seqs);
}

std::string random_word(Rng& rng, const std::string& alphabet, std::size_t max_len) {
  const std::size_t len = 1 + rng.below(max_len);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(alphabet[rng.below(alphabet.size())]);
  return w;
}

Vocabulary random_vocab(Rng& rng, std::size_t max_words, const std::string& alphabet, std::size_t max_len) {
  const std::size_t target = 1 + rng.below(max_words);
  std::set<std::string> words;
  for (std::size_t tries = 0; words.size() < target && tries < target * 20; ++tries)
    words.insert(random_word(rng, alphabet, max_len));
  return Vocabulary(std::vector<std::string>(words.begin(), words.end()), LabelSet::from_characters(alphabet));
}

Corpus random_corpus(Rng& rng, const Vocabulary& vocab, std::size_t sentences, const std::string& alphabet) {
  Corpus c;
  for (std::size_t s = 0; s < sentences; ++s) {
    Sentence words;
    const std::size_t len = 1 + rng.below(6);
    for (std::size_t i = 0; i < len; ++i) {
      if (rng.uniform() < 0.85)
        words.push_back(vocab.words()[rng.below(vocab.spelled_count())]);
      else
        words.push_back(random_word(rng, alphabet, 6));
    }
    c.sentences.push_back(std::move(words));
  }
  return c;
}

std::vector<WordId> random_history(Rng& rng, const Vocabulary& vocab, std::size_t length) {
  std::vector<WordId> h(length);
  for (auto& w : h) w = static_cast<WordId>(rng.below(vocab.token_count()));
  return h;
}

PosteriorMatrix random_posteriors(Rng& rng, std::size_t frames, std::vector<std::string> columns) {
  std::vector<double> values;
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> row(columns.size());
    double sum = 0.0;
    for (auto& v : row) {
      v = std::pow(rng.uniform(), 3.0) + 1e-3;
      sum += v;
    }
    for (auto& v : row) values.push_back(v / sum);
  }
  return PosteriorMatrix(std::move(columns), std::move(values));
}

}  // namespace gen
