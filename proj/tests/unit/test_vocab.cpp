#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "lafusion/error.hpp"
#include "lafusion/vocab.hpp"

using namespace lafusion;

namespace {

Corpus corpus_of(std::vector<std::string> lines) { return corpus_from_lines(lines); }

}  // namespace

TEST_CASE("tokenize_line folds case and collapses whitespace") {
  CHECK(tokenize_line("A Cat EATS") == Sentence{"a", "cat", "eats"});
  CHECK(tokenize_line("").empty());
  CHECK(tokenize_line("  a   cat ") == Sentence{"a", "cat"});
  CHECK(tokenize_line("a\tb\r\n") == Sentence{"a", "b"});
}

TEST_CASE("label set ordering and word-end labels") {
  const LabelSet labels = LabelSet::from_characters("tacse");
  CHECK(labels.size() == 7);
  CHECK(labels.name(labels.space()) == "<space>");
  CHECK(labels.name(labels.eos()) == "<eos>");
  CHECK(labels.is_word_end(labels.space()));
  CHECK(labels.is_word_end(labels.eos()));
  CHECK_FALSE(labels.is_word_end(labels.id("a")));
  CHECK(labels.character(labels.id("c")) == 'c');
  CHECK_FALSE(labels.char_label('z').has_value());
  CHECK_THROWS_AS(labels.id("z"), DataError);
  CHECK_THROWS_AS(LabelSet({"<blank>"}), DataError);
  CHECK_THROWS_AS(LabelSet({"ab"}), DataError);
  CHECK(LabelSet({"b", "a", "a"}) == LabelSet::from_characters("ab"));
}

TEST_CASE("to_char_labels spells words with spaces between them") {
  const LabelSet labels = LabelSet::from_characters("acets");
  const Sentence words{"a", "cat", "eats"};
  const auto ls = to_char_labels(words, labels);
  std::vector<std::string> names;
  for (Label l : ls) names.push_back(labels.name(l));
  CHECK(names == std::vector<std::string>{"a", "<space>", "c", "a", "t", "<space>", "e", "a", "t", "s"});
  CHECK(to_char_labels(Sentence{"a"}, labels).size() == 1);
  CHECK_THROWS_AS(to_char_labels(Sentence{"zebra"}, labels), DataError);
  CHECK_THROWS_AS(to_char_labels(Sentence{""}, labels), DataError);
}

TEST_CASE("split_words inverts to_char_labels") {
  Rng rng(7);
  const std::string alphabet = "abcdxyz";
  const LabelSet labels = LabelSet::from_characters(alphabet);
  for (int i = 0; i < 200; ++i) {
    Sentence words;
    const std::size_t n = rng.below(6);
    for (std::size_t k = 0; k < n; ++k) words.push_back(gen::random_word(rng, alphabet, 5));
    CHECK(split_words(to_char_labels(words, labels), labels) == words);
  }
}

TEST_CASE("build_vocab assigns alphabetical ids") {
  const Vocabulary v = build_vocab(corpus_of({"a cat eats"}), 10);
  CHECK(v.words() == std::vector<std::string>{"a", "cat", "eats"});
  CHECK(v.unk_id() == 3);
  CHECK(v.eos_id() == 4);
  CHECK(v.lookup("cat") == 1);
  CHECK(v.lookup("a") == 0);
  CHECK(v.lookup("zebra") == v.unk_id());
  CHECK(v.token_names() == std::vector<std::string>{"a", "cat", "eats", "<UNK>", "<eos>"});
  CHECK(v.labels() == LabelSet::from_characters("acets"));
}

TEST_CASE("build_vocab truncates by frequency then spelling") {
  const Vocabulary v = build_vocab(corpus_of({"a a b"}), 1);
  CHECK(v.words() == std::vector<std::string>{"a"});
  CHECK(v.unk_id() == 1);
  CHECK(v.eos_id() == 2);
  // Out-of-vocabulary words stay spellable.
  CHECK(v.labels().char_label('b').has_value());

  const Vocabulary tie = build_vocab(corpus_of({"d c b a", "c d"}), 1);
  CHECK(tie.words() == std::vector<std::string>{"c"});
  CHECK_THROWS_AS(build_vocab(Corpus{}, 10), DataError);
  CHECK_THROWS_WITH(build_vocab(Corpus{}, 10), doctest::Contains("empty corpus"));
}

TEST_CASE("vocabulary ids ascend with spelling") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Vocabulary v = gen::random_vocab(rng, 300, "abcde");
    for (std::size_t k = 1; k < v.spelled_count(); ++k) CHECK(v.words()[k - 1] < v.words()[k]);
    for (std::size_t k = 0; k < v.spelled_count(); ++k) CHECK(v.lookup(v.words()[k]) == static_cast<WordId>(k));
  }
}

TEST_CASE("vocabulary file round trip sorts on load") {
  const auto path = std::filesystem::temp_directory_path() / "lafusion_vocab_test.txt";
  {
    std::ofstream out(path);
    out << "eats\ncat\na\n\ncat\n";
  }
  const Vocabulary v = load_vocab(path);
  CHECK(v.words() == std::vector<std::string>{"a", "cat", "eats"});
  save_vocab(v, path);
  CHECK(load_vocab(path).words() == v.words());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_vocab(path), DataError);
}
