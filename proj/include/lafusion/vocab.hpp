#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lafusion/labels.hpp"

namespace lafusion {

using WordId = std::int32_t;
using Sentence = std::vector<std::string>;

inline constexpr std::string_view kUnkWord = "<UNK>";
inline constexpr std::string_view kEosWord = "<eos>";

// Lowercased, whitespace-free tokens; no empty sentences.
struct Corpus {
  std::vector<Sentence> sentences;

  bool empty() const { return sentences.empty(); }
  std::size_t token_count() const;
  // Every distinct byte appearing in any token.
  std::string characters() const;
};

// Lowercase, split on whitespace, drop empty tokens.
Sentence tokenize_line(std::string_view text);

Corpus corpus_from_lines(std::span<const std::string> lines);
Corpus read_corpus(const std::filesystem::path& path);

// Characters of each word with <space> between consecutive words.
// Throws DataError for characters missing from `labels` or empty words.
std::vector<Label> to_char_labels(std::span<const std::string> words, const LabelSet& labels);

// Inverse of to_char_labels: splits on <space>; <eos> labels are ignored.
Sentence split_words(std::span<const Label> labels, const LabelSet& label_set);

// Spelled words sorted ascending and numbered 0..N-1, then <UNK> = N and
// <eos> = N+1. A prefix-tree node therefore always covers one contiguous block
// of ids.
class Vocabulary {
 public:
  // `words` need not be sorted; duplicates are dropped.
  Vocabulary(std::vector<std::string> words, LabelSet labels);

  std::size_t spelled_count() const { return words_.size(); }
  // Spelled words plus <UNK> and <eos>.
  std::size_t token_count() const { return words_.size() + 2; }
  WordId unk_id() const { return static_cast<WordId>(words_.size()); }
  WordId eos_id() const { return static_cast<WordId>(words_.size() + 1); }

  const std::vector<std::string>& words() const { return words_; }
  const std::string& spelling(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  // Spellings plus "<UNK>" and "<eos>", indexed by token id.
  std::vector<std::string> token_names() const;

  // Id of a spelled word, or unk_id().
  WordId lookup(std::string_view word) const;
  bool contains(std::string_view word) const { return lookup(word) != unk_id(); }

  const LabelSet& labels() const { return labels_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> index_;
  LabelSet labels_;
};

// Keeps the `max_size` most frequent words (ties broken by spelling). The label
// set covers every character of the corpus, not only those of kept words, so
// out-of-vocabulary words remain spellable.
Vocabulary build_vocab(const Corpus& corpus, std::size_t max_size);

// One word per line; label set derived from the words' characters.
Vocabulary load_vocab(const std::filesystem::path& path);
void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path);

}  // namespace lafusion
