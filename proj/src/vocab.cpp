#include "lafusion/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::string Corpus::characters() const {
  std::array<bool, 256> seen{};
  for (const auto& s : sentences)
    for (const auto& w : s)
      for (char c : w) seen[static_cast<unsigned char>(c)] = true;
  std::string out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<char>(i));
  return out;
}

Sentence tokenize_line(std::string_view text) {
  Sentence out;
  std::string token;
  for (char c : text) {
    if (is_space(c)) {
      if (!token.empty()) out.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
  return out;
}

Corpus corpus_from_lines(std::span<const std::string> lines) {
  Corpus corpus;
  for (const auto& line : lines) {
    Sentence s = tokenize_line(line);
    if (!s.empty()) corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    Sentence s = tokenize_line(line);
    if (!s.empty()) corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

std::vector<Label> to_char_labels(std::span<const std::string> words, const LabelSet& labels) {
  std::vector<Label> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].empty()) throw DataError("empty word in label conversion");
    if (i > 0) out.push_back(labels.space());
    for (char c : words[i]) {
      auto id = labels.char_label(c);
      if (!id) throw DataError("character '" + std::string(1, c) + "' of word '" + words[i] + "' is not a label");
      out.push_back(*id);
    }
  }
  return out;
}

Sentence split_words(std::span<const Label> labels, const LabelSet& label_set) {
  Sentence out;
  std::string word;
  for (Label l : labels) {
    if (l == label_set.eos()) continue;
    if (l == label_set.space()) {
      if (!word.empty()) out.push_back(std::move(word));
      word.clear();
    } else {
      word.push_back(label_set.character(l));
    }
  }
  if (!word.empty()) out.push_back(std::move(word));
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> words, LabelSet labels)
    : words_(std::move(words)), labels_(std::move(labels)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const std::string& w = words_[i];
    if (w.empty() || w == kUnkWord || w == kEosWord || std::any_of(w.begin(), w.end(), is_space))
      throw DataError("invalid vocabulary word '" + w + "'");
    index_.emplace(w, static_cast<WordId>(i));
  }
}

std::vector<std::string> Vocabulary::token_names() const {
  std::vector<std::string> names = words_;
  names.emplace_back(kUnkWord);
  names.emplace_back(kEosWord);
  return names;
}

WordId Vocabulary::lookup(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? unk_id() : it->second;
}

Vocabulary build_vocab(const Corpus& corpus, std::size_t max_size) {
  if (corpus.empty()) throw DataError("empty corpus");
  if (max_size < 1) throw UsageError("vocabulary size must be at least 1");

  std::map<std::string, std::size_t> counts;
  for (const auto& s : corpus.sentences)
    for (const auto& w : s) ++counts[w];

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size) ranked.resize(max_size);

  std::vector<std::string> words;
  words.reserve(ranked.size());
  for (auto& [w, n] : ranked) words.push_back(w);
  return Vocabulary(std::move(words), LabelSet::from_characters(corpus.characters()));
}

Vocabulary load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path.string());
  std::vector<std::string> words;
  std::string chars;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Sentence tokens = tokenize_line(line);
    if (tokens.empty()) continue;
    if (tokens.size() > 1) throw ParseError(path.string(), line_no, "expected one word per line");
    if (tokens[0] == "<unk>" || tokens[0] == kEosWord) continue;
    chars += tokens[0];
    words.push_back(std::move(tokens[0]));
  }
  if (words.empty()) throw DataError("vocabulary " + path.string() + " has no words");
  return Vocabulary(std::move(words), LabelSet::from_characters(chars));
}

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& w : vocab.words()) out << w << '\n';
}

}  // namespace lafusion
