#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lafusion/error.hpp"
#include "lafusion/vocab.hpp"

namespace lafusion {

// Levenshtein distance with unit substitution, deletion and insertion costs.
template <class T>
std::size_t edit_distance(std::span<const T> hyp, std::span<const T> ref) {
  std::vector<std::size_t> prev(ref.size() + 1), cur(ref.size() + 1);
  for (std::size_t j = 0; j <= ref.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[ref.size()];
}

template <class T>
double edit_distance_rate(std::span<const T> hyp, std::span<const T> ref) {
  if (ref.empty()) throw DataError("error rate needs a non-empty reference");
  return static_cast<double>(edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

double word_error_rate(const Sentence& hyp, const Sentence& ref);
// Over the characters of the space-joined word sequences.
double char_error_rate(const Sentence& hyp, const Sentence& ref);

}  // namespace lafusion
