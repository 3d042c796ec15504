#include "lafusion/metrics.hpp"

#include <string>

namespace lafusion {

namespace {

std::string joined(const Sentence& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

double word_error_rate(const Sentence& hyp, const Sentence& ref) {
  return edit_distance_rate(std::span<const std::string>(hyp), std::span<const std::string>(ref));
}

double char_error_rate(const Sentence& hyp, const Sentence& ref) {
  const std::string h = joined(hyp);
  const std::string r = joined(ref);
  return edit_distance_rate(std::span<const char>(h), std::span<const char>(r));
}

}  // namespace lafusion
