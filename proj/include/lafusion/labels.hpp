#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lafusion {

using Label = std::int32_t;

inline constexpr std::string_view kSpaceLabel = "<space>";
inline constexpr std::string_view kEosLabel = "<eos>";
inline constexpr std::string_view kBlankLabel = "<blank>";

// Output label inventory shared by the decoder and every scorer. Names are
// kept in ascending byte order, so two sets built from the same names assign
// identical ids. Always contains <space> and <eos>; never contains <blank>.
class LabelSet {
 public:
  LabelSet();
  explicit LabelSet(std::vector<std::string> names);

  // One label per distinct byte of `chars`, plus <space> and <eos>.
  static LabelSet from_characters(std::string_view chars);

  std::size_t size() const { return names_.size(); }
  const std::string& name(Label label) const { return names_.at(static_cast<std::size_t>(label)); }
  const std::vector<std::string>& names() const { return names_; }

  bool contains(Label label) const { return label >= 0 && static_cast<std::size_t>(label) < names_.size(); }
  std::optional<Label> find(std::string_view name) const;
  Label id(std::string_view name) const;  // throws DataError if absent
  std::optional<Label> char_label(char c) const;

  // Inverse of char_label; '\0' for <space> and <eos>.
  char character(Label label) const { return chars_[static_cast<std::size_t>(label)]; }

  Label space() const { return space_; }
  Label eos() const { return eos_; }
  bool is_word_end(Label label) const { return label == space_ || label == eos_; }

  friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::vector<char> chars_;
  std::array<Label, 256> by_char_{};
  Label space_ = -1;
  Label eos_ = -1;
};

}  // namespace lafusion
