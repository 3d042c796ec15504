#include "lafusion/labels.hpp"

#include <algorithm>

#include "lafusion/error.hpp"

namespace lafusion {

LabelSet::LabelSet() : LabelSet(std::vector<std::string>{}) {}

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  names_.emplace_back(kSpaceLabel);
  names_.emplace_back(kEosLabel);
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());

  by_char_.fill(-1);
  chars_.assign(names_.size(), '\0');
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const std::string& n = names_[i];
    const auto id = static_cast<Label>(i);
    if (n == kSpaceLabel) {
      space_ = id;
    } else if (n == kEosLabel) {
      eos_ = id;
    } else if (n == kBlankLabel) {
      throw DataError("label set must not contain " + std::string(kBlankLabel));
    } else if (n.size() == 1 && n[0] != ' ') {
      chars_[i] = n[0];
      by_char_[static_cast<unsigned char>(n[0])] = id;
    } else {
      throw DataError("invalid label '" + n + "': labels are single characters, <space> or <eos>");
    }
  }
}

LabelSet LabelSet::from_characters(std::string_view chars) {
  std::array<bool, 256> seen{};
  std::vector<std::string> names;
  for (char c : chars) {
    auto& s = seen[static_cast<unsigned char>(c)];
    if (s || c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    s = true;
    names.emplace_back(1, c);
  }
  return LabelSet(std::move(names));
}

std::optional<Label> LabelSet::find(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<Label>(it - names_.begin());
}

Label LabelSet::id(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw DataError("unknown label '" + std::string(name) + "'");
}

std::optional<Label> LabelSet::char_label(char c) const {
  const Label id = by_char_[static_cast<unsigned char>(c)];
  if (id < 0) return std::nullopt;
  return id;
}

}  // namespace lafusion
