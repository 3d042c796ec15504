#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lafusion/labels.hpp"

namespace lafusion {

// Frame-by-column CTC posteriors. Columns are named by label, one of them
// <blank>; every row is a probability distribution (sum 1 within 1e-6).
class PosteriorMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-6;

  PosteriorMatrix(std::vector<std::string> columns, std::vector<double> values);

  std::size_t frames() const { return frames_; }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t blank_column() const { return blank_; }
  std::optional<std::size_t> column_of(std::string_view name) const;

  double at(std::size_t t, std::size_t col) const { return values_[t * columns_.size() + col]; }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(values_).subspan(t * columns_.size(), columns_.size());
  }
  const std::vector<double>& values() const { return values_; }

  // Output labels implied by the columns: all non-blank columns plus <eos>.
  LabelSet label_set() const;

 private:
  std::vector<std::string> columns_;
  std::vector<double> values_;
  std::size_t frames_ = 0;
  std::size_t blank_ = 0;
};

// Forward variables of one prefix. A stored value at frame t is the true
// probability divided by the running product of per-frame maxima, then by
// exp(block_log[t / kCtcBlock]); each block is renormalized separately, which
// keeps long inputs in range.
inline constexpr std::size_t kCtcBlock = 32;

struct CtcState {
  std::vector<double> nonblank;  // prefix ends at frame t on its last label
  std::vector<double> blank;     // prefix ends at frame t on a blank
  std::vector<double> block_log;  // -inf for blocks holding only zeros
  Label last = -1;
  std::size_t length = 0;
  double log_prefix = 0.0;  // log p(prefix, ... | X)
};

// CTC prefix probabilities: the total mass of frame sequences whose collapsed
// output starts with a given prefix, extended one label at a time.
class CtcPrefixScorer {
 public:
  CtcPrefixScorer(const PosteriorMatrix& posteriors, const LabelSet& labels);

  std::size_t frames() const { return frames_; }

  CtcState initial() const;
  // log p(h.c, ... | X) for the prefix h held by `state`; -inf if impossible.
  double prefix_score(const CtcState& state, Label c) const;
  CtcState extend(const CtcState& state, Label c) const;
  // log of the probability that the collapsed output equals the prefix exactly.
  double final_score(const CtcState& state) const;

  // Unscaled forward variables, for inspection.
  std::vector<double> forward_blank(const CtcState& state) const;
  std::vector<double> forward_nonblank(const CtcState& state) const;

 private:
  std::span<const double> column(Label c) const;
  double run(const CtcState& g, Label c, CtcState* out) const;

  std::size_t frames_;
  std::vector<double> scaled_;      // [label][frame], label-major; blank stored last
  std::vector<double> inv_max_;     // 1 / per-frame maximum
  std::vector<double> log_scale_;   // log of the running product of per-frame maxima
  std::vector<std::ptrdiff_t> label_offset_;  // offset into scaled_, -1 for <eos>
  std::size_t blank_offset_ = 0;
};

}  // namespace lafusion
