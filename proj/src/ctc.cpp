#include "lafusion/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

PosteriorMatrix::PosteriorMatrix(std::vector<std::string> columns, std::vector<double> values)
    : columns_(std::move(columns)), values_(std::move(values)) {
  if (columns_.empty()) throw DataError("posterior matrix has no columns");
  std::set<std::string> seen;
  for (const auto& c : columns_)
    if (!seen.insert(c).second) throw DataError("duplicate posterior column '" + c + "'");
  auto blank = column_of(kBlankLabel);
  if (!blank) throw DataError("posterior matrix has no " + std::string(kBlankLabel) + " column");
  blank_ = *blank;
  if (values_.empty() || values_.size() % columns_.size() != 0)
    throw DataError("posterior matrix must have a positive whole number of rows");
  frames_ = values_.size() / columns_.size();
  for (std::size_t t = 0; t < frames_; ++t) {
    double sum = 0.0;
    for (double v : row(t)) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw DataError("frame " + std::to_string(t + 1) + ": probabilities must be finite and non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw DataError("frame " + std::to_string(t + 1) + ": row sums to " + std::to_string(sum));
  }
}

std::optional<std::size_t> PosteriorMatrix::column_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  return std::nullopt;
}

LabelSet PosteriorMatrix::label_set() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (i != blank_) names.push_back(columns_[i]);
  return LabelSet(std::move(names));
}

// ---------------------------------------------------------------------------

CtcPrefixScorer::CtcPrefixScorer(const PosteriorMatrix& posteriors, const LabelSet& labels)
    : frames_(posteriors.frames()) {
  const std::size_t cols = posteriors.column_count();
  inv_max_.resize(frames_);
  log_scale_.resize(frames_);
  double running = 0.0;
  for (std::size_t t = 0; t < frames_; ++t) {
    const auto row = posteriors.row(t);
    const double m = *std::max_element(row.begin(), row.end());
    inv_max_[t] = 1.0 / m;
    running += std::log(m);
    log_scale_[t] = running;
  }

  label_offset_.assign(labels.size(), -1);
  std::ptrdiff_t zero_offset = -1;
  scaled_.reserve((labels.size() + 1) * frames_);
  auto append_column = [&](std::size_t col) {
    const auto offset = scaled_.size();
    for (std::size_t t = 0; t < frames_; ++t) scaled_.push_back(posteriors.values()[t * cols + col] * inv_max_[t]);
    return offset;
  };
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const auto label = static_cast<Label>(l);
    if (label == labels.eos()) continue;
    if (auto col = posteriors.column_of(labels.name(label))) {
      label_offset_[l] = static_cast<std::ptrdiff_t>(append_column(*col));
    } else {
      // A label without a column is never emitted.
      if (zero_offset < 0) {
        zero_offset = static_cast<std::ptrdiff_t>(scaled_.size());
        scaled_.resize(scaled_.size() + frames_, 0.0);
      }
      label_offset_[l] = zero_offset;
    }
  }
  blank_offset_ = append_column(posteriors.blank_column());
}

std::span<const double> CtcPrefixScorer::column(Label c) const {
  if (c < 0 || static_cast<std::size_t>(c) >= label_offset_.size() || label_offset_[static_cast<std::size_t>(c)] < 0)
    throw DataError("label id " + std::to_string(c) + " is not a CTC label");
  return std::span<const double>(scaled_).subspan(static_cast<std::size_t>(label_offset_[static_cast<std::size_t>(c)]),
                                                  frames_);
}

namespace {

std::size_t block_count(std::size_t frames) { return (frames + kCtcBlock - 1) / kCtcBlock; }

// Divides frames [lo, hi) of both vectors by `m`.
void scale_block(CtcState& s, std::size_t lo, std::size_t hi, double m) {
  const double inv = 1.0 / m;
  for (std::size_t t = lo; t < hi; ++t) {
    s.nonblank[t] *= inv;
    s.blank[t] *= inv;
  }
}

double exp_diff(double a, double b) { return a == kNegInf ? 0.0 : std::exp(a - b); }

}  // namespace

CtcState CtcPrefixScorer::initial() const {
  CtcState s;
  s.nonblank.assign(frames_, 0.0);
  s.blank.resize(frames_);
  s.block_log.assign(block_count(frames_), kNegInf);
  const double* yb = scaled_.data() + blank_offset_;
  double r = 1.0;
  double base = 0.0;
  for (std::size_t b = 0; b < s.block_log.size(); ++b) {
    const std::size_t lo = b * kCtcBlock, hi = std::min(lo + kCtcBlock, frames_);
    double m = 0.0;
    for (std::size_t t = lo; t < hi; ++t) {
      r *= yb[t];
      s.blank[t] = r;
      m = std::max(m, r);
    }
    if (!(m > 0.0)) break;  // every later value is zero too
    scale_block(s, lo, hi, m);
    r /= m;
    base += std::log(m);
    s.block_log[b] = base;
  }
  return s;
}

double CtcPrefixScorer::run(const CtcState& g, Label c, CtcState* out) const {
  const double* yc = column(c).data();
  const double* yb = scaled_.data() + blank_offset_;
  const double* gn = g.nonblank.data();
  const double* gb = g.blank.data();
  const bool same = c == g.last;
  const std::size_t len = g.length;
  const std::size_t blocks = block_count(frames_);

  if (out != nullptr) {
    out->nonblank.assign(frames_, 0.0);
    out->blank.assign(frames_, 0.0);
    out->block_log.assign(blocks, kNegInf);
    out->last = c;
    out->length = len + 1;
  }
  if (len >= frames_) {
    if (out != nullptr) out->log_prefix = kNegInf;
    return kNegInf;
  }

  // rn, rb: forward values at the previous frame, in units of exp(work).
  double rn = 0.0;
  double rb = 0.0;
  double work = kNegInf;
  // Prefix mass ending by the current frame, in units of the frame scale times exp(acc_log).
  double acc = 0.0;
  double acc_log = kNegInf;

  for (std::size_t b = len / kCtcBlock; b < blocks; ++b) {
    const std::size_t lo = b * kCtcBlock, hi = std::min(lo + kCtcBlock, frames_);
    const std::size_t from = std::max(lo, len);
    // The parent's values feed frame t through frame t - 1.
    const double parent_prev = (from == lo && lo > 0) ? g.block_log[b - 1] : kNegInf;
    const double parent_cur = g.block_log[b];
    double next_work = std::max({work, parent_cur, parent_prev, from == 0 ? 0.0 : kNegInf});
    if (next_work == kNegInf) next_work = 0.0;
    const double carry = exp_diff(work, next_work);
    rn *= carry;
    rb *= carry;
    work = next_work;
    if (acc == 0.0) {
      acc_log = work;
    } else if (work > acc_log) {
      acc *= std::exp(acc_log - work);
      acc_log = work;
    }
    const double to_acc = std::exp(work - acc_log);
    const double f_prev = exp_diff(parent_prev, work);
    const double f_cur = exp_diff(parent_cur, work);

    double m = 0.0;
    for (std::size_t t = from; t < hi; ++t) {
      double phi;
      if (t == 0) {
        phi = std::exp(-work);  // the empty prefix before the first frame
      } else {
        phi = (gb[t - 1] + (same ? 0.0 : gn[t - 1])) * (t == lo ? f_prev : f_cur);
      }
      const double emitted = phi * yc[t];
      const double next_rn = (t == 0 ? 0.0 : rn * yc[t]) + emitted;
      const double next_rb = t == 0 ? 0.0 : (rb + rn) * yb[t];
      acc = acc * (t == 0 ? 1.0 : inv_max_[t]) + emitted * to_acc;
      rn = next_rn;
      rb = next_rb;
      m = std::max({m, rn, rb});
      if (out != nullptr) {
        out->nonblank[t] = rn;
        out->blank[t] = rb;
      }
    }
    if (m > 0.0) {
      if (out != nullptr) scale_block(*out, from, hi, m);
      rn /= m;
      rb /= m;
      work += std::log(m);
      if (out != nullptr) out->block_log[b] = work;
    }
    if (acc > 0.0) {
      acc_log += std::log(acc);
      acc = 1.0;
    }
  }
  const double log_prefix = acc > 0.0 ? std::log(acc) + acc_log + log_scale_[frames_ - 1] : kNegInf;
  if (out != nullptr) out->log_prefix = log_prefix;
  return log_prefix;
}

double CtcPrefixScorer::prefix_score(const CtcState& state, Label c) const { return run(state, c, nullptr); }

CtcState CtcPrefixScorer::extend(const CtcState& state, Label c) const {
  CtcState out;
  run(state, c, &out);
  return out;
}

double CtcPrefixScorer::final_score(const CtcState& state) const {
  const double v = state.nonblank[frames_ - 1] + state.blank[frames_ - 1];
  return v > 0.0 ? std::log(v) + state.block_log.back() + log_scale_[frames_ - 1] : kNegInf;
}

std::vector<double> CtcPrefixScorer::forward_blank(const CtcState& state) const {
  std::vector<double> out(frames_);
  for (std::size_t t = 0; t < frames_; ++t)
    out[t] = state.blank[t] * std::exp(log_scale_[t] + state.block_log[t / kCtcBlock]);
  return out;
}

std::vector<double> CtcPrefixScorer::forward_nonblank(const CtcState& state) const {
  std::vector<double> out(frames_);
  for (std::size_t t = 0; t < frames_; ++t)
    out[t] = state.nonblank[t] * std::exp(log_scale_[t] + state.block_log[t / kCtcBlock]);
  return out;
}

}  // namespace lafusion
