#include "lafusion/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Hypothesis {
  std::vector<Label> labels;
  double ctc = 0.0;
  double att = 0.0;
  double lm = 0.0;
  double score = 0.0;
  CtcState ctc_state;
  ScorerState lm_state;
  ScorerState att_state;
};

struct Candidate {
  std::size_t parent;
  Label c;
  double ctc;
  double att;
  double lm;
  double score;
};

void check_labels(const LabelScorer* scorer, const LabelSet& labels, const char* slot) {
  if (scorer != nullptr && !(scorer->labels() == labels))
    throw DataError(std::string("label-set mismatch between posteriors and ") + slot + " scorer '" + scorer->name() +
                    "'");
}

ScoredHypothesis finish(const Hypothesis& h, const LabelSet& labels, bool complete) {
  ScoredHypothesis out;
  out.labels = h.labels;
  out.words = split_words(h.labels, labels);
  out.ctc_score = h.ctc;
  out.att_score = h.att;
  out.lm_score = h.lm;
  out.score = h.score;
  out.complete = complete;
  return out;
}

}  // namespace

void DecodeConfig::validate() const {
  if (!(ctc_weight >= 0.0 && ctc_weight <= 1.0)) throw UsageError("CTC weight must lie in [0, 1]");
  if (!(lm_weight >= 0.0)) throw UsageError("LM weight must be non-negative");
  if (beam_width < 1) throw UsageError("beam width must be at least 1");
  if (n_best < 1) throw UsageError("n-best size must be at least 1");
}

double combine_scores(double ctc, double att, double lm, const DecodeConfig& config) {
  double total = 0.0;
  if (config.ctc_weight != 0.0) total += config.ctc_weight * ctc;
  if (config.ctc_weight != 1.0) total += (1.0 - config.ctc_weight) * att;
  if (config.lm_weight != 0.0) total += config.lm_weight * lm;
  return total;
}

bool allowed_extension(std::span<const Label> prefix, Label c, const LabelSet& labels) {
  const bool after_space = !prefix.empty() && prefix.back() == labels.space();
  if (c == labels.space()) return !prefix.empty() && !after_space;
  if (c == labels.eos()) return !after_space;
  return true;
}

bool better(const ScoredHypothesis& a, const ScoredHypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.labels < b.labels;
}

NBest decode(const PosteriorMatrix& posteriors, const LabelScorer* lm, const LabelScorer* att,
             const DecodeConfig& config) {
  config.validate();
  const LabelSet labels = posteriors.label_set();
  check_labels(lm, labels, "LM");
  check_labels(att, labels, "attention");

  const CtcPrefixScorer ctc(posteriors, labels);
  const std::size_t max_len = config.max_len.value_or(posteriors.frames());
  const bool monotone = (lm == nullptr || lm->bounded()) && (att == nullptr || att->bounded());
  const auto eos = labels.eos();

  std::vector<Hypothesis> beam(1);
  beam[0].ctc_state = ctc.initial();
  if (lm != nullptr) beam[0].lm_state = lm->initial();
  if (att != nullptr) beam[0].att_state = att->initial();
  beam[0].score = combine_scores(0.0, 0.0, 0.0, config);

  std::vector<ScoredHypothesis> complete;
  std::vector<Hypothesis> last_beam;
  std::vector<Candidate> candidates;

  for (std::size_t len = 0; len <= max_len && !beam.empty(); ++len) {
    candidates.clear();
    for (std::size_t i = 0; i < beam.size(); ++i) {
      const Hypothesis& h = beam[i];
      if (allowed_extension(h.labels, eos, labels)) {
        Hypothesis done;
        done.labels = h.labels;
        done.ctc = ctc.final_score(h.ctc_state);
        done.att = att != nullptr ? h.att + att->final_score(h.att_state) : 0.0;
        done.lm = lm != nullptr ? h.lm + lm->final_score(h.lm_state) : 0.0;
        done.score = combine_scores(done.ctc, done.att, done.lm, config);
        if (done.score != kNegInf) complete.push_back(finish(done, labels, true));
      }
      if (len == max_len) continue;
      for (std::size_t l = 0; l < labels.size(); ++l) {
        const auto c = static_cast<Label>(l);
        if (c == eos || !allowed_extension(h.labels, c, labels)) continue;
        Candidate cand{i, c, ctc.prefix_score(h.ctc_state, c), 0.0, 0.0, 0.0};
        if (att != nullptr) cand.att = h.att + att->score(h.att_state, c);
        if (lm != nullptr) cand.lm = h.lm + lm->score(h.lm_state, c);
        cand.score = combine_scores(cand.ctc, cand.att, cand.lm, config);
        if (cand.score != kNegInf) candidates.push_back(cand);
      }
    }

    // Same-length hypotheses only; ties go to the smaller label sequence.
    auto order = [&](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.parent != b.parent) return beam[a.parent].labels < beam[b.parent].labels;
      return a.c < b.c;
    };
    const std::size_t keep = std::min(config.beam_width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      order);

    std::vector<Hypothesis> next;
    next.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
      const Candidate& cand = candidates[k];
      const Hypothesis& parent = beam[cand.parent];
      Hypothesis h;
      h.labels = parent.labels;
      h.labels.push_back(cand.c);
      h.ctc = cand.ctc;
      h.att = cand.att;
      h.lm = cand.lm;
      h.score = cand.score;
      h.ctc_state = ctc.extend(parent.ctc_state, cand.c);
      if (lm != nullptr) h.lm_state = lm->advance(parent.lm_state, cand.c);
      if (att != nullptr) h.att_state = att->advance(parent.att_state, cand.c);
      next.push_back(std::move(h));
    }
    last_beam = std::move(beam);
    beam = std::move(next);

    // With non-positive increments no extension can overtake the n-th best
    // finished hypothesis.
    if (monotone && complete.size() >= config.n_best) {
      std::nth_element(complete.begin(), complete.begin() + static_cast<std::ptrdiff_t>(config.n_best - 1),
                       complete.end(), better);
      const double threshold = complete[config.n_best - 1].score;
      if (beam.empty() || beam.front().score < threshold) break;
    }
  }

  NBest result;
  if (complete.empty()) {
    result.complete = false;
    const auto& source = beam.empty() ? last_beam : beam;
    if (!source.empty()) result.hypotheses.push_back(finish(source.front(), labels, false));
    return result;
  }
  std::sort(complete.begin(), complete.end(), better);
  if (complete.size() > config.n_best) complete.resize(config.n_best);
  result.hypotheses = std::move(complete);
  return result;
}

}  // namespace lafusion
