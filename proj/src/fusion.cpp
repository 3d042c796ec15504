#include "lafusion/fusion.hpp"

#include <cmath>

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

template <class T>
void push_truncated(std::vector<T>& v, T value, int order) {
  const auto keep = static_cast<std::size_t>(std::max(order - 1, 0));
  if (keep == 0) {
    v.clear();
    return;
  }
  if (v.size() >= keep) v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() - keep + 1));
  v.push_back(value);
}

LabelSet labels_of(const NGramModel& lm) {
  if (lm.level() != LmLevel::character) throw DataError("expected a character-level model");
  LabelSet labels(lm.token_names());
  if (labels.names() != lm.token_names()) throw DataError("character model tokens are not a canonical label set");
  return labels;
}

void check_word_model(const NGramModel& lm, const Vocabulary& vocab) {
  if (lm.level() != LmLevel::word) throw DataError("expected a word-level model");
  if (lm.token_names() != vocab.token_names())
    throw DataError("word model tokens do not match the vocabulary");
}

[[noreturn]] void empty_word() { throw DataError("empty word at boundary"); }

void check_label(const LabelSet& labels, Label c) {
  if (!labels.contains(c)) throw DataError("unknown label id " + std::to_string(c));
}

}  // namespace

void FusionConfig::validate() const {
  if (!(oov_scale_multilevel > 0.0) || !(oov_scale_lookahead > 0.0))
    throw UsageError("OOV scaling factors must be positive");
}

// ---------------------------------------------------------------------------

CharLmScorer::CharLmScorer(std::shared_ptr<const NGramModel> char_lm)
    : lm_(std::move(char_lm)), labels_(labels_of(*lm_)) {}

double CharLmScorer::score(const ScorerState& state, Label c) const {
  return std::log(lm_->prob(c, state.char_context));
}

ScorerState CharLmScorer::advance(const ScorerState& state, Label c) const {
  lm_->prob(c, state.char_context);  // validates c
  ScorerState next = state;
  push_truncated(next.char_context, c, lm_->order());
  return next;
}

double CharLmScorer::final_score(const ScorerState& state) const {
  return std::log(lm_->prob(labels_.eos(), state.char_context));
}

// ---------------------------------------------------------------------------

MultiLevelScorer::MultiLevelScorer(std::shared_ptr<const NGramModel> char_lm,
                                   std::shared_ptr<const NGramModel> word_lm,
                                   std::shared_ptr<const Vocabulary> vocab, FusionConfig config)
    : char_lm_(std::move(char_lm)),
      word_lm_(std::move(word_lm)),
      vocab_(std::move(vocab)),
      config_(config),
      labels_(labels_of(*char_lm_)) {
  config_.validate();
  check_word_model(*word_lm_, *vocab_);
}

void MultiLevelScorer::push_word(std::vector<WordId>& history, WordId word) const {
  push_truncated(history, word, word_lm_->order());
}

double MultiLevelScorer::word_end_score(const ScorerState& state, WordId word) const {
  if (word != vocab_->unk_id())
    return std::log(word_lm_->prob(word, state.word_history)) - state.pending_char_logprob;
  return std::log(word_lm_->prob(vocab_->unk_id(), state.word_history) * config_.oov_scale_multilevel);
}

double MultiLevelScorer::score(const ScorerState& state, Label c) const {
  check_label(labels_, c);
  if (labels_.is_word_end(c)) {
    if (state.pending_word.empty()) empty_word();
    return word_end_score(state, vocab_->lookup(state.pending_word));
  }
  return std::log(char_lm_->prob(c, state.char_context));
}

ScorerState MultiLevelScorer::advance(const ScorerState& state, Label c) const {
  check_label(labels_, c);
  ScorerState next = state;
  if (labels_.is_word_end(c)) {
    if (state.pending_word.empty()) empty_word();
    push_word(next.word_history, vocab_->lookup(state.pending_word));
    next.pending_word.clear();
    next.pending_char_logprob = 0.0;
  } else {
    next.pending_word.push_back(labels_.character(c));
    next.pending_char_logprob += std::log(char_lm_->prob(c, state.char_context));
  }
  push_truncated(next.char_context, c, char_lm_->order());
  return next;
}

double MultiLevelScorer::final_score(const ScorerState& state) const {
  if (state.pending_word.empty())
    return std::log(word_lm_->prob(vocab_->eos_id(), state.word_history));
  const WordId word = vocab_->lookup(state.pending_word);
  std::vector<WordId> history = state.word_history;
  push_word(history, word);
  return word_end_score(state, word) + std::log(word_lm_->prob(vocab_->eos_id(), history));
}

// ---------------------------------------------------------------------------

double lookahead_prob(const PrefixTree& tree, NodeId node, const CumSumArray& cumsum) {
  const auto [lo, hi] = tree.anticipated_interval(node);
  return cumsum.mass(lo, hi);
}

std::size_t CumSumCache::Hash::operator()(std::span<const WordId> s) const {
  std::uint64_t h = 1469598103934665603ull;
  for (WordId t : s) {
    h ^= static_cast<std::uint32_t>(t);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

CumSumCache::CumSumCache(std::shared_ptr<const NGramModel> word_lm, std::size_t capacity)
    : lm_(std::move(word_lm)), capacity_(std::max<std::size_t>(capacity, 1)) {}

std::shared_ptr<const CumSumArray> CumSumCache::get(std::span<const WordId> history) const {
  const auto keep = std::min<std::size_t>(history.size(), static_cast<std::size_t>(lm_->order() - 1));
  history = history.last(keep);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(history);
    if (it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto sums = std::make_shared<const CumSumArray>(lm_->cumulative_distribution(history));
  std::lock_guard<std::mutex> lock(mu_);
  ++misses_;
  // Live states keep their arrays alive, so dropping everything is safe.
  if (entries_.size() >= capacity_) entries_.clear();
  return entries_.emplace(std::vector<WordId>(history.begin(), history.end()), std::move(sums)).first->second;
}

void CumSumCache::clear() const {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
  hits_ = misses_ = 0;
}

std::size_t CumSumCache::hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}

std::size_t CumSumCache::misses() const {
  std::lock_guard<std::mutex> lock(mu_);
  return misses_;
}

LookaheadScorer::LookaheadScorer(std::shared_ptr<const NGramModel> word_lm, std::shared_ptr<const Vocabulary> vocab,
                                 LabelSet labels, FusionConfig config, std::size_t cache_capacity)
    : word_lm_(std::move(word_lm)),
      vocab_(std::move(vocab)),
      labels_(std::move(labels)),
      config_(config),
      tree_(*vocab_),
      cache_(word_lm_, cache_capacity) {
  config_.validate();
  check_word_model(*word_lm_, *vocab_);
}

void LookaheadScorer::push_word(std::vector<WordId>& history, WordId word) const {
  push_truncated(history, word, word_lm_->order());
}

ScorerState LookaheadScorer::initial() const { return root_state({}); }

ScorerState LookaheadScorer::root_state(std::vector<WordId> history) const {
  for (WordId w : history)
    if (w < 0 || static_cast<std::size_t>(w) >= vocab_->token_count()) throw DataError("word id out of range");
  ScorerState s;
  const auto keep = static_cast<std::size_t>(word_lm_->order() - 1);
  if (history.size() > keep) history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(keep));
  s.word_history = std::move(history);
  s.node = tree_.root();
  s.cumsum = cache_.get(s.word_history);
  return s;
}

double LookaheadScorer::score(const ScorerState& state, Label c) const {
  check_label(labels_, c);
  const CumSumArray& sums = *state.cumsum;
  const NodeId node = state.node;
  if (labels_.is_word_end(c)) {
    if (node == tree_.root()) empty_word();
    if (node == kNoNode) return 0.0;
    const TrieNode& n = tree_.node(node);
    if (n.is_word_end()) return std::log(sums.prob(n.word_id) / lookahead_prob(tree_, node, sums));
    return std::log(sums.prob(vocab_->unk_id()) * config_.oov_scale_lookahead);
  }
  if (node == kNoNode) return 0.0;
  const NodeId child = tree_.descend(node, labels_.character(c));
  if (child != kNoNode) return std::log(lookahead_prob(tree_, child, sums) / lookahead_prob(tree_, node, sums));
  return std::log(sums.prob(vocab_->unk_id()) * config_.oov_scale_lookahead);
}

ScorerState LookaheadScorer::advance(const ScorerState& state, Label c) const {
  check_label(labels_, c);
  ScorerState next = state;
  if (labels_.is_word_end(c)) {
    if (state.node == tree_.root()) empty_word();
    const bool known = state.node != kNoNode && tree_.node(state.node).is_word_end();
    push_word(next.word_history, known ? tree_.node(state.node).word_id : vocab_->unk_id());
    next.node = tree_.root();
    next.pending_word.clear();
    next.cumsum = cache_.get(next.word_history);
  } else {
    next.node = tree_.descend(state.node, labels_.character(c));
    next.pending_word.push_back(labels_.character(c));
  }
  return next;
}

double LookaheadScorer::final_score(const ScorerState& state) const {
  if (state.node == tree_.root())
    return std::log(word_lm_->prob(vocab_->eos_id(), state.word_history));
  const double word_end = score(state, labels_.eos());
  const bool known = state.node != kNoNode && tree_.node(state.node).is_word_end();
  std::vector<WordId> history = state.word_history;
  push_word(history, known ? tree_.node(state.node).word_id : vocab_->unk_id());
  return word_end + std::log(word_lm_->prob(vocab_->eos_id(), history));
}

}  // namespace lafusion
