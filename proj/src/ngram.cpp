#include "lafusion/ngram.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

constexpr std::string_view kMagic = "lafusion-ngram";
constexpr int kFormatVersion = 1;

}  // namespace

std::string_view to_string(LmLevel level) { return level == LmLevel::word ? "word" : "char"; }

LmLevel parse_lm_level(std::string_view text) {
  if (text == "word") return LmLevel::word;
  if (text == "char" || text == "character") return LmLevel::character;
  throw UsageError("unknown LM level '" + std::string(text) + "' (expected word or char)");
}

CumSumArray cumulative_sums(std::span<const double> dist) {
  CumSumArray out;
  out.values.resize(dist.size() + 1);
  double s = 0.0;
  out.values[0] = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    s += dist[i];
    out.values[i + 1] = s;
  }
  return out;
}

std::size_t NGramModel::SpanHash::operator()(std::span<const Token> s) const {
  std::uint64_t h = 1469598103934665603ull;
  for (Token t : s) {
    h ^= static_cast<std::uint32_t>(t);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

std::uint32_t NGramModel::ContextStats::count(Token t) const {
  auto it = std::lower_bound(tokens.begin(), tokens.end(), t);
  if (it == tokens.end() || *it != t) return 0;
  return counts[static_cast<std::size_t>(it - tokens.begin())];
}

NGramModel::NGramModel(LmLevel level, int order, std::vector<std::string> token_names)
    : level_(level), order_(order), names_(std::move(token_names)) {
  if (order < 1 || order > 5) throw UsageError("n-gram order must be in [1, 5], got " + std::to_string(order));
  if (names_.empty()) throw DataError("n-gram model needs at least one token");
  tables_.resize(static_cast<std::size_t>(order));
}

NGramModel::NGramModel(LmLevel level, int order, std::vector<std::string> token_names,
                       std::span<const std::vector<Token>> sequences)
    : NGramModel(level, order, std::move(token_names)) {
  if (sequences.empty()) throw DataError("empty corpus");
  // (context..., token) -> count, per context length
  std::vector<std::unordered_map<std::vector<Token>, std::uint32_t, SpanHash, SpanEqual>> grams(static_cast<std::size_t>(order_));
  std::vector<Token> key;
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      check_token(seq[i]);
      const std::size_t max_k = std::min<std::size_t>(i, static_cast<std::size_t>(order_ - 1));
      for (std::size_t k = 0; k <= max_k; ++k) {
        key.assign(seq.begin() + static_cast<std::ptrdiff_t>(i - k), seq.begin() + static_cast<std::ptrdiff_t>(i + 1));
        ++grams[k][key];
      }
    }
    training_tokens_ += seq.size();
  }
  if (training_tokens_ == 0) throw DataError("empty corpus");
  for (auto& table : grams)
    for (const auto& [g, n] : table)
      add_count(std::span<const Token>(g).first(g.size() - 1), g.back(), n);
  finalize();
}

void NGramModel::check_token(Token t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= names_.size())
    throw DataError("token id " + std::to_string(t) + " outside inventory of " + std::to_string(names_.size()));
}

void NGramModel::add_count(std::span<const Token> context, Token token, std::uint32_t n) {
  auto& table = tables_.at(context.size());
  auto it = table.find(context);
  if (it == table.end()) it = table.emplace(std::vector<Token>(context.begin(), context.end()), ContextStats{}).first;
  it->second.tokens.push_back(token);
  it->second.counts.push_back(n);
}

void NGramModel::finalize() {
  for (auto& table : tables_) {
    for (auto& [ctx, st] : table) {
      std::vector<std::size_t> order(st.tokens.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return st.tokens[a] < st.tokens[b]; });
      ContextStats sorted;
      for (std::size_t i : order) {
        if (!sorted.tokens.empty() && sorted.tokens.back() == st.tokens[i]) {
          sorted.counts.back() += st.counts[i];
        } else {
          sorted.tokens.push_back(st.tokens[i]);
          sorted.counts.push_back(st.counts[i]);
        }
        sorted.total += st.counts[i];
      }
      st = std::move(sorted);
    }
  }
  if (tables_[0].empty()) throw DataError("n-gram model has no unigram counts");

  const double v = static_cast<double>(names_.size());
  const ContextStats& uni = tables_[0].begin()->second;
  const double types = static_cast<double>(uni.tokens.size());
  const double denom = static_cast<double>(uni.total) + types;
  unigram_.assign(names_.size(), 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    double c = 0.0;
    if (j < uni.tokens.size() && static_cast<std::size_t>(uni.tokens[j]) == i) c = uni.counts[j++];
    unigram_[i] = (c + types * (1.0 / v)) / denom;
  }
}

std::span<const Token> NGramModel::truncate(std::span<const Token> context) const {
  const auto keep = std::min<std::size_t>(context.size(), static_cast<std::size_t>(order_ - 1));
  context = context.last(keep);
  for (Token t : context) check_token(t);
  return context;
}

const NGramModel::ContextStats* NGramModel::stats(std::span<const Token> context) const {
  const auto& table = tables_[context.size()];
  auto it = table.find(context);
  return it == table.end() ? nullptr : &it->second;
}

double NGramModel::prob(Token token, std::span<const Token> context) const {
  check_token(token);
  context = truncate(context);
  double p = unigram_[static_cast<std::size_t>(token)];
  for (std::size_t k = 1; k <= context.size(); ++k) {
    const ContextStats* st = stats(context.last(k));
    if (st == nullptr) break;
    const double types = static_cast<double>(st->tokens.size());
    p = (static_cast<double>(st->count(token)) + types * p) / (static_cast<double>(st->total) + types);
  }
  return p;
}

std::vector<double> NGramModel::full_distribution(std::span<const Token> context) const {
  context = truncate(context);
  std::vector<double> dist = unigram_;
  for (std::size_t k = 1; k <= context.size(); ++k) {
    const ContextStats* st = stats(context.last(k));
    if (st == nullptr) break;
    const double types = static_cast<double>(st->tokens.size());
    const double denom = static_cast<double>(st->total) + types;
    std::size_t j = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      double c = 0.0;
      if (j < st->tokens.size() && static_cast<std::size_t>(st->tokens[j]) == i) c = st->counts[j++];
      dist[i] = (c + types * dist[i]) / denom;
    }
  }
  return dist;
}

CumSumArray NGramModel::cumulative_distribution(std::span<const Token> context) const {
  const std::vector<double> dist = full_distribution(context);
  return cumulative_sums(dist);
}

void NGramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "level " << to_string(level_) << '\n';
  out << "order " << order_ << '\n';
  out << "training_tokens " << training_tokens_ << '\n';
  out << "tokens " << names_.size() << '\n';
  for (const auto& n : names_) out << n << '\n';

  std::size_t total = 0;
  for (const auto& t : tables_)
    for (const auto& [ctx, st] : t) total += st.tokens.size();
  out << "ngrams " << total << '\n';
  for (const auto& table : tables_) {
    std::vector<const std::vector<Token>*> keys;
    keys.reserve(table.size());
    for (const auto& [ctx, st] : table) keys.push_back(&ctx);
    std::sort(keys.begin(), keys.end(), [](const auto* a, const auto* b) { return *a < *b; });
    for (const auto* ctx : keys) {
      const ContextStats& st = table.find(*ctx)->second;
      std::string ctx_text;
      for (std::size_t i = 0; i < ctx->size(); ++i) {
        if (i) ctx_text += ' ';
        ctx_text += std::to_string((*ctx)[i]);
      }
      if (ctx_text.empty()) ctx_text = "-";
      for (std::size_t i = 0; i < st.tokens.size(); ++i)
        out << ctx_text << '\t' << st.tokens[i] << '\t' << st.counts[i] << '\n';
    }
  }
  if (!out) throw DataError("failed writing " + path.string());
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model " + path.string());
  const std::string src = path.string();
  std::size_t line_no = 0;
  std::string line;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError(src, line_no + 1, "unexpected end of file");
    ++line_no;
    return line;
  };
  auto header = [&](std::string_view key) -> std::string {
    std::istringstream ss(next());
    std::string k, v;
    ss >> k >> v;
    if (k != key || v.empty()) throw ParseError(src, line_no, "expected '" + std::string(key) + "'");
    return v;
  };

  {
    std::istringstream ss(next());
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kMagic) throw ParseError(src, line_no, "not an n-gram model file");
    if (version != kFormatVersion) throw ParseError(src, line_no, "unsupported format version " + std::to_string(version));
  }
  const LmLevel level = parse_lm_level(header("level"));
  int order = 0;
  std::uint64_t training_tokens = 0;
  std::size_t token_count = 0;
  try {
    order = std::stoi(header("order"));
    training_tokens = std::stoull(header("training_tokens"));
    token_count = std::stoull(header("tokens"));
  } catch (const std::logic_error&) {
    throw ParseError(src, line_no, "malformed number");
  }
  std::vector<std::string> names(token_count);
  for (auto& n : names) n = next();

  NGramModel model(level, order, std::move(names));
  model.training_tokens_ = training_tokens;
  std::size_t ngram_count = 0;
  try {
    ngram_count = std::stoull(header("ngrams"));
  } catch (const std::logic_error&) {
    throw ParseError(src, line_no, "malformed number");
  }
  std::vector<Token> ctx;
  for (std::size_t g = 0; g < ngram_count; ++g) {
    const std::string& l = next();
    const auto tab1 = l.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : l.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw ParseError(src, line_no, "expected context TAB token TAB count");
    ctx.clear();
    const std::string ctx_text = l.substr(0, tab1);
    if (ctx_text != "-") {
      std::istringstream ss(ctx_text);
      Token t;
      while (ss >> t) ctx.push_back(t);
    }
    Token token = 0;
    std::uint32_t count = 0;
    try {
      token = std::stoi(l.substr(tab1 + 1, tab2 - tab1 - 1));
      count = static_cast<std::uint32_t>(std::stoul(l.substr(tab2 + 1)));
    } catch (const std::logic_error&) {
      throw ParseError(src, line_no, "malformed n-gram entry");
    }
    if (ctx.size() >= static_cast<std::size_t>(order)) throw ParseError(src, line_no, "context longer than order-1");
    for (Token t : ctx) model.check_token(t);
    model.check_token(token);
    model.add_count(ctx, token, count);
  }
  model.finalize();
  return model;
}

NGramModel train_word_ngram(const Corpus& corpus, int order, const Vocabulary& vocab) {
  if (corpus.empty()) throw DataError("empty corpus");
  std::vector<std::vector<Token>> seqs;
  seqs.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) {
    std::vector<Token> ids;
    ids.reserve(s.size() + 1);
    for (const auto& w : s) ids.push_back(vocab.lookup(w));
    ids.push_back(vocab.eos_id());
    seqs.push_back(std::move(ids));
  }
  return NGramModel(LmLevel::word, order, vocab.token_names(), seqs);
}

NGramModel train_char_ngram(const Corpus& corpus, int order, const LabelSet& labels) {
  if (corpus.empty()) throw DataError("empty corpus");
  std::vector<std::vector<Token>> seqs;
  seqs.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) {
    std::vector<Token> ids = to_char_labels(s, labels);
    ids.push_back(labels.eos());
    seqs.push_back(std::move(ids));
  }
  return NGramModel(LmLevel::character, order, labels.names(), seqs);
}

}  // namespace lafusion
