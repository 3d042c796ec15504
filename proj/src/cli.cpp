#include "lafusion/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "lafusion/bench.hpp"
#include "lafusion/decoder.hpp"
#include "lafusion/error.hpp"
#include "lafusion/fusion.hpp"
#include "lafusion/io.hpp"
#include "lafusion/ngram.hpp"
#include "lafusion/synth.hpp"
#include "lafusion/trie.hpp"
#include "lafusion/vocab.hpp"

namespace fs = std::filesystem;

namespace lafusion {

namespace {

const std::vector<std::string> kStrategies = {"none", "char", "multilevel", "lookahead"};

struct ModelPaths {
  std::string char_lm;
  std::string word_lm;
  std::string vocab;
};

struct Models {
  std::shared_ptr<const NGramModel> char_lm;
  std::shared_ptr<const NGramModel> word_lm;
  std::shared_ptr<const Vocabulary> vocab;
};

void require(const std::string& value, const std::string& flag, const std::string& strategy) {
  if (value.empty()) throw UsageError(flag + " is required for strategy " + strategy);
}

Models load_models(const std::string& strategy, const ModelPaths& paths) {
  Models m;
  if (strategy == "char" || strategy == "multilevel") {
    require(paths.char_lm, "--char-lm", strategy);
    m.char_lm = std::make_shared<const NGramModel>(NGramModel::load(paths.char_lm));
  }
  if (strategy == "multilevel" || strategy == "lookahead") {
    require(paths.word_lm, "--word-lm", strategy);
    require(paths.vocab, "--vocab", strategy);
    m.word_lm = std::make_shared<const NGramModel>(NGramModel::load(paths.word_lm));
    m.vocab = std::make_shared<const Vocabulary>(load_vocab(paths.vocab));
  }
  return m;
}

std::unique_ptr<LabelScorer> make_scorer(const std::string& strategy, const Models& m, const LabelSet& labels,
                                         const FusionConfig& fusion) {
  if (strategy == "none") return nullptr;
  if (strategy == "char") return std::make_unique<CharLmScorer>(m.char_lm);
  if (strategy == "multilevel") return std::make_unique<MultiLevelScorer>(m.char_lm, m.word_lm, m.vocab, fusion);
  if (strategy == "lookahead") return std::make_unique<LookaheadScorer>(m.word_lm, m.vocab, labels, fusion);
  throw UsageError("unknown LM strategy '" + strategy + "'");
}

struct DecodeFlags {
  double lambda = 0.2;
  double gamma = 1.0;
  double beta = 1.0;
  double eta = 1.0;
  std::size_t beam_width = 30;
  std::size_t n_best = 1;
  std::size_t max_len = 0;

  DecodeConfig decode_config() const {
    DecodeConfig c;
    c.ctc_weight = lambda;
    c.lm_weight = gamma;
    c.beam_width = beam_width;
    c.n_best = n_best;
    if (max_len > 0) c.max_len = max_len;
    c.validate();
    return c;
  }
  FusionConfig fusion_config() const {
    FusionConfig f{beta, eta};
    f.validate();
    return f;
  }
};

void add_decode_flags(CLI::App* cmd, DecodeFlags& f) {
  cmd->add_option("--lambda", f.lambda, "CTC weight in [0,1]")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "LM weight")->capture_default_str();
  cmd->add_option("--beta", f.beta, "OOV scale, multi-level LM")->capture_default_str();
  cmd->add_option("--eta", f.eta, "OOV scale, look-ahead LM")->capture_default_str();
  cmd->add_option("--beam-width", f.beam_width, "hypotheses kept per length")->capture_default_str();
  cmd->add_option("--n-best", f.n_best, "hypotheses written per utterance")->capture_default_str();
  cmd->add_option("--max-len", f.max_len, "label cap (0: number of frames)")->capture_default_str();
}

// --- eval set manifest: id TAB posterior path TAB reference transcript ---

std::vector<EvalUtterance> load_eval_set(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw DataError("cannot open eval set " + manifest.string());
  std::vector<EvalUtterance> out;
  std::optional<LabelSet> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(manifest.string(), line_no, "expected id TAB path TAB transcript");
    fs::path p = line.substr(t1 + 1, t2 - t1 - 1);
    if (p.is_relative()) p = manifest.parent_path() / p;
    PosteriorMatrix m = load_posteriors(p, labels ? &*labels : nullptr);
    if (!labels) labels = m.label_set();
    out.push_back({line.substr(0, t1), std::move(m), tokenize_line(line.substr(t2 + 1))});
  }
  if (out.empty()) throw DataError("eval set " + manifest.string() + " is empty");
  return out;
}

// --- bench configurations: name TAB strategy [TAB key=value]... ---

struct ConfigLine {
  std::string name;
  std::string strategy;
  ModelPaths paths;
};

std::vector<ConfigLine> load_bench_configs(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open configurations " + file.string());
  std::vector<ConfigLine> out;
  std::string line;
  std::size_t line_no = 0;
  auto resolve = [&](const std::string& v) {
    fs::path p = v;
    return (p.is_relative() ? file.parent_path() / p : p).string();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string f;
    while (std::getline(ss, f, '\t'))
      if (!f.empty()) fields.push_back(f);
    if (fields.size() < 2) throw ParseError(file.string(), line_no, "expected name TAB strategy");
    ConfigLine c{fields[0], fields[1], {}};
    if (std::find(kStrategies.begin(), kStrategies.end(), c.strategy) == kStrategies.end())
      throw ParseError(file.string(), line_no, "unknown strategy '" + c.strategy + "'");
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const auto eq = fields[i].find('=');
      if (eq == std::string::npos) throw ParseError(file.string(), line_no, "expected key=value, got " + fields[i]);
      const std::string key = fields[i].substr(0, eq);
      const std::string value = resolve(fields[i].substr(eq + 1));
      if (key == "char_lm")
        c.paths.char_lm = value;
      else if (key == "word_lm")
        c.paths.word_lm = value;
      else if (key == "vocab")
        c.paths.vocab = value;
      else
        throw ParseError(file.string(), line_no, "unknown key '" + key + "'");
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beam-search decoding with character, multi-level and look-ahead word LM fusion", "lafusion"};
  app.require_subcommand(1);

  // build-vocab
  std::string corpus_path, vocab_path, out_path;
  std::size_t max_size = 20000;
  auto* build_vocab_cmd = app.add_subcommand("build-vocab", "Select the most frequent corpus words");
  build_vocab_cmd->add_option("--corpus", corpus_path)->required();
  build_vocab_cmd->add_option("--max-size", max_size)->capture_default_str();
  build_vocab_cmd->add_option("--out", out_path)->required();

  // train-lm
  int order = 0;
  std::string level = "word";
  auto* train_cmd = app.add_subcommand("train-lm", "Train a Witten-Bell n-gram model");
  train_cmd->add_option("--corpus", corpus_path)->required();
  train_cmd->add_option("--vocab", vocab_path, "word list (word level)");
  train_cmd->add_option("--order", order)->required();
  train_cmd->add_option("--level", level)->check(CLI::IsMember({"word", "char"}))->capture_default_str();
  train_cmd->add_option("--out", out_path)->required();

  // decode
  std::vector<std::string> posterior_paths;
  std::string strategy = "none";
  ModelPaths paths;
  std::string att_lm_path;
  DecodeFlags flags;
  auto* decode_cmd = app.add_subcommand("decode", "Decode posterior files into n-best lists");
  decode_cmd->add_option("--posteriors,posteriors", posterior_paths, "posterior TSV files")->required();
  decode_cmd->add_option("--lm-strategy", strategy)->check(CLI::IsMember(kStrategies))->capture_default_str();
  decode_cmd->add_option("--char-lm", paths.char_lm);
  decode_cmd->add_option("--word-lm", paths.word_lm);
  decode_cmd->add_option("--vocab", paths.vocab);
  decode_cmd->add_option("--att-lm", att_lm_path, "character n-gram used in the attention slot");
  add_decode_flags(decode_cmd, flags);
  decode_cmd->add_option("--out", out_path, "n-best output (default: stdout)");

  // bench
  std::string eval_set_path, configs_path;
  int repetitions = 3;
  auto* bench_cmd = app.add_subcommand("bench", "Time decoding under several LM configurations");
  bench_cmd->add_option("--eval-set", eval_set_path)->required();
  bench_cmd->add_option("--configs", configs_path)->required();
  bench_cmd->add_option("--repetitions", repetitions)->capture_default_str();
  add_decode_flags(bench_cmd, flags);
  bench_cmd->add_option("--out", out_path, "report TSV (default: stdout)");

  // synth-text
  std::size_t word_count = 1000, sentence_count = 1000;
  std::uint64_t seed = 1;
  auto* synth_text_cmd = app.add_subcommand("synth-text", "Generate a synthetic text corpus");
  synth_text_cmd->add_option("--words", word_count)->capture_default_str();
  synth_text_cmd->add_option("--sentences", sentence_count)->capture_default_str();
  synth_text_cmd->add_option("--seed", seed)->capture_default_str();
  synth_text_cmd->add_option("--out", out_path)->required();

  // synth
  std::string transcripts_path, out_dir;
  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize posterior files and an eval-set manifest");
  synth_cmd->add_option("--transcripts", transcripts_path, "one transcript per line")->required();
  synth_cmd->add_option("--corpus", corpus_path, "labels are the characters of this corpus")->required();
  synth_cmd->add_option("--out-dir", out_dir)->required();
  synth_cmd->add_option("--frames-per-label", synth.frames_per_label)->capture_default_str();
  synth_cmd->add_option("--peak", synth.peak)->capture_default_str();
  synth_cmd->add_option("--confusion-rate", synth.confusion_rate)->capture_default_str();
  synth_cmd->add_option("--seed", seed)->capture_default_str();

  // dump-trie
  auto* dump_cmd = app.add_subcommand("dump-trie", "Print the prefix tree of a vocabulary");
  dump_cmd->add_option("--vocab", vocab_path)->required();
  dump_cmd->add_option("--out", out_path);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*build_vocab_cmd) {
      const Corpus corpus = read_corpus(corpus_path);
      const Vocabulary vocab = build_vocab(corpus, max_size);
      save_vocab(vocab, out_path);
      out << "sentences " << corpus.sentences.size() << "\ttokens " << corpus.token_count() << "\tvocab "
          << vocab.spelled_count() << '\n';
    } else if (*train_cmd) {
      if (order < 1 || order > 5) throw UsageError("--order must be in [1, 5]");
      const Corpus corpus = read_corpus(corpus_path);
      if (corpus.empty()) throw DataError("empty corpus");
      if (parse_lm_level(level) == LmLevel::word) {
        if (vocab_path.empty()) throw UsageError("--vocab is required for --level word");
        const Vocabulary vocab = load_vocab(vocab_path);
        const NGramModel lm = train_word_ngram(corpus, order, vocab);
        lm.save(out_path);
        out << "tokens " << lm.training_tokens() << "\tvocab " << vocab.spelled_count() << '\n';
      } else {
        const LabelSet labels = LabelSet::from_characters(corpus.characters());
        const NGramModel lm = train_char_ngram(corpus, order, labels);
        lm.save(out_path);
        out << "tokens " << lm.training_tokens() << "\tlabels " << labels.size() << '\n';
      }
    } else if (*decode_cmd) {
      const DecodeConfig config = flags.decode_config();
      const FusionConfig fusion = flags.fusion_config();
      const Models models = load_models(strategy, paths);
      std::vector<PosteriorMatrix> inputs;
      for (const auto& p : posterior_paths) {
        std::optional<LabelSet> expected;
        if (!inputs.empty()) expected = inputs.front().label_set();
        inputs.push_back(load_posteriors(p, expected ? &*expected : nullptr));
      }
      const LabelSet labels = inputs.front().label_set();
      const auto scorer = make_scorer(strategy, models, labels, fusion);
      std::unique_ptr<CharLmScorer> att;
      if (!att_lm_path.empty()) att = std::make_unique<CharLmScorer>(std::make_shared<const NGramModel>(NGramModel::load(att_lm_path)));
      std::vector<NBest> results;
      for (const auto& m : inputs) results.push_back(decode(m, scorer.get(), att.get(), config));
      if (out_path.empty()) {
        write_nbest(results, out);
      } else {
        write_nbest(results, fs::path(out_path));
      }
    } else if (*bench_cmd) {
      const DecodeConfig config = flags.decode_config();
      const FusionConfig fusion = flags.fusion_config();
      const auto utterances = load_eval_set(eval_set_path);
      const LabelSet labels = utterances.front().posteriors.label_set();
      std::vector<BenchConfiguration> configs;
      for (const auto& line : load_bench_configs(configs_path)) {
        auto models = std::make_shared<const Models>(load_models(line.strategy, line.paths));
        BenchConfiguration c{line.name, line.strategy, models->vocab ? models->vocab->spelled_count() : 0, {}};
        if (line.strategy != "none")
          c.make_scorer = [strategy = line.strategy, models, labels, fusion] {
            return make_scorer(strategy, *models, labels, fusion);
          };
        configs.push_back(std::move(c));
      }
      const BenchReport report = run_bench(utterances, configs, config, repetitions);
      if (out_path.empty()) {
        report.write_tsv(out);
      } else {
        auto f = open_out(out_path);
        report.write_tsv(f);
      }
    } else if (*synth_text_cmd) {
      const SyntheticLanguage language(synth_words(word_count, seed), seed + 1);
      const Corpus corpus = language.corpus(sentence_count, seed + 2);
      auto f = open_out(out_path);
      for (const auto& s : corpus.sentences) f << join_words(s) << '\n';
    } else if (*synth_cmd) {
      const LabelSet labels = LabelSet::from_characters(read_corpus(corpus_path).characters());
      std::ifstream in(transcripts_path);
      if (!in) throw DataError("cannot open transcripts " + transcripts_path);
      fs::create_directories(out_dir);
      auto manifest = open_out((fs::path(out_dir) / "eval.tsv").string());
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        const Sentence words = tokenize_line(line);
        if (words.empty()) continue;
        char id[32];
        std::snprintf(id, sizeof id, "utt%05zu", n);
        SynthOptions o = synth;
        o.seed = seed + n;
        save_posteriors(synth_posteriors(words, labels, o), fs::path(out_dir) / (std::string(id) + ".tsv"));
        manifest << id << '\t' << id << ".tsv\t" << join_words(words) << '\n';
        ++n;
      }
      out << "utterances " << n << '\n';
    } else if (*dump_cmd) {
      const PrefixTree tree(load_vocab(vocab_path));
      if (out_path.empty()) {
        tree.dump(out);
      } else {
        auto f = open_out(out_path);
        tree.dump(f);
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace lafusion
