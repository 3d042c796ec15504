#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "lafusion/cli.hpp"
#include "lafusion/io.hpp"
#include "lafusion/ngram.hpp"
#include "lafusion/synth.hpp"
#include "lafusion/vocab.hpp"

using namespace lafusion;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lafusion");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;

  Workspace() {
    dir = fs::temp_directory_path() / ("lafusion_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "corpus.txt") << "a cat eats\nthe cat eats a rat\na rat eats\nthe rat\n";
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("train, decode and inspect through the command line") {
  Workspace w;
  Run r = cli({"build-vocab", "--corpus", w.path("corpus.txt"), "--max-size", "10", "--out", w.path("vocab.txt")});
  REQUIRE(r.code == 0);
  CHECK(slurp(w.path("vocab.txt")) == "a\ncat\neats\nrat\nthe\n");

  r = cli({"train-lm", "--corpus", w.path("corpus.txt"), "--vocab", w.path("vocab.txt"), "--order", "2", "--level",
           "word", "--out", w.path("word.lm")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("tokens 17") != std::string::npos);
  CHECK(r.out.find("vocab 5") != std::string::npos);
  const Corpus corpus = read_corpus(w.path("corpus.txt"));
  const NGramModel in_process = train_word_ngram(corpus, 2, load_vocab(w.path("vocab.txt")));
  const NGramModel loaded = NGramModel::load(w.path("word.lm"));
  const std::vector<Token> ctx{0};
  CHECK(loaded.full_distribution(ctx) == in_process.full_distribution(ctx));

  r = cli({"train-lm", "--corpus", w.path("corpus.txt"), "--order", "4", "--level", "char", "--out",
           w.path("char.lm")});
  REQUIRE(r.code == 0);
  CHECK(NGramModel::load(w.path("char.lm")).token_names() ==
        LabelSet::from_characters(corpus.characters()).names());

  r = cli({"train-lm", "--corpus", w.path("corpus.txt"), "--vocab", w.path("vocab.txt"), "--order", "0", "--out",
           w.path("bad.lm")});
  CHECK(r.code == 1);

  // Noiseless posteriors for one sentence.
  const LabelSet labels = LabelSet::from_characters(corpus.characters());
  save_posteriors(synth_posteriors(Sentence{"the", "cat", "eats"}, labels, {2, 1.0, 0, 0.0}), w.dir / "u1.tsv");
  save_posteriors(synth_posteriors(Sentence{"a", "rat"}, labels, {2, 0.8, 1, 0.0}), w.dir / "u2.tsv");

  r = cli({"decode", w.path("u1.tsv"), "--lm-strategy", "none"});
  REQUIRE(r.code == 0);
  CHECK(r.out.substr(0, 2) == "1\t");
  CHECK(r.out.find("\tthe cat eats\n") != std::string::npos);

  for (const std::string strategy : {"char", "multilevel", "lookahead"}) {
    r = cli({"decode", "--posteriors", w.path("u1.tsv"), "--posteriors", w.path("u2.tsv"), "--lm-strategy", strategy,
             "--char-lm", w.path("char.lm"), "--word-lm", w.path("word.lm"), "--vocab", w.path("vocab.txt"),
             "--n-best", "2", "--out", w.path("nbest_" + strategy + ".txt")});
    REQUIRE(r.code == 0);
    const std::string text = slurp(w.path("nbest_" + strategy + ".txt"));
    CHECK(text.find("the cat eats\n") != std::string::npos);
    CHECK(text.find("\n\n1\t") != std::string::npos);
  }

  r = cli({"decode", w.path("u1.tsv"), "--lm-strategy", "lookahead", "--word-lm", w.path("word.lm")});
  CHECK(r.code == 1);
  CHECK(r.err.find("--vocab") != std::string::npos);
  r = cli({"decode", w.path("u1.tsv"), "--lm-strategy", "multilevel", "--word-lm", w.path("word.lm"), "--vocab",
           w.path("vocab.txt")});
  CHECK(r.code == 1);
  CHECK(r.err.find("--char-lm") != std::string::npos);
  r = cli({"decode", w.path("u1.tsv"), "--lm-strategy", "bogus"});
  CHECK(r.code == 1);
  r = cli({"decode", w.path("u1.tsv"), "--lambda", "2"});
  CHECK(r.code == 1);

  std::ofstream(w.path("bad.tsv")) << "a\t<blank>\n0.5\t0.4\n";
  r = cli({"decode", w.path("bad.tsv")});
  CHECK(r.code == 2);
  CHECK(r.err.find(":2") != std::string::npos);
  r = cli({"decode", w.path("missing.tsv")});
  CHECK(r.code == 2);

  r = cli({"dump-trie", "--vocab", w.path("vocab.txt")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("cat\t1\t1\t1\n") != std::string::npos);

  r = cli({});
  CHECK(r.code == 1);
  r = cli({"--help"});
  CHECK(r.code == 0);
}

TEST_CASE("synthesize an eval set and benchmark it") {
  Workspace w;
  Run r = cli({"synth-text", "--words", "30", "--sentences", "200", "--seed", "5", "--out", w.path("text.txt")});
  REQUIRE(r.code == 0);
  r = cli({"synth", "--transcripts", w.path("text.txt"), "--corpus", w.path("text.txt"), "--out-dir",
           w.path("eval"), "--peak", "0.7", "--confusion-rate", "0.1", "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "utterances 200\n");
  CHECK(fs::exists(w.dir / "eval" / "utt00000.tsv"));

  // Keep the benchmark small.
  {
    std::ifstream in(w.dir / "eval" / "eval.tsv");
    std::ofstream out(w.dir / "eval" / "small.tsv");
    std::string line;
    for (int i = 0; i < 4 && std::getline(in, line); ++i) out << line << '\n';
  }
  REQUIRE(cli({"build-vocab", "--corpus", w.path("text.txt"), "--out", w.path("vocab.txt")}).code == 0);
  REQUIRE(cli({"train-lm", "--corpus", w.path("text.txt"), "--vocab", w.path("vocab.txt"), "--order", "2", "--out",
               w.path("word.lm")})
              .code == 0);
  REQUIRE(cli({"train-lm", "--corpus", w.path("text.txt"), "--level", "char", "--order", "3", "--out",
               w.path("char.lm")})
              .code == 0);
  std::ofstream(w.path("configs.tsv")) << "# name\tstrategy\tmodels\n"
                                       << "none\tnone\n"
                                       << "ml\tmultilevel\tchar_lm=char.lm\tword_lm=word.lm\tvocab=vocab.txt\n"
                                       << "la\tlookahead\tword_lm=word.lm\tvocab=vocab.txt\n";
  r = cli({"bench", "--eval-set", w.path("eval/small.tsv"), "--configs", w.path("configs.tsv"), "--repetitions",
           "3", "--beam-width", "4", "--out", w.path("report.tsv")});
  REQUIRE(r.code == 0);
  const std::string report = slurp(w.path("report.tsv"));
  CHECK(report.find("none\tnone\t0\t") != std::string::npos);
  CHECK(report.find("\nla\tlookahead\t30\t") != std::string::npos);

  std::ofstream(w.path("bad_configs.tsv")) << "la\tlookahead\tword_lm=word.lm\n";
  r = cli({"bench", "--eval-set", w.path("eval/small.tsv"), "--configs", w.path("bad_configs.tsv")});
  CHECK(r.code == 1);
  r = cli({"bench", "--eval-set", w.path("eval/small.tsv"), "--configs", w.path("configs.tsv"), "--repetitions",
           "2"});
  CHECK(r.code == 1);
}
