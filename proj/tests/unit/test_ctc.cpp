#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "lafusion/ctc.hpp"
#include "lafusion/error.hpp"
#include "oracles.hpp"

using namespace lafusion;

namespace {

PosteriorMatrix uniform_ab(std::size_t frames) {
  return PosteriorMatrix({"a", "b", "<blank>"}, std::vector<double>(3 * frames, 1.0 / 3));
}

double prefix_prob(const CtcPrefixScorer& ctc, const std::vector<Label>& prefix) {
  CtcState st = ctc.initial();
  double lp = 0.0;
  for (Label c : prefix) {
    lp = ctc.prefix_score(st, c);
    st = ctc.extend(st, c);
  }
  return std::exp(lp);
}

}  // namespace

TEST_CASE("two uniform frames over a, b and blank") {
  const PosteriorMatrix m = uniform_ab(2);
  const LabelSet labels = m.label_set();
  const CtcPrefixScorer ctc(m, labels);
  const Label a = labels.id("a"), b = labels.id("b");

  const CtcState empty = ctc.initial();
  const auto gb = ctc.forward_blank(empty);
  CHECK(gb[0] == doctest::Approx(1.0 / 3));
  CHECK(gb[1] == doctest::Approx(1.0 / 9));
  CHECK(std::exp(ctc.final_score(empty)) == doctest::Approx(1.0 / 9));

  CHECK(prefix_prob(ctc, {a}) == doctest::Approx(4.0 / 9));
  CHECK(prefix_prob(ctc, {a, b}) == doctest::Approx(1.0 / 9));
  CHECK(std::exp(ctc.final_score(ctc.extend(empty, a))) == doctest::Approx(3.0 / 9));
  CHECK(oracle::ctc_brute_force(m, labels, std::vector<Label>{a}) == doctest::Approx(4.0 / 9));
  CHECK(oracle::ctc_brute_force(m, labels, std::vector<Label>{}) == doctest::Approx(1.0));
  CHECK(oracle::ctc_brute_force(m, labels, std::vector<Label>{a, b, a}) == 0.0);

  // Longer than the input: impossible.
  CHECK(prefix_prob(ctc, {a, b, a}) == 0.0);
  // <space> has no column here and is never emitted.
  CHECK(prefix_prob(ctc, {labels.space()}) == 0.0);
  CHECK_THROWS_AS(ctc.prefix_score(empty, labels.eos()), DataError);
}

TEST_CASE("blank-only frames") {
  const PosteriorMatrix m({"a", "<blank>"}, {0.0, 1.0, 0.0, 1.0, 0.0, 1.0});
  const CtcPrefixScorer ctc(m, m.label_set());
  for (double v : ctc.forward_blank(ctc.initial())) CHECK(v == 1.0);
  CHECK(ctc.final_score(ctc.initial()) == 0.0);
}

TEST_CASE("repeated labels need an intervening blank") {
  const PosteriorMatrix m({"a", "<blank>"}, {0.9, 0.1, 0.9, 0.1});
  const LabelSet labels = m.label_set();
  const CtcPrefixScorer ctc(m, labels);
  const Label a = labels.id("a");
  // Two frames cannot produce "aa".
  CHECK(prefix_prob(ctc, {a, a}) == 0.0);
  const PosteriorMatrix m3({"a", "<blank>"}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  const CtcPrefixScorer ctc3(m3, labels);
  CHECK(prefix_prob(ctc3, {a, a}) == doctest::Approx(0.125));
  CHECK(oracle::ctc_brute_force(m3, labels, std::vector<Label>{a, a}) == doctest::Approx(0.125));
}

TEST_CASE("recursion matches enumeration on random matrices") {
  Rng rng(13);
  const std::vector<std::string> pool{"a", "b", "<space>"};
  for (int round = 0; round < 100; ++round) {
    const std::size_t frames = 1 + rng.below(5);
    std::vector<std::string> cols{"<blank>"};
    for (const auto& p : pool)
      if (rng.uniform() < 0.7) cols.push_back(p);
    const PosteriorMatrix m = gen::random_posteriors(rng, frames, cols);
    const LabelSet labels = m.label_set();
    const CtcPrefixScorer ctc(m, labels);

    std::vector<Label> prefix;
    CtcState st = ctc.initial();
    for (std::size_t len = 0; len <= frames; ++len) {
      double children = 0.0;
      for (Label c = 0; c < static_cast<Label>(labels.size()); ++c) {
        if (c == labels.eos()) continue;
        prefix.push_back(c);
        const double p = std::exp(ctc.prefix_score(st, c));
        CHECK(std::abs(p - oracle::ctc_brute_force(m, labels, prefix)) < 1e-9);
        prefix.pop_back();
        children += p;
      }
      const double here = std::exp(st.log_prefix);
      const double full = std::exp(ctc.final_score(st));
      CHECK(std::abs(full - oracle::ctc_brute_force(m, labels, prefix, true)) < 1e-9);
      CHECK(std::abs(here - children - full) < 1e-9);
      const Label next = static_cast<Label>(rng.below(labels.size() - 1));
      const Label pick = next >= labels.eos() ? next + 1 : next;
      const double before = here;
      st = ctc.extend(st, pick);
      prefix.push_back(pick);
      CHECK(std::exp(st.log_prefix) <= before + 1e-15);
    }
  }
}

TEST_CASE("long inputs do not underflow") {
  // 1500 two-frame segments alternating between a and b.
  const std::size_t segments = 1500;
  std::vector<double> values;
  for (std::size_t t = 0; t < 2 * segments; ++t) {
    const bool on_a = (t / 2) % 2 == 0;
    values.push_back(on_a ? 0.6 : 0.1);
    values.push_back(on_a ? 0.1 : 0.6);
    values.push_back(0.3);
  }
  const PosteriorMatrix m({"a", "b", "<blank>"}, values);
  const LabelSet labels = m.label_set();
  const CtcPrefixScorer ctc(m, labels);
  CtcState st = ctc.initial();
  double previous = 0.0;
  for (std::size_t k = 0; k < segments; ++k) {
    const Label c = labels.id(k % 2 == 0 ? "a" : "b");
    const double lp = ctc.prefix_score(st, c);
    REQUIRE(std::isfinite(lp));
    CHECK(lp <= previous);
    st = ctc.extend(st, c);
    CHECK(st.log_prefix == lp);
    previous = lp;
  }
  const double full = ctc.final_score(st);
  REQUIRE(std::isfinite(full));
  // At least the single best alignment, at most the prefix mass.
  CHECK(full >= 2.0 * segments * std::log(0.6) - 1e-6);
  CHECK(full <= previous);
}

TEST_CASE("block renormalization matches a log-domain recursion") {
  Rng rng(19);
  for (int round = 0; round < 20; ++round) {
    const std::size_t frames = 40 + rng.below(200);
    const PosteriorMatrix m = gen::random_posteriors(rng, frames, {"<blank>", "a", "b", "c", "<space>"});
    const LabelSet labels = m.label_set();
    const CtcPrefixScorer ctc(m, labels);
    CtcState st = ctc.initial();
    std::vector<Label> prefix;
    const std::size_t len = rng.below(frames);
    for (std::size_t k = 0; k < len; ++k) {
      const Label c = static_cast<Label>(rng.below(labels.size() - 1));
      const Label pick = c >= labels.eos() ? c + 1 : c;
      prefix.push_back(pick);
      const double lp = ctc.prefix_score(st, pick);
      st = ctc.extend(st, pick);
      if (k % 7 == 0 || k + 1 == len) {
        const auto [ref_prefix, ref_full] = oracle::ctc_log_domain(m, labels, prefix);
        if (std::isinf(ref_prefix))
          CHECK(lp == ref_prefix);
        else
          CHECK(lp == doctest::Approx(ref_prefix).epsilon(1e-10));
        if (std::isinf(ref_full))
          CHECK(ctc.final_score(st) == ref_full);
        else
          CHECK(ctc.final_score(st) == doctest::Approx(ref_full).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("posterior matrix validation") {
  CHECK_THROWS_AS(PosteriorMatrix({"a", "b"}, {0.5, 0.5}), DataError);
  CHECK_THROWS_AS(PosteriorMatrix({"a", "a", "<blank>"}, {0.2, 0.3, 0.5}), DataError);
  CHECK_THROWS_AS(PosteriorMatrix({"a", "<blank>"}, {0.5, 0.4}), DataError);
  CHECK_THROWS_AS(PosteriorMatrix({"a", "<blank>"}, {1.5, -0.5}), DataError);
  CHECK_THROWS_AS(PosteriorMatrix({"a", "<blank>"}, {}), DataError);
  CHECK_THROWS_AS(PosteriorMatrix({"a", "<blank>"}, {1.0}), DataError);
  const PosteriorMatrix m({"b", "<blank>", "a"}, {0.2, 0.3, 0.5});
  CHECK(m.blank_column() == 1);
  CHECK(m.label_set() == LabelSet::from_characters("ab"));
}
