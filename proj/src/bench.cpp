#include "lafusion/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "lafusion/error.hpp"
#include "lafusion/metrics.hpp"

namespace lafusion {

Accuracy evaluate(const std::vector<EvalUtterance>& utterances, const LabelScorer* lm, const DecodeConfig& config) {
  Accuracy acc;
  if (utterances.empty()) return acc;
  for (const auto& u : utterances) {
    const NBest nbest = decode(u.posteriors, lm, nullptr, config);
    const Sentence hyp = nbest.hypotheses.empty() ? Sentence{} : nbest.hypotheses.front().words;
    acc.cer += char_error_rate(hyp, u.reference);
    acc.wer += word_error_rate(hyp, u.reference);
  }
  acc.cer /= static_cast<double>(utterances.size());
  acc.wer /= static_cast<double>(utterances.size());
  return acc;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

const BenchRow& BenchReport::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw DataError("no benchmark row named '" + name + "'");
}

double BenchReport::added_seconds(const std::string& name) const {
  for (const auto& r : rows)
    if (r.strategy == "none") return row(name).seconds - r.seconds;
  throw DataError("benchmark has no baseline row");
}

void BenchReport::write_tsv(std::ostream& out) const {
  out << "name\tstrategy\tvocab_size\tseconds\tratio\tcer\twer\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f\t%.4f\t%.6f\t%.6f", r.seconds, r.ratio, r.cer, r.wer);
    out << r.name << '\t' << r.strategy << '\t' << r.vocab_size << '\t' << buf << '\n';
  }
}

BenchReport run_bench(const std::vector<EvalUtterance>& utterances, const std::vector<BenchConfiguration>& configs,
                      const DecodeConfig& decode_config, int repetitions) {
  if (utterances.empty()) throw UsageError("benchmark needs at least one utterance");
  if (repetitions < 3) throw UsageError("benchmark needs at least 3 repetitions");
  const auto baseline = std::find_if(configs.begin(), configs.end(), [](const auto& c) { return c.strategy == "none"; });
  if (baseline == configs.end()) throw UsageError("benchmark needs a 'none' configuration as the baseline");

  BenchReport report;
  for (const auto& c : configs) report.rows.push_back({c.name, c.strategy, c.vocab_size, 0.0, 0.0, 0.0, 0.0, {}});

  std::vector<Sentence> hyps(utterances.size());
  for (int rep = 0; rep < repetitions; ++rep) {
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
      const auto& c = configs[ci];
      std::unique_ptr<LabelScorer> scorer = c.make_scorer ? c.make_scorer() : nullptr;
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t u = 0; u < utterances.size(); ++u) {
        const NBest nbest = decode(utterances[u].posteriors, scorer.get(), nullptr, decode_config);
        hyps[u] = nbest.hypotheses.empty() ? Sentence{} : nbest.hypotheses.front().words;
      }
      const auto t1 = std::chrono::steady_clock::now();
      report.rows[ci].samples.push_back(std::chrono::duration<double>(t1 - t0).count());
      if (rep == repetitions - 1) {
        double cer = 0.0, wer = 0.0;
        for (std::size_t u = 0; u < utterances.size(); ++u) {
          cer += char_error_rate(hyps[u], utterances[u].reference);
          wer += word_error_rate(hyps[u], utterances[u].reference);
        }
        report.rows[ci].cer = cer / static_cast<double>(utterances.size());
        report.rows[ci].wer = wer / static_cast<double>(utterances.size());
      }
    }
  }
  for (auto& r : report.rows) r.seconds = median(r.samples);
  const double base = report.rows[static_cast<std::size_t>(baseline - configs.begin())].seconds;
  for (auto& r : report.rows) r.ratio = r.seconds / base;
  return report;
}

}  // namespace lafusion
