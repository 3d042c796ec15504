#include "lafusion/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string format_score(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

PosteriorMatrix parse_posteriors(std::istream& in, const std::string& source, const LabelSet* expected) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  ++line_no;
  std::vector<std::string> columns = split_tabs(strip_cr(line));

  std::set<std::string> seen;
  bool has_blank = false;
  for (const auto& c : columns) {
    if (c.empty()) throw ParseError(source, line_no, "empty column label");
    if (!seen.insert(c).second) throw ParseError(source, line_no, "duplicate column label '" + c + "'");
    if (c == kBlankLabel) {
      has_blank = true;
      continue;
    }
    if (c == kEosLabel) throw ParseError(source, line_no, "<eos> is not a CTC label");
    if (c.size() != 1 && c != kSpaceLabel) throw ParseError(source, line_no, "unsupported label '" + c + "'");
    if (expected != nullptr && !expected->find(c))
      throw ParseError(source, line_no, "unknown label '" + c + "'");
  }
  if (!has_blank) throw ParseError(source, line_no, "header has no " + std::string(kBlankLabel) + " column");
  if (expected != nullptr) {
    std::vector<std::string> names;
    for (const auto& c : columns)
      if (c != kBlankLabel) names.push_back(c);
    if (!(LabelSet(std::move(names)) == *expected))
      throw ParseError(source, line_no, "header does not cover the expected label set");
  }

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != columns.size())
      throw ParseError(source, line_no,
                       "expected " + std::to_string(columns.size()) + " values, found " + std::to_string(fields.size()));
    double sum = 0.0;
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size())
        throw ParseError(source, line_no, "malformed probability '" + f + "'");
      if (!(v >= 0.0) || !std::isfinite(v)) throw ParseError(source, line_no, "probability out of range: " + f);
      sum += v;
      values.push_back(v);
    }
    if (std::abs(sum - 1.0) > PosteriorMatrix::kRowSumTolerance)
      throw ParseError(source, line_no, "row sums to " + std::to_string(sum));
  }
  if (values.empty()) throw ParseError(source, line_no, "no frames");
  return PosteriorMatrix(std::move(columns), std::move(values));
}

PosteriorMatrix load_posteriors(const std::filesystem::path& path, const LabelSet* expected) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open posteriors " + path.string());
  return parse_posteriors(in, path.string(), expected);
}

void write_posteriors(const PosteriorMatrix& m, std::ostream& out) {
  const auto& cols = m.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
  out << '\n';
  char buf[64];
  for (std::size_t t = 0; t < m.frames(); ++t) {
    const auto row = m.row(t);
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "\t" : "") << buf;
    }
    out << '\n';
  }
}

void save_posteriors(const PosteriorMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_posteriors(m, out);
}

std::string join_words(const Sentence& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

void write_nbest_block(const NBest& nbest, std::ostream& out) {
  std::size_t rank = 1;
  for (const auto& h : nbest.hypotheses) {
    out << rank++ << '\t' << format_score(h.score) << '\t' << format_score(h.ctc_score) << '\t'
        << format_score(h.att_score) << '\t' << format_score(h.lm_score) << '\t' << join_words(h.words) << '\n';
  }
}

void write_nbest(std::span<const NBest> results, std::ostream& out) {
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i) out << '\n';
    write_nbest_block(results[i], out);
  }
}

void write_nbest(std::span<const NBest> results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_nbest(results, out);
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace lafusion
