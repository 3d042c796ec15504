#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lafusion/ctc.hpp"
#include "lafusion/decoder.hpp"

namespace lafusion {

// Tab-separated text: a header of column labels (one of them <blank>), then
// one row of probabilities per frame. When `expected` is given, the columns
// other than <blank> must be exactly its labels minus <eos>.
PosteriorMatrix load_posteriors(const std::filesystem::path& path, const LabelSet* expected = nullptr);
PosteriorMatrix parse_posteriors(std::istream& in, const std::string& source, const LabelSet* expected = nullptr);

// Values are written with 17 significant digits, so a reload is exact.
void save_posteriors(const PosteriorMatrix& m, const std::filesystem::path& path);
void write_posteriors(const PosteriorMatrix& m, std::ostream& out);

// "rank TAB score TAB ctc TAB att TAB lm TAB text", six decimals.
void write_nbest_block(const NBest& nbest, std::ostream& out);
// One block per utterance, blocks separated by blank lines.
void write_nbest(std::span<const NBest> results, std::ostream& out);
void write_nbest(std::span<const NBest> results, const std::filesystem::path& path);

std::string join_words(const Sentence& words);

}  // namespace lafusion
