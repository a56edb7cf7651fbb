#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ldwb::text {

std::string_view trim(std::string_view s);

// Splits on runs of ASCII whitespace; no empty tokens.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercases ASCII and the Latin-1 supplement letters (U+00C0..U+00DE)
// encoded as UTF-8. Other code points pass through unchanged.
std::string to_lower(std::string_view s);

// Tokenizer used for BLEU: lowercase, split every ASCII punctuation character
// into its own token, then split on whitespace.
std::vector<std::string> bleu_tokenize(std::string_view s);

// Fixed-precision decimal rendering used in report tables.
std::string fixed(double value, int digits);

}  // namespace ldwb::text
