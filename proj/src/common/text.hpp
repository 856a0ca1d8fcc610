#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace streamcart::text {

// Collapses every whitespace run to one ASCII space and trims both ends.
std::string normalize_whitespace(std::string_view s);

bool is_valid_utf8(std::string_view s);

bool is_word_byte(unsigned char c);

std::string ascii_lower(std::string_view s);

// Lowercased alphanumeric words, split on everything else.
std::vector<std::string> words(std::string_view s);

// Crude suffix stripping ("tested" -> "test", "batteries" -> "batteri").
std::string stem(std::string_view word);

bool is_stopword(std::string_view word);

// Stemmed, stopword-free keywords of a free-form question or field.
std::vector<std::string> keywords(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

uint64_t fnv1a64(std::string_view s);

std::string hex64(uint64_t v);

std::string trim(std::string_view s);

} // namespace streamcart::text
