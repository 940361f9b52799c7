#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cpt::text {

std::string to_lower(std::string_view s);

// Whitespace-delimited tokens, punctuation retained.
std::vector<std::string> whitespace_tokens(std::string_view s);

// Lowercased word tokens: maximal runs of [a-z0-9'-], punctuation stripped.
std::vector<std::string> words(std::string_view s);

// Sentence segmentation: split after '.', '!' or '?' followed by whitespace
// and an uppercase letter or digit, or at end of text. Pinned by tests.
std::vector<std::string> sentences(std::string_view s);

// Vowel-group heuristic with silent-e correction, minimum one per word.
int syllables_in_word(std::string_view word);
int syllable_count(std::string_view s);

// Case-insensitive whole-word match. `needle` may contain several words;
// word boundaries are non-alphanumeric characters (hyphen counts as a word
// character so "sha-256" matches as one token).
bool contains_word(std::string_view haystack, std::string_view needle);

}  // namespace cpt::text
