#include "cpt/text.hpp"

#include <algorithm>
#include <cctype>

namespace cpt::text {

namespace {

inline bool is_word_char(char c) {
    const unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || c == '\'' || c == '-';
}

inline bool is_vowel(char c) {
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
            return true;
        default:
            return false;
    }
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_word_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> sentences(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c != '.' && c != '!' && c != '?') continue;
        // Consume closing quotes/brackets after the terminator.
        std::size_t j = i + 1;
        while (j < s.size() && (s[j] == '"' || s[j] == '\'' || s[j] == ')' || s[j] == ']')) ++j;
        if (j >= s.size()) {
            i = j;
            break;
        }
        if (!std::isspace(static_cast<unsigned char>(s[j]))) continue;
        std::size_t k = j;
        while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
        if (k < s.size() && (std::isupper(static_cast<unsigned char>(s[k])) ||
                             std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '-')) {
            out.emplace_back(s.substr(start, j - start));
            start = k;
            i = k - 1;
        }
    }
    if (start < s.size()) {
        std::string_view tail = s.substr(start);
        // Trim trailing whitespace.
        std::size_t end = tail.size();
        while (end > 0 && std::isspace(static_cast<unsigned char>(tail[end - 1]))) --end;
        if (end > 0) out.emplace_back(tail.substr(0, end));
    }
    return out;
}

int syllables_in_word(std::string_view word) {
    std::string w;
    w.reserve(word.size());
    for (char c : word) {
        const unsigned char u = static_cast<unsigned char>(c);
        if (std::isalpha(u)) w.push_back(static_cast<char>(std::tolower(u)));
    }
    if (w.empty()) return 0;

    int groups = 0;
    bool in_group = false;
    for (char c : w) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    // Silent final e: "mate" -> 1, but keep "-le" endings ("table" -> 2)
    // and single-group words ("the" -> 1).
    if (groups > 1 && w.size() >= 2 && w.back() == 'e' && !is_vowel(w[w.size() - 2]) &&
        !(w.size() >= 3 && w[w.size() - 2] == 'l' && !is_vowel(w[w.size() - 3]))) {
        --groups;
    }
    return std::max(groups, 1);
}

int syllable_count(std::string_view s) {
    int total = 0;
    for (const auto& w : words(s)) total += syllables_in_word(w);
    return total;
}

bool contains_word(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return false;
    const std::string h = to_lower(haystack);
    const std::string n = to_lower(needle);
    std::size_t pos = 0;
    while ((pos = h.find(n, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(h[pos - 1]);
        const std::size_t end = pos + n.size();
        const bool right_ok = end >= h.size() || !is_word_char(h[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace cpt::text
