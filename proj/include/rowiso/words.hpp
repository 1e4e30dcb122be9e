// rowiso: words over the free semigroup on d generators.
//
// Conventions used throughout the library:
//   * generators are numbered 1..d; the empty word is the unit and prints "0"
//   * concat(u, v) is u followed by v, so an operator word V_{uv} = V_u V_v
//   * enumeration order is length-lex: shorter words first, ties broken
//     lexicographically with 1 < 2 < ... < d
//   * a word does not carry d; callers pair words with a context that does

#ifndef ROWISO_WORDS_HPP
#define ROWISO_WORDS_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rowiso/errors.hpp"

namespace rowiso {

class Word {
public:
    Word() = default;

    explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {
        for (int l : letters_)
            if (l < 1) throw ValidationError("Word: letters must be >= 1, got " + std::to_string(l));
    }

    static Word empty() { return Word{}; }

    std::size_t length() const { return letters_.size(); }
    bool is_empty() const { return letters_.empty(); }

    // 0-based position, values are 1-based generator indices.
    int letter(std::size_t i) const { return letters_.at(i); }
    const std::vector<int>& letters() const { return letters_; }

    int max_letter() const {
        int m = 0;
        for (int l : letters_) m = std::max(m, l);
        return m;
    }

    Word concat(const Word& rhs) const {
        std::vector<int> out = letters_;
        out.insert(out.end(), rhs.letters_.begin(), rhs.letters_.end());
        return Word{std::move(out)};
    }

    Word prepend(int l) const {
        std::vector<int> out;
        out.reserve(letters_.size() + 1);
        out.push_back(l);
        out.insert(out.end(), letters_.begin(), letters_.end());
        return Word{std::move(out)};
    }

    Word append(int l) const {
        std::vector<int> out = letters_;
        out.push_back(l);
        return Word{std::move(out)};
    }

    // Drops the first `n` letters.
    Word suffix_from(std::size_t n) const {
        if (n > letters_.size()) throw ValidationError("Word::suffix_from: index past end");
        return Word{std::vector<int>(letters_.begin() + static_cast<std::ptrdiff_t>(n), letters_.end())};
    }

    Word drop_last() const {
        if (letters_.empty()) throw ValidationError("Word::drop_last: empty word");
        return Word{std::vector<int>(letters_.begin(), letters_.end() - 1)};
    }

    bool operator==(const Word& rhs) const = default;

    // Length-lex order.
    std::strong_ordering operator<=>(const Word& rhs) const {
        if (letters_.size() != rhs.letters_.size())
            return letters_.size() <=> rhs.letters_.size();
        return std::lexicographical_compare_three_way(
            letters_.begin(), letters_.end(), rhs.letters_.begin(), rhs.letters_.end());
    }

    // "0" for the empty word; a digit string when every letter fits one digit,
    // comma-separated letters otherwise (needed once d > 9).
    std::string str() const {
        if (letters_.empty()) return "0";
        std::string out;
        if (max_letter() <= 9) {
            for (int l : letters_) out += static_cast<char>('0' + l);
        } else {
            for (std::size_t i = 0; i < letters_.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(letters_[i]);
            }
        }
        return out;
    }

    static Word parse(const std::string& s) {
        if (s.empty()) throw ParseError("Word::parse: empty string (the empty word is \"0\")");
        if (s == "0") return Word{};
        std::vector<int> letters;
        if (s.find(',') != std::string::npos) {
            std::size_t pos = 0;
            while (pos <= s.size()) {
                std::size_t next = s.find(',', pos);
                std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
                if (tok.empty()) throw ParseError("Word::parse: empty token in \"" + s + "\"");
                for (char c : tok)
                    if (c < '0' || c > '9') throw ParseError("Word::parse: bad character in \"" + s + "\"");
                letters.push_back(std::stoi(tok));
                if (next == std::string::npos) break;
                pos = next + 1;
            }
        } else {
            for (char c : s) {
                if (c < '1' || c > '9') throw ParseError("Word::parse: bad character in \"" + s + "\"");
                letters.push_back(c - '0');
            }
        }
        return Word{std::move(letters)};
    }

private:
    std::vector<int> letters_;
};

// Case analysis of the prefix relation between two words.  Exactly one case
// holds for any pair; `tail` is the extension alpha in the extending cases
// (sigma = omega.alpha resp. omega = sigma.alpha) and empty otherwise.
enum class PrefixCase { Equal, SigmaExtends, OmegaExtends, Incomparable };

struct PrefixRelation {
    PrefixCase kind = PrefixCase::Incomparable;
    Word tail;
};

inline PrefixRelation prefix_relation(const Word& sigma, const Word& omega) {
    const auto& s = sigma.letters();
    const auto& o = omega.letters();
    const std::size_t common = std::min(s.size(), o.size());
    for (std::size_t i = 0; i < common; ++i)
        if (s[i] != o[i]) return {PrefixCase::Incomparable, Word{}};
    if (s.size() == o.size()) return {PrefixCase::Equal, Word{}};
    if (s.size() > o.size()) return {PrefixCase::SigmaExtends, sigma.suffix_from(common)};
    return {PrefixCase::OmegaExtends, omega.suffix_from(common)};
}

// Number of words of length <= max_len over d generators (geometric sum).
// max_len < 0 yields 0.
inline std::size_t word_count(int d, int max_len) {
    if (d < 1) throw ValidationError("word_count: d must be >= 1");
    std::size_t total = 0, level = 1;
    for (int r = 0; r <= max_len; ++r) {
        total += level;
        if (level > (std::size_t{1} << 40) / static_cast<std::size_t>(d))
            throw ValidationError("word_count: enumeration too large");
        level *= static_cast<std::size_t>(d);
    }
    return total;
}

// All words of length <= max_len in length-lex order.
inline std::vector<Word> words_up_to(int d, int max_len) {
    const std::size_t total = word_count(d, max_len);
    if (total > (std::size_t{1} << 22))
        throw ValidationError("words_up_to: enumeration of " + std::to_string(total) + " words refused");
    std::vector<Word> out;
    out.reserve(total);
    out.emplace_back();
    std::size_t level_begin = 0;
    for (int r = 1; r <= max_len; ++r) {
        const std::size_t level_end = out.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (int l = 1; l <= d; ++l) out.push_back(out[i].append(l));
        level_begin = level_end;
    }
    return out;
}

// Position of w in the length-lex enumeration over d generators.
inline std::size_t word_rank(int d, const Word& w) {
    if (w.max_letter() > d) throw ValidationError("word_rank: letter exceeds d");
    const int r = static_cast<int>(w.length());
    std::size_t rank = word_count(d, r - 1);
    std::size_t within = 0;
    for (int i = 0; i < r; ++i)
        within = within * static_cast<std::size_t>(d) + static_cast<std::size_t>(w.letter(i) - 1);
    return rank + within;
}

}  // namespace rowiso

#endif  // ROWISO_WORDS_HPP
