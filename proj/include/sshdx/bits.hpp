#pragma once

// Bit-packed vectors and dense matrices over F2.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sshdx/error.hpp"

namespace sshdx {

class BitVec {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    BitVec() = default;
    explicit BitVec(std::size_t length) : length_(length), words_(word_count(length), 0) {}

    /// Parses a '0'/'1' string; index 0 is the leftmost character.
    static BitVec from_string(std::string_view s) {
        BitVec v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') {
                v.set(i);
            } else if (s[i] != '0') {
                throw ParameterError("bit string contains '" + std::string(1, s[i]) + "'");
            }
        }
        return v;
    }

    static BitVec from_indices(std::size_t length, const std::vector<std::size_t>& ones) {
        BitVec v(length);
        for (auto i : ones) v.set(i);
        return v;
    }

    /// Low `length` bits of `mask` (bit i of mask is coordinate i).
    static BitVec from_mask(std::size_t length, std::uint64_t mask) {
        BitVec v(length);
        if (length > 0) v.words_[0] = mask & low_mask(std::min<std::size_t>(length, 64));
        return v;
    }

    std::size_t size() const noexcept { return length_; }
    bool empty() const noexcept { return length_ == 0; }

    bool get(std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
    bool operator[](std::size_t i) const noexcept { return get(i); }
    void set(std::size_t i, bool value = true) noexcept {
        const Word bit = Word{1} << (i % kWordBits);
        if (value) {
            words_[i / kWordBits] |= bit;
        } else {
            words_[i / kWordBits] &= ~bit;
        }
    }
    void flip(std::size_t i) noexcept { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

    std::size_t weight() const noexcept {
        std::size_t w = 0;
        for (auto word : words_) w += static_cast<std::size_t>(std::popcount(word));
        return w;
    }
    bool is_zero() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
    }

    /// Index of the lowest set coordinate, or size() when zero.
    std::size_t first_one() const noexcept {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            if (words_[k] != 0) return k * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[k]));
        }
        return length_;
    }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < words_.size(); ++k) {
            Word w = words_[k];
            while (w != 0) {
                out.push_back(k * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    /// Bits 0..63 packed into one word; valid only when size() <= 64.
    std::uint64_t to_mask() const noexcept { return words_.empty() ? 0 : words_[0]; }

    BitVec& operator^=(const BitVec& o) {
        check_same(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
        return *this;
    }
    BitVec& operator&=(const BitVec& o) {
        check_same(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    BitVec& operator|=(const BitVec& o) {
        check_same(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
    friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
    friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }

    /// F2 inner product.
    bool dot(const BitVec& o) const {
        check_same(o);
        Word acc = 0;
        for (std::size_t k = 0; k < words_.size(); ++k) acc ^= words_[k] & o.words_[k];
        return std::popcount(acc) & 1;
    }

    /// |a + b| without materialising the sum.
    friend std::size_t xor_weight(const BitVec& a, const BitVec& b) {
        a.check_same(b);
        std::size_t w = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k) {
            w += static_cast<std::size_t>(std::popcount(a.words_[k] ^ b.words_[k]));
        }
        return w;
    }

    bool operator==(const BitVec& o) const noexcept = default;

    /// Lexicographic order on the printed string (coordinate 0 most significant, 0 < 1).
    friend bool lex_less(const BitVec& a, const BitVec& b) {
        a.check_same(b);
        for (std::size_t k = 0; k < a.words_.size(); ++k) {
            const Word diff = a.words_[k] ^ b.words_[k];
            if (diff != 0) {
                const auto i = static_cast<std::size_t>(std::countr_zero(diff));
                return ((b.words_[k] >> i) & 1u) != 0;
            }
        }
        return false;
    }

    std::string to_string() const {
        std::string s(length_, '0');
        for (std::size_t i = 0; i < length_; ++i) {
            if (get(i)) s[i] = '1';
        }
        return s;
    }

    const std::vector<Word>& words() const noexcept { return words_; }

    std::size_t hash() const noexcept {
        std::size_t h = std::hash<std::size_t>{}(length_);
        for (auto w : words_) h ^= std::hash<Word>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }

private:
    static std::size_t word_count(std::size_t n) { return (n + kWordBits - 1) / kWordBits; }
    static Word low_mask(std::size_t n) { return n >= 64 ? ~Word{0} : ((Word{1} << n) - 1); }

    void check_same(const BitVec& o) const {
        if (length_ != o.length_) {
            throw ShapeError("bit vector lengths differ: " + std::to_string(length_) + " vs " +
                             std::to_string(o.length_));
        }
    }

    std::size_t length_ = 0;
    std::vector<Word> words_;
};

struct BitVecHash {
    std::size_t operator()(const BitVec& v) const noexcept { return v.hash(); }
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    static BitMatrix from_rows(std::size_t cols, std::vector<BitVec> rows) {
        BitMatrix m(0, cols);
        for (auto& r : rows) m.append_row(std::move(r));
        return m;
    }

    static BitMatrix from_strings(const std::vector<std::string>& rows) {
        if (rows.empty()) return BitMatrix();
        BitMatrix m(0, rows.front().size());
        for (const auto& r : rows) m.append_row(BitVec::from_string(r));
        return m;
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return cols_; }

    bool get(std::size_t r, std::size_t c) const noexcept { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v = true) noexcept { rows_[r].set(c, v); }
    void flip(std::size_t r, std::size_t c) noexcept { rows_[r].flip(c); }

    const BitVec& row(std::size_t r) const noexcept { return rows_[r]; }
    BitVec& row(std::size_t r) noexcept { return rows_[r]; }
    const std::vector<BitVec>& row_data() const noexcept { return rows_; }

    void append_row(BitVec r) {
        if (r.size() != cols_) {
            throw ShapeError("row of length " + std::to_string(r.size()) + " appended to matrix with " +
                             std::to_string(cols_) + " columns");
        }
        rows_.push_back(std::move(r));
    }

    BitVec column(std::size_t c) const {
        BitVec v(rows());
        for (std::size_t r = 0; r < rows(); ++r) {
            if (get(r, c)) v.set(r);
        }
        return v;
    }

    BitMatrix transpose() const {
        BitMatrix t(cols_, rows());
        for (std::size_t r = 0; r < rows(); ++r) {
            for (auto c : rows_[r].support()) t.set(c, r);
        }
        return t;
    }

    /// M·v.
    BitVec apply(const BitVec& v) const {
        if (v.size() != cols_) {
            throw ShapeError("matrix with " + std::to_string(cols_) + " columns applied to vector of length " +
                             std::to_string(v.size()));
        }
        BitVec out(rows());
        for (std::size_t r = 0; r < rows(); ++r) {
            if (rows_[r].dot(v)) out.set(r);
        }
        return out;
    }

    friend BitMatrix operator*(const BitMatrix& a, const BitMatrix& b) {
        if (a.cols() != b.rows()) {
            throw ShapeError("cannot multiply " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
        }
        BitMatrix out(a.rows(), b.cols());
        for (std::size_t r = 0; r < a.rows(); ++r) {
            for (auto k : a.row(r).support()) out.rows_[r] ^= b.row(k);
        }
        return out;
    }

    bool is_zero() const noexcept {
        return std::all_of(rows_.begin(), rows_.end(), [](const BitVec& r) { return r.is_zero(); });
    }

    std::size_t row_weight(std::size_t r) const noexcept { return rows_[r].weight(); }
    std::vector<std::size_t> column_weights() const {
        std::vector<std::size_t> w(cols_, 0);
        for (const auto& r : rows_) {
            for (auto c : r.support()) ++w[c];
        }
        return w;
    }

    bool operator==(const BitMatrix& o) const noexcept = default;

private:
    std::size_t cols_ = 0;
    std::vector<BitVec> rows_;
};

/// Writes "f2mat <rows> <cols>" followed by one '0'/'1' line per row.
inline void write_f2mat(std::ostream& os, const BitMatrix& m) {
    os << "f2mat " << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) os << m.row(r).to_string() << '\n';
}

inline std::string to_f2mat(const BitMatrix& m) {
    std::ostringstream os;
    write_f2mat(os, m);
    return os.str();
}

/// Line-oriented reader shared by the text formats; tracks 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    /// Next line without its LF; throws on EOF, a CR, or an unterminated last line.
    std::string next(const std::string& expecting) {
        std::string line;
        if (!std::getline(is_, line)) throw ParseError(line_ + 1, "unexpected end of input, expected " + expecting);
        ++line_;
        if (!line.empty() && line.back() == '\r') throw ParseError(line_, "CR line ending");
        if (is_.eof()) throw ParseError(line_, "missing LF at end of line");
        return line;
    }

    bool at_end() {
        return is_.peek() == std::char_traits<char>::eof();
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::istream& is_;
    std::size_t line_ = 0;
};

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::size_t parse_count(const std::string& tok, std::size_t line) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
    }
    try {
        return static_cast<std::size_t>(std::stoull(tok));
    } catch (const std::exception&) {
        throw ParseError(line, "integer out of range: '" + tok + "'");
    }
}

inline BitMatrix read_f2mat(LineReader& in) {
    const auto header = in.next("f2mat header");
    const auto tok = split_ws(header);
    if (tok.size() != 3 || tok[0] != "f2mat") throw ParseError(in.line(), "expected 'f2mat <rows> <cols>'");
    const auto rows = parse_count(tok[1], in.line());
    const auto cols = parse_count(tok[2], in.line());
    BitMatrix m(0, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto line = in.next("matrix row " + std::to_string(r));
        if (line.size() != cols) {
            throw ParseError(in.line(), "row has " + std::to_string(line.size()) + " entries, expected " +
                                            std::to_string(cols));
        }
        for (char c : line) {
            if (c != '0' && c != '1') throw ParseError(in.line(), "matrix entry must be '0' or '1'");
        }
        m.append_row(BitVec::from_string(line));
    }
    return m;
}

inline BitMatrix parse_f2mat(const std::string& text) {
    std::istringstream is(text);
    LineReader in(is);
    return read_f2mat(in);
}

}  // namespace sshdx
