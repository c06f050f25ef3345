#pragma once

// Dense bit-packed linear algebra over GF(2).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qmargulis {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

inline constexpr std::size_t words_for(std::size_t bits) {
    return (bits + kWordBits - 1) / kWordBits;
}

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_(words_for(size), 0) {}

    static BitVector from_bits(const std::vector<int>& bits) {
        BitVector v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] & 1) v.set(i);
        return v;
    }

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
    void set(std::size_t i, bool value = true) {
        const Word mask = Word{1} << (i % kWordBits);
        if (value)
            words_[i / kWordBits] |= mask;
        else
            words_[i / kWordBits] &= ~mask;
    }
    void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }
    void clear() { std::fill(words_.begin(), words_.end(), Word{0}); }

    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](Word w) { return w != 0; });
    }
    bool none() const { return !any(); }
    std::size_t count() const {
        std::size_t c = 0;
        for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    /// Indices of set bits, ascending.
    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            Word w = words_[wi];
            while (w) {
                out.push_back(wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    BitVector& operator^=(const BitVector& other) {
        if (other.size_ != size_) throw ValidationError("BitVector xor: size mismatch");
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend bool operator==(const BitVector&, const BitVector&) = default;

    std::span<Word> words() { return words_; }
    std::span<const Word> words() const { return words_; }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

private:
    std::size_t size_ = 0;
    std::vector<Word> words_;
};

/// Row-major bit-packed binary matrix. Bits beyond `cols` in each row stay zero.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * words_for(cols), 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    static BitMatrix from_rows(const std::vector<std::vector<int>>& rows) {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        BitMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw ValidationError("from_rows: ragged input");
            for (std::size_t c = 0; c < cols; ++c)
                if (rows[r][c] & 1) m.set(r, c);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool value = true) {
        Word& w = data_[r * stride_ + c / kWordBits];
        const Word mask = Word{1} << (c % kWordBits);
        if (value)
            w |= mask;
        else
            w &= ~mask;
    }
    void flip(std::size_t r, std::size_t c) {
        data_[r * stride_ + c / kWordBits] ^= Word{1} << (c % kWordBits);
    }

    std::span<Word> row_words(std::size_t r) { return {data_.data() + r * stride_, stride_}; }
    std::span<const Word> row_words(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }

    void xor_row_into(std::size_t src, std::size_t dst, std::size_t from_word = 0) {
        Word* d = data_.data() + dst * stride_;
        const Word* s = data_.data() + src * stride_;
        for (std::size_t i = from_word; i < stride_; ++i) d[i] ^= s[i];
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                         data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                         data_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
    }

    BitVector row(std::size_t r) const {
        BitVector v(cols_);
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_, v.words().begin());
        return v;
    }
    void set_row(std::size_t r, const BitVector& v) {
        if (v.size() != cols_) throw ValidationError("set_row: length mismatch");
        std::copy(v.words().begin(), v.words().end(), data_.begin() + static_cast<std::ptrdiff_t>(r * stride_));
    }

    std::size_t row_weight(std::size_t r) const {
        std::size_t c = 0;
        for (Word w : row_words(r)) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    /// Sparse view: set column indices of each row.
    std::vector<std::vector<std::size_t>> row_supports() const {
        std::vector<std::vector<std::size_t>> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = row(r).support();
        return out;
    }
    /// Sparse view: set row indices of each column.
    std::vector<std::vector<std::size_t>> col_supports() const {
        std::vector<std::vector<std::size_t>> out(cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c : row(r).support()) out[c].push_back(r);
        return out;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (Word w : data_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](Word w) { return w == 0; });
    }

    BitMatrix transpose() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c : row(r).support()) t.set(c, r);
        return t;
    }

    /// Columns of `right` appended after the columns of `left`.
    static BitMatrix hconcat(const BitMatrix& left, const BitMatrix& right) {
        if (left.rows() != right.rows()) throw ValidationError("hconcat: row count mismatch");
        BitMatrix m(left.rows(), left.cols() + right.cols());
        for (std::size_t r = 0; r < left.rows(); ++r) {
            for (std::size_t c : left.row(r).support()) m.set(r, c);
            for (std::size_t c : right.row(r).support()) m.set(r, left.cols() + c);
        }
        return m;
    }

    BitMatrix select_rows(std::span<const std::size_t> order) const {
        BitMatrix m(order.size(), cols_);
        for (std::size_t i = 0; i < order.size(); ++i)
            std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(order[i] * stride_), stride_,
                        m.data_.begin() + static_cast<std::ptrdiff_t>(i * stride_));
        return m;
    }
    BitMatrix select_cols(std::span<const std::size_t> order) const {
        BitMatrix m(rows_, order.size());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t j = 0; j < order.size(); ++j)
                if (get(r, order[j])) m.set(r, j);
        return m;
    }

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> data_;
};

struct RrefResult {
    BitMatrix reduced;
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
};

/// Reduced row-echelon form. Pivot columns are restricted to [0, pivot_limit); columns at or
/// beyond the limit are carried along by the row operations (used for augmented systems).
inline RrefResult rref(BitMatrix m, std::size_t pivot_limit) {
    pivot_limit = std::min(pivot_limit, m.cols());
    RrefResult out;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < pivot_limit && rank < m.rows(); ++c) {
        const std::size_t wi = c / kWordBits;
        const Word mask = Word{1} << (c % kWordBits);
        std::size_t pivot_row = m.rows();
        for (std::size_t r = rank; r < m.rows(); ++r) {
            if (m.row_words(r)[wi] & mask) {
                pivot_row = r;
                break;
            }
        }
        if (pivot_row == m.rows()) continue;
        m.swap_rows(rank, pivot_row);
        for (std::size_t r = 0; r < m.rows(); ++r)
            if (r != rank && (m.row_words(r)[wi] & mask)) m.xor_row_into(rank, r, wi);
        out.pivots.push_back(c);
        ++rank;
    }
    out.rank = rank;
    out.reduced = std::move(m);
    return out;
}

inline RrefResult rref(const BitMatrix& m) { return rref(m, m.cols()); }

inline std::size_t rank(const BitMatrix& m) { return rref(m).rank; }

inline BitVector mat_vec(const BitMatrix& m, const BitVector& x) {
    if (x.size() != m.cols()) throw ValidationError("mat_vec: vector length does not match column count");
    BitVector y(m.rows());
    const auto xw = x.words();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto rw = m.row_words(r);
        Word acc = 0;
        for (std::size_t i = 0; i < rw.size(); ++i) acc ^= rw[i] & xw[i];
        if (std::popcount(acc) & 1) y.set(r);
    }
    return y;
}

inline BitMatrix mat_mat(const BitMatrix& a, const BitMatrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("mat_mat: inner dimensions differ");
    BitMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = out.row_words(r);
        for (std::size_t k : a.row(r).support()) {
            const auto src = b.row_words(k);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
        }
    }
    return out;
}

/// Any x with M x = s, supported on pivot columns (free variables zero); nullopt if infeasible.
inline std::optional<BitVector> solve(const BitMatrix& m, const BitVector& s) {
    if (s.size() != m.rows()) throw ValidationError("solve: syndrome length does not match row count");
    BitMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c : m.row(r).support()) aug.set(r, c);
        if (s.get(r)) aug.set(r, m.cols());
    }
    const RrefResult red = rref(std::move(aug), m.cols());
    for (std::size_t r = red.rank; r < m.rows(); ++r)
        if (red.reduced.get(r, m.cols())) return std::nullopt;
    BitVector x(m.cols());
    for (std::size_t i = 0; i < red.rank; ++i)
        if (red.reduced.get(i, m.cols())) x.set(red.pivots[i]);
    return x;
}

/// Membership by rank comparison.
inline bool in_rowspace(const BitMatrix& m, const BitVector& v) {
    if (v.size() != m.cols()) throw ValidationError("in_rowspace: vector length does not match column count");
    BitMatrix ext(m.rows() + 1, m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) ext.set_row(r, m.row(r));
    ext.set_row(m.rows(), v);
    return rank(ext) == rank(m);
}

/// Precomputed echelon basis for repeated row-space membership queries.
class RowSpace {
public:
    explicit RowSpace(const BitMatrix& m) : cols_(m.cols()) {
        RrefResult red = rref(m);
        pivots_ = std::move(red.pivots);
        basis_ = red.reduced.select_rows(iota(pivots_.size()));
    }

    std::size_t rank() const { return pivots_.size(); }

    bool contains(const BitVector& v) const {
        if (v.size() != cols_) throw ValidationError("RowSpace::contains: length mismatch");
        BitVector w = v;
        auto ww = w.words();
        for (std::size_t i = 0; i < pivots_.size(); ++i) {
            const std::size_t c = pivots_[i];
            if ((ww[c / kWordBits] >> (c % kWordBits)) & 1U) {
                const auto bw = basis_.row_words(i);
                for (std::size_t k = c / kWordBits; k < ww.size(); ++k) ww[k] ^= bw[k];
            }
        }
        return w.none();
    }

private:
    static std::vector<std::size_t> iota(std::size_t n) {
        std::vector<std::size_t> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = i;
        return v;
    }

    std::size_t cols_ = 0;
    std::vector<std::size_t> pivots_;
    BitMatrix basis_;
};

/// Basis of {x : M x = 0}, one vector per free column.
inline std::vector<BitVector> kernel_basis(const BitMatrix& m) {
    const RrefResult red = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : red.pivots) is_pivot[c] = true;
    std::vector<BitVector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVector x(m.cols());
        x.set(f);
        for (std::size_t i = 0; i < red.rank; ++i)
            if (red.reduced.get(i, f)) x.set(red.pivots[i]);
        basis.push_back(std::move(x));
    }
    return basis;
}

} // namespace qmargulis
