#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <vector>

#include "field.hpp"

namespace agtensor {

/// Dense vector over a prime field.  Entries are canonical residues.
class Vector {
public:
    Vector(const PrimeField& field, std::size_t size)
        : field_(field), v_(size, 0) {}
    Vector(const PrimeField& field, std::vector<std::uint32_t> values)
        : field_(field), v_(std::move(values)) {
        for (auto x : v_)
            if (x >= field_.modulus())
                throw std::invalid_argument("Vector: entry out of range");
    }

    const PrimeField& field() const { return field_; }
    std::size_t size() const { return v_.size(); }

    std::uint32_t get(std::size_t i) const { return v_.at(i); }
    void set(std::size_t i, std::uint32_t value) {
        if (value >= field_.modulus())
            throw std::invalid_argument("Vector: entry out of range");
        v_.at(i) = value;
    }

    FieldElement at(std::size_t i) const { return FieldElement(field_, v_.at(i)); }
    const std::vector<std::uint32_t>& raw() const { return v_; }
    std::vector<std::uint32_t>& raw() { return v_; }

    friend bool operator==(const Vector& a, const Vector& b) {
        return a.field_ == b.field_ && a.v_ == b.v_;
    }
    friend bool operator!=(const Vector& a, const Vector& b) { return !(a == b); }

    std::int64_t weight() const {
        std::int64_t w = 0;
        for (auto x : v_) w += (x != 0);
        return w;
    }

    std::int64_t distance_to(const Vector& other) const {
        check_compatible(other);
        std::int64_t d = 0;
        for (std::size_t i = 0; i < v_.size(); ++i) d += (v_[i] != other.v_[i]);
        return d;
    }

    void add_scaled(const Vector& other, std::uint32_t factor) {
        check_compatible(other);
        for (std::size_t i = 0; i < v_.size(); ++i)
            v_[i] = field_.add(v_[i], field_.mul(factor, other.v_[i]));
    }

private:
    void check_compatible(const Vector& other) const {
        if (field_ != other.field_ || v_.size() != other.v_.size())
            throw std::invalid_argument("Vector: size or field mismatch");
    }

    PrimeField field_;
    std::vector<std::uint32_t> v_;
};

/// Dense row-major matrix over a prime field.
class Matrix {
public:
    Matrix(const PrimeField& field, std::size_t rows, std::size_t cols)
        : field_(field), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    Matrix(const PrimeField& field,
           std::initializer_list<std::initializer_list<std::uint32_t>> rows)
        : field_(field), rows_(rows.size()), cols_(0) {
        for (const auto& r : rows) cols_ = std::max(cols_, r.size());
        a_.assign(rows_ * cols_, 0);
        std::size_t i = 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged rows");
            std::size_t j = 0;
            for (auto x : r) set(i, j++, x % field_.modulus());
            ++i;
        }
    }

    const PrimeField& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint32_t get(std::size_t r, std::size_t c) const {
        check_index(r, c);
        return a_[r * cols_ + c];
    }
    void set(std::size_t r, std::size_t c, std::uint32_t value) {
        check_index(r, c);
        if (value >= field_.modulus())
            throw std::invalid_argument("Matrix: entry out of range");
        a_[r * cols_ + c] = value;
    }

    const std::uint32_t* row_ptr(std::size_t r) const { return a_.data() + r * cols_; }
    std::uint32_t* row_ptr(std::size_t r) { return a_.data() + r * cols_; }

    Vector row(std::size_t r) const {
        Vector v(field_, cols_);
        for (std::size_t c = 0; c < cols_; ++c) v.set(c, get(r, c));
        return v;
    }

    void set_row(std::size_t r, const Vector& v) {
        if (v.size() != cols_ || v.field() != field_)
            throw std::invalid_argument("Matrix: row size or field mismatch");
        for (std::size_t c = 0; c < cols_; ++c) a_[r * cols_ + c] = v.get(c);
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
               a.a_ == b.a_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    static Matrix identity(const PrimeField& field, std::size_t n) {
        Matrix m(field, n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    Matrix multiplied_by(const Matrix& other) const {
        if (field_ != other.field_ || cols_ != other.rows_)
            throw std::invalid_argument("Matrix: shape or field mismatch in product");
        Matrix out(field_, rows_, other.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                std::uint32_t aik = get(i, k);
                if (aik == 0) continue;
                const std::uint32_t* src = other.row_ptr(k);
                std::uint32_t* dst = out.row_ptr(i);
                for (std::size_t j = 0; j < other.cols_; ++j)
                    dst[j] = field_.add(dst[j], field_.mul(aik, src[j]));
            }
        return out;
    }

    Vector apply(const Vector& x) const {
        if (x.field() != field_ || x.size() != cols_)
            throw std::invalid_argument("Matrix: vector size or field mismatch");
        Vector out(field_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            std::uint64_t acc = 0;
            const std::uint32_t* src = row_ptr(i);
            for (std::size_t j = 0; j < cols_; ++j)
                acc += std::uint64_t(src[j]) * x.get(j);
            out.set(i, field_.reduce(acc));
        }
        return out;
    }

    Matrix selected_columns(const std::vector<std::int64_t>& cols) const {
        Matrix out(field_, rows_, cols.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) {
                auto c = cols[j];
                if (c < 0 || std::size_t(c) >= cols_)
                    throw std::invalid_argument("Matrix: column index out of range");
                out.set(i, j, get(i, std::size_t(c)));
            }
        return out;
    }

private:
    void check_index(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_)
            throw std::invalid_argument("Matrix: index out of range");
    }

    PrimeField field_;
    std::size_t rows_, cols_;
    std::vector<std::uint32_t> a_;
};

struct RrefResult {
    Matrix reduced;
    std::size_t rank;
    std::vector<std::size_t> pivot_cols;
};

/// Reduced row echelon form with a fixed pivoting rule: pivots are chosen in
/// column order, taking the first row (lowest index) with a nonzero entry.
/// The output is therefore a pure function of the input, independent of
/// platform and scheduling.
inline RrefResult rref(const Matrix& m) {
    Matrix a = m;
    const PrimeField& f = a.field();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t sel = r;
        while (sel < a.rows() && a.get(sel, c) == 0) ++sel;
        if (sel == a.rows()) continue;
        if (sel != r)
            for (std::size_t j = 0; j < a.cols(); ++j) {
                std::uint32_t t = a.get(r, j);
                a.set(r, j, a.get(sel, j));
                a.set(sel, j, t);
            }
        std::uint32_t piv_inv = f.inv(a.get(r, c));
        {
            std::uint32_t* pr = a.row_ptr(r);
            for (std::size_t j = c; j < a.cols(); ++j) pr[j] = f.mul(pr[j], piv_inv);
        }
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == r) continue;
            std::uint32_t factor = a.get(i, c);
            if (factor == 0) continue;
            std::uint32_t neg = f.neg(factor);
            const std::uint32_t* pr = a.row_ptr(r);
            std::uint32_t* pi = a.row_ptr(i);
            for (std::size_t j = c; j < a.cols(); ++j)
                pi[j] = f.add(pi[j], f.mul(neg, pr[j]));
        }
        pivots.push_back(c);
        ++r;
    }
    return RrefResult{std::move(a), pivots.size(), std::move(pivots)};
}

/// Basis of the right kernel {x : Mx = 0}, one vector per free column in
/// ascending column order.
inline std::vector<Vector> kernel(const Matrix& m) {
    RrefResult rr = rref(m);
    const PrimeField& f = m.field();
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : rr.pivot_cols) is_pivot[c] = true;
    std::vector<Vector> basis;
    for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
        if (is_pivot[free_col]) continue;
        Vector v(f, m.cols());
        v.set(free_col, 1);
        for (std::size_t j = 0; j < rr.pivot_cols.size(); ++j)
            v.set(rr.pivot_cols[j], f.neg(rr.reduced.get(j, free_col)));
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One solution of Ax = b if the system is consistent, with all free
/// variables set to zero (canonical choice), otherwise nullopt.
inline std::optional<Vector> solve(const Matrix& a, const Vector& b) {
    if (b.size() != a.rows() || b.field() != a.field())
        throw std::invalid_argument("solve: size or field mismatch");
    Matrix aug(a.field(), a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug.set(i, j, a.get(i, j));
        aug.set(i, a.cols(), b.get(i));
    }
    RrefResult rr = rref(aug);
    Vector x(a.field(), a.cols());
    for (std::size_t j = 0; j < rr.pivot_cols.size(); ++j) {
        if (rr.pivot_cols[j] == a.cols()) return std::nullopt;  // row [0 .. 0 | 1]
        x.set(rr.pivot_cols[j], rr.reduced.get(j, a.cols()));
    }
    return x;
}

/// Whether v lies in the row space of m.
inline bool in_row_space(const Matrix& m, const Vector& v) {
    if (v.size() != m.cols() || v.field() != m.field())
        throw std::invalid_argument("in_row_space: size or field mismatch");
    RrefResult rr = rref(m);
    // A row-space element is determined by its values at the pivot columns.
    const PrimeField& f = m.field();
    Vector candidate(f, m.cols());
    for (std::size_t j = 0; j < rr.pivot_cols.size(); ++j)
        candidate.add_scaled(rr.reduced.row(j), v.get(rr.pivot_cols[j]));
    return candidate == v;
}

}  // namespace agtensor
