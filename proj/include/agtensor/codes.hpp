#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace agtensor {

/// Strictly increasing coordinate indices into a parent vector of known
/// length.  Restrictions of codes and grids always go through this type so
/// "which coordinates" is never implicit.
class CoordinateSet {
public:
    CoordinateSet(std::int64_t parent_length, std::vector<std::int64_t> indices)
        : parent_length_(parent_length), indices_(std::move(indices)) {
        if (parent_length_ < 0)
            throw std::invalid_argument("CoordinateSet: negative parent length");
        std::int64_t prev = -1;
        for (auto i : indices_) {
            if (i <= prev || i >= parent_length_)
                throw std::invalid_argument(
                    "CoordinateSet: indices must be strictly increasing and in range");
            prev = i;
        }
    }

    static CoordinateSet full(std::int64_t n) {
        std::vector<std::int64_t> all(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) all[std::size_t(i)] = i;
        return CoordinateSet(n, std::move(all));
    }

    std::int64_t parent_length() const { return parent_length_; }
    std::size_t size() const { return indices_.size(); }
    std::int64_t at(std::size_t i) const { return indices_.at(i); }
    const std::vector<std::int64_t>& indices() const { return indices_; }

private:
    std::int64_t parent_length_;
    std::vector<std::int64_t> indices_;
};

/// Linear code over GF(q), stored as a canonical full-rank generator in
/// reduced row echelon form.  Two codes are equal iff they have the same row
/// space, which with the canonical form is plain matrix equality.
class LinearCode {
public:
    LinearCode(const PrimeField& field, std::size_t length, const Matrix& spanning_rows)
        : field_(field), length_(length), gen_(field, 0, length) {
        if (spanning_rows.cols() != length || spanning_rows.field() != field)
            throw std::invalid_argument("LinearCode: generator shape or field mismatch");
        RrefResult rr = rref(spanning_rows);
        Matrix g(field, rr.rank, length);
        for (std::size_t i = 0; i < rr.rank; ++i)
            for (std::size_t j = 0; j < length; ++j) g.set(i, j, rr.reduced.get(i, j));
        gen_ = std::move(g);
        pivots_ = std::move(rr.pivot_cols);
    }

    static LinearCode zero(const PrimeField& field, std::size_t length) {
        return LinearCode(field, length, Matrix(field, 0, length));
    }

    static LinearCode full_space(const PrimeField& field, std::size_t length) {
        return LinearCode(field, length, Matrix::identity(field, length));
    }

    const PrimeField& field() const { return field_; }
    std::size_t length() const { return length_; }
    std::size_t dimension() const { return gen_.rows(); }
    const Matrix& generator() const { return gen_; }
    const std::vector<std::size_t>& pivot_columns() const { return pivots_; }

    /// Certified lower bound on the minimum distance, when one is known from
    /// the construction (set by the code-family builders).
    std::optional<std::int64_t> distance_lower_bound() const { return distance_lb_; }
    LinearCode& set_distance_lower_bound(std::int64_t d) {
        distance_lb_ = d;
        return *this;
    }

    /// Membership test in O(dim * length): a row-space element is determined
    /// by its values at the pivot columns of the canonical generator.
    bool contains(const Vector& v) const {
        if (v.size() != length_ || v.field() != field_)
            throw std::invalid_argument("LinearCode: vector size or field mismatch");
        Vector candidate(field_, length_);
        for (std::size_t j = 0; j < pivots_.size(); ++j)
            candidate.add_scaled(gen_.row(j), v.get(pivots_[j]));
        return candidate == v;
    }

    Vector encode(const std::vector<std::uint32_t>& coeffs) const {
        if (coeffs.size() != dimension())
            throw std::invalid_argument("LinearCode: coefficient count mismatch");
        Vector out(field_, length_);
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            out.add_scaled(gen_.row(j), coeffs[j] % std::uint32_t(field_.modulus()));
        return out;
    }

    friend bool operator==(const LinearCode& a, const LinearCode& b) {
        return a.field_ == b.field_ && a.length_ == b.length_ && a.gen_ == b.gen_;
    }
    friend bool operator!=(const LinearCode& a, const LinearCode& b) { return !(a == b); }

private:
    PrimeField field_;
    std::size_t length_;
    Matrix gen_;
    std::vector<std::size_t> pivots_;
    std::optional<std::int64_t> distance_lb_;
};

/// Enumerates all q^k codewords incrementally (base-q odometer over
/// coefficients, digit 0 fastest).  Each advance adds one generator row to the
/// running codeword: when a digit wraps q-1 -> 0 the change is -(q-1) == +1
/// mod q, so a carry is also a single row addition.
class CodewordEnumerator {
public:
    explicit CodewordEnumerator(const LinearCode& code)
        : modulus_(code.field().modulus()),
          digits_(code.dimension(), 0),
          current_(code.field(), code.length()),
          done_(false) {
        rows_.reserve(code.dimension());
        for (std::size_t i = 0; i < code.dimension(); ++i)
            rows_.push_back(code.generator().row(i));
    }

    bool done() const { return done_; }
    const Vector& current() const { return current_; }
    const std::vector<std::uint32_t>& coefficients() const { return digits_; }

    void advance() {
        std::size_t i = 0;
        while (true) {
            if (i == digits_.size()) {
                done_ = true;
                return;
            }
            current_.add_scaled(rows_[i], 1);
            digits_[i] += 1;
            if (digits_[i] == modulus_) {
                digits_[i] = 0;
                ++i;
            } else {
                return;
            }
        }
    }

private:
    std::uint64_t modulus_;
    std::vector<Vector> rows_;
    std::vector<std::uint32_t> digits_;
    Vector current_;
    bool done_;
};

inline std::uint64_t pow_check(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (v > cap / base) return cap + 1;
        v *= base;
    }
    return v;
}

/// Exact minimum distance by full codeword enumeration.  Requires
/// q^dim <= budget; throws otherwise and for the zero code.
inline std::int64_t min_distance(const LinearCode& code,
                                 std::uint64_t budget = (1ull << 22)) {
    if (code.dimension() == 0)
        throw std::domain_error("min_distance: zero code has no nonzero codeword");
    std::uint64_t total =
        pow_check(code.field().modulus(), code.dimension(), budget);
    if (total > budget)
        throw std::runtime_error("min_distance: enumeration budget exceeded (q^k > " +
                                 std::to_string(budget) + ")");
    CodewordEnumerator en(code);
    std::int64_t best = std::int64_t(code.length()) + 1;
    en.advance();  // skip the zero codeword
    while (!en.done()) {
        std::int64_t w = en.current().weight();
        if (w > 0 && w < best) best = w;
        en.advance();
    }
    return best;
}

/// Whether some nonzero codeword has weight <= max_weight; decided exactly by
/// scanning candidate zero-sets.  A codeword of weight <= w vanishes on some
/// n-w coordinates, and such a codeword exists iff the generator restricted
/// to those coordinates drops rank.  Subset count is bounded by `budget`.
inline bool has_codeword_of_weight_at_most(const LinearCode& code, std::int64_t max_weight,
                                           std::uint64_t budget = (1ull << 22)) {
    const std::int64_t n = std::int64_t(code.length());
    const std::size_t k = code.dimension();
    if (k == 0) return false;
    if (max_weight >= n) return true;  // generator rows are nonzero codewords
    if (max_weight < 1) return false;
    const std::int64_t zero_count = n - max_weight;
    // Count subsets first so oversized requests fail fast.  The running
    // binomial C(n, i+1) = C(n, i) * (n - i) / (i + 1) stays exact.
    std::uint64_t count = 1;
    for (std::int64_t i = 0; i < zero_count; ++i) {
        __int128 c = __int128(count) * std::uint64_t(n - i) / std::uint64_t(i + 1);
        if (c > __int128(budget))
            throw std::runtime_error(
                "has_codeword_of_weight_at_most: subset budget exceeded");
        count = std::uint64_t(c);
    }
    std::vector<std::int64_t> subset(static_cast<std::size_t>(zero_count));
    for (std::int64_t i = 0; i < zero_count; ++i) subset[std::size_t(i)] = i;
    std::uint64_t visited = 0;
    while (true) {
        if (++visited > budget)
            throw std::runtime_error(
                "has_codeword_of_weight_at_most: subset budget exceeded");
        Matrix cols = code.generator().selected_columns(subset);
        if (rref(cols).rank < k) return true;
        // next combination in lexicographic order
        std::int64_t i = zero_count - 1;
        while (i >= 0 && subset[std::size_t(i)] == n - zero_count + i) --i;
        if (i < 0) break;
        ++subset[std::size_t(i)];
        for (std::int64_t j = i + 1; j < zero_count; ++j)
            subset[std::size_t(j)] = subset[std::size_t(j - 1)] + 1;
    }
    return false;
}

inline bool has_distance_at_least(const LinearCode& code, std::int64_t d,
                                  std::uint64_t budget = (1ull << 22)) {
    if (d <= 1) return true;
    return !has_codeword_of_weight_at_most(code, d - 1, budget);
}

/// Exact minimum distance through the zero-set scan; independent of the
/// enumeration route, usable when q^k is large but n is small.
inline std::int64_t min_distance_by_zero_sets(const LinearCode& code,
                                              std::uint64_t budget = (1ull << 22)) {
    if (code.dimension() == 0)
        throw std::domain_error("min_distance_by_zero_sets: zero code");
    for (std::int64_t w = 1; w <= std::int64_t(code.length()); ++w)
        if (has_codeword_of_weight_at_most(code, w, budget)) return w;
    throw std::logic_error("min_distance_by_zero_sets: no nonzero codeword found");
}

/// Code restricted to the coordinates in A (columns selected, row space
/// re-reduced).
inline LinearCode restrict_code(const LinearCode& code, const CoordinateSet& a) {
    if (a.parent_length() != std::int64_t(code.length()))
        throw std::invalid_argument("restrict_code: coordinate set length mismatch");
    Matrix cols = code.generator().selected_columns(a.indices());
    return LinearCode(code.field(), a.size(), cols);
}

/// Coordinatewise-product span: spanned by all products of generator rows.
inline LinearCode star_product(const LinearCode& c1, const LinearCode& c2) {
    if (c1.field() != c2.field() || c1.length() != c2.length())
        throw std::invalid_argument("star_product: field or length mismatch");
    const PrimeField& f = c1.field();
    std::size_t n = c1.length();
    Matrix products(f, c1.dimension() * c2.dimension(), n);
    std::size_t r = 0;
    for (std::size_t i = 0; i < c1.dimension(); ++i)
        for (std::size_t j = 0; j < c2.dimension(); ++j) {
            for (std::size_t x = 0; x < n; ++x)
                products.set(r, x, f.mul(c1.generator().get(i, x), c2.generator().get(j, x)));
            ++r;
        }
    return LinearCode(f, n, products);
}

/// Dual code {x : <x, y> = 0 for all y in C}.
inline LinearCode dual(const LinearCode& code) {
    std::vector<Vector> basis = kernel(code.generator());
    Matrix rows(code.field(), basis.size(), code.length());
    for (std::size_t i = 0; i < basis.size(); ++i) rows.set_row(i, basis[i]);
    return LinearCode(code.field(), code.length(), rows);
}

struct NearestCodeword {
    Vector codeword;
    std::int64_t distance;
};

/// Nearest codeword by exhaustive enumeration; ties resolved by enumeration
/// order (first minimizer wins), so the result is deterministic.
inline NearestCodeword nearest_codeword_exhaustive(const LinearCode& code, const Vector& v,
                                                   std::uint64_t budget = (1ull << 22)) {
    if (v.size() != code.length() || v.field() != code.field())
        throw std::invalid_argument("nearest_codeword: size or field mismatch");
    std::uint64_t total = pow_check(code.field().modulus(), code.dimension(), budget);
    if (total > budget)
        throw std::runtime_error("nearest_codeword: enumeration budget exceeded");
    CodewordEnumerator en(code);
    Vector best = en.current();
    std::int64_t best_d = best.distance_to(v);
    en.advance();
    while (!en.done()) {
        std::int64_t d = en.current().distance_to(v);
        if (d < best_d) {
            best = en.current();
            best_d = d;
        }
        en.advance();
    }
    return NearestCodeword{std::move(best), best_d};
}

/// Certifies that `reference` is the unique nearest codeword to v: it must be
/// a codeword and satisfy 2 * dist(v, reference) < (certified minimum
/// distance lower bound).  Throws if the radius condition fails, since then
/// uniqueness cannot be certified and the caller must fall back.
inline NearestCodeword nearest_codeword_reference(const LinearCode& code, const Vector& v,
                                                  const Vector& reference) {
    if (!code.distance_lower_bound())
        throw std::runtime_error(
            "nearest_codeword: reference mode needs a certified distance bound");
    if (!code.contains(reference))
        throw std::invalid_argument("nearest_codeword: reference is not a codeword");
    std::int64_t d = v.distance_to(reference);
    if (2 * d >= *code.distance_lower_bound())
        throw std::runtime_error(
            "nearest_codeword: reference outside the unique-decoding radius (dist " +
            std::to_string(d) + ", bound " +
            std::to_string(*code.distance_lower_bound()) + ")");
    return NearestCodeword{reference, d};
}

}  // namespace agtensor
