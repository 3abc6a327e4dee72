// Brute-force reference implementations used to cross-check the library.
// Deliberately written from scratch on plain integer types, with no project
// includes, so a bug in the library cannot hide in its own oracle.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using i64 = std::int64_t;

inline i64 pow_mod(i64 a, i64 e, i64 p) {
    i64 r = 1 % p;
    a = ((a % p) + p) % p;
    while (e > 0) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

inline i64 inv_mod(i64 a, i64 p) {
    a = ((a % p) + p) % p;
    if (a == 0) throw std::domain_error("oracle::inv_mod: zero");
    for (i64 x = 1; x < p; ++x)
        if (a * x % p == 1) return x;
    throw std::domain_error("oracle::inv_mod: no inverse (composite modulus?)");
}

inline i64 rank_mod(std::vector<std::vector<i64>> m, i64 p) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] % p == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        i64 inv = inv_mod(m[r][c], p);
        for (std::size_t j = 0; j < cols; ++j) m[r][j] = ((m[r][j] * inv) % p + p) % p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            i64 f = ((m[i][c] % p) + p) % p;
            if (f == 0) continue;
            for (std::size_t j = 0; j < cols; ++j)
                m[i][j] = ((m[i][j] - f * m[r][j]) % p + p) % p;
        }
        ++r;
    }
    return i64(r);
}

/// Whether v is a linear combination of the rows of m (rank comparison).
inline bool in_span(const std::vector<std::vector<i64>>& m, const std::vector<i64>& v,
                    i64 p) {
    std::vector<std::vector<i64>> extended = m;
    extended.push_back(v);
    return rank_mod(m, p) == rank_mod(extended, p);
}

inline i64 weight(const std::vector<i64>& v, i64 p) {
    i64 w = 0;
    for (i64 x : v) w += (((x % p) + p) % p) != 0;
    return w;
}

inline i64 hamming(const std::vector<i64>& a, const std::vector<i64>& b, i64 p) {
    if (a.size() != b.size()) throw std::invalid_argument("oracle::hamming: size mismatch");
    i64 d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += (((a[i] - b[i]) % p) + p) % p != 0;
    return d;
}

/// All q^k codewords of the span of `gen` (small k only), via an odometer over
/// coefficient vectors.  Visitor receives each codeword including zero.
template <typename Visit>
inline void enumerate_span(const std::vector<std::vector<i64>>& gen, i64 p, Visit&& visit) {
    std::size_t k = gen.size();
    std::size_t n = k == 0 ? 0 : gen[0].size();
    std::vector<i64> coeff(k, 0), word(n, 0);
    while (true) {
        for (std::size_t j = 0; j < n; ++j) {
            i64 acc = 0;
            for (std::size_t i = 0; i < k; ++i) acc += coeff[i] * gen[i][j] % p;
            word[j] = acc % p;
        }
        visit(const_cast<const std::vector<i64>&>(word), coeff);
        std::size_t pos = 0;
        while (pos < k && ++coeff[pos] == p) coeff[pos++] = 0;
        if (pos == k) break;
    }
}

/// Exact minimum weight of the nonzero codewords in the span of `gen`.
inline i64 min_weight(const std::vector<std::vector<i64>>& gen, i64 p) {
    i64 best = gen.empty() ? 0 : i64(gen[0].size()) + 1;
    enumerate_span(gen, p, [&](const std::vector<i64>& w, const std::vector<i64>& coeff) {
        bool zero = true;
        for (i64 c : coeff) zero &= (c == 0);
        if (zero) return;
        best = std::min(best, weight(w, p));
    });
    return best;
}

/// Exhaustive nearest-codeword search: minimum Hamming distance from target to
/// the span, and how many codewords attain it.
inline std::pair<i64, i64> nearest_in_span(const std::vector<std::vector<i64>>& gen,
                                           const std::vector<i64>& target, i64 p) {
    i64 best = i64(target.size()) + 1, count = 0;
    enumerate_span(gen, p, [&](const std::vector<i64>& w, const std::vector<i64>&) {
        i64 d = hamming(w, target, p);
        if (d < best) {
            best = d;
            count = 1;
        } else if (d == best) {
            ++count;
        }
    });
    return {best, count};
}

inline i64 eval_poly(const std::vector<i64>& coeffs, i64 x, i64 p) {
    i64 acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = (acc * x + coeffs[i]) % p;
    return ((acc % p) + p) % p;
}

/// Affine points of y^2 = x^3 + a x + b over GF(p), in (x, y) double-loop order.
inline std::vector<std::pair<i64, i64>> curve_points(i64 p, i64 a, i64 b) {
    std::vector<std::pair<i64, i64>> pts;
    for (i64 x = 0; x < p; ++x)
        for (i64 y = 0; y < p; ++y)
            if (((y * y - (x * x * x + a * x + b)) % p + p) % p == 0) pts.emplace_back(x, y);
    return pts;
}

inline i64 binom(i64 n, i64 k) {
    if (k < 0 || k > n) return 0;
    i64 r = 1;
    for (i64 i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace oracle
