#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace agtensor {

/// Deterministic splitmix64 generator.  The standard <random> distributions
/// are implementation-defined, so all randomized steps (corruption positions,
/// submatrix sampling, parameter sampling) draw from this generator to keep
/// traces byte-reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

    /// Uniform in [1, bound).
    std::uint64_t nonzero_below(std::uint64_t bound) {
        if (bound < 2) throw std::invalid_argument("Rng::nonzero_below: bound too small");
        return 1 + below(bound - 1);
    }

    /// k distinct values from [0, n), in ascending order.
    std::vector<std::int64_t> sample_distinct(std::int64_t n, std::int64_t k) {
        if (k < 0 || k > n) throw std::invalid_argument("Rng::sample_distinct: bad k");
        // Floyd's algorithm: uniform over subsets, O(k) draws.
        std::vector<std::int64_t> picked;
        picked.reserve(std::size_t(k));
        for (std::int64_t j = n - k; j < n; ++j) {
            std::int64_t t = std::int64_t(below(std::uint64_t(j + 1)));
            bool seen = false;
            for (std::int64_t p : picked)
                if (p == t) {
                    seen = true;
                    break;
                }
            picked.push_back(seen ? j : t);
        }
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Per-trial seed derived from a master seed; stable, documented scheme so
/// individual trials can be reproduced in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    Rng r(master ^ (0x517cc1b727220a95ull * (index + 1)));
    return r.next();
}

}  // namespace agtensor
