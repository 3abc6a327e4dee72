#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace agtensor {

/// Arithmetic modulo a prime q.  Values are canonical residues in [0, q).
///
/// The modulus is checked for primality at construction (deterministic trial
/// division; moduli are capped well below 2^31 so products fit in 64 bits).
class PrimeField {
public:
    static constexpr std::uint64_t max_modulus = (1u << 30);

    explicit PrimeField(std::uint64_t modulus) : modulus_(modulus) {
        if (modulus < 2)
            throw std::invalid_argument("PrimeField: modulus must be at least 2");
        if (modulus > max_modulus)
            throw std::invalid_argument("PrimeField: modulus exceeds supported range");
        if (!is_prime(modulus))
            throw std::invalid_argument("PrimeField: " + std::to_string(modulus) +
                                        " is not prime");
    }

    std::uint64_t modulus() const { return modulus_; }

    friend bool operator==(const PrimeField& a, const PrimeField& b) {
        return a.modulus_ == b.modulus_;
    }
    friend bool operator!=(const PrimeField& a, const PrimeField& b) { return !(a == b); }

    // Raw-residue arithmetic.  Callers must pass canonical residues; these are
    // the hot-path primitives used by the linear-algebra and grid loops.
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        std::uint64_t s = std::uint64_t(a) + b;
        if (s >= modulus_) s -= modulus_;
        return std::uint32_t(s);
    }

    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
        return b <= a ? a - b : std::uint32_t(a + modulus_ - b);
    }

    std::uint32_t neg(std::uint32_t a) const {
        return a == 0 ? 0 : std::uint32_t(modulus_ - a);
    }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return std::uint32_t((std::uint64_t(a) * b) % modulus_);
    }

    /// Reduces an unsigned 64-bit accumulator.
    std::uint32_t reduce(std::uint64_t a) const { return std::uint32_t(a % modulus_); }

    /// Reduces a possibly negative value to its canonical residue.
    std::uint32_t reduce_signed(std::int64_t a) const {
        std::int64_t m = std::int64_t(modulus_);
        std::int64_t r = a % m;
        if (r < 0) r += m;
        return std::uint32_t(r);
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    std::uint32_t inv(std::uint32_t a) const {
        if (a == 0) throw std::domain_error("PrimeField: inverse of zero");
        std::int64_t t = 0, new_t = 1;
        std::int64_t r = std::int64_t(modulus_), new_r = std::int64_t(a);
        while (new_r != 0) {
            std::int64_t q = r / new_r;
            std::int64_t tmp = t - q * new_t;
            t = new_t;
            new_t = tmp;
            tmp = r - q * new_r;
            r = new_r;
            new_r = tmp;
        }
        // r == gcd == 1 because the modulus is prime and a != 0.
        if (t < 0) t += std::int64_t(modulus_);
        return std::uint32_t(t);
    }

    std::uint32_t div(std::uint32_t a, std::uint32_t b) const { return mul(a, inv(b)); }

    /// a^e with the convention 0^0 = 1.
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const {
        std::uint64_t base = a, acc = 1;
        while (e > 0) {
            if (e & 1) acc = (acc * base) % modulus_;
            base = (base * base) % modulus_;
            e >>= 1;
        }
        return std::uint32_t(acc);
    }

private:
    static bool is_prime(std::uint64_t m) {
        if (m < 4) return m >= 2;
        if (m % 2 == 0) return false;
        for (std::uint64_t d = 3; d * d <= m; d += 2)
            if (m % d == 0) return false;
        return true;
    }

    std::uint64_t modulus_;
};

/// A field element paired with its field.  Mixing elements of different
/// fields is rejected at runtime.
class FieldElement {
public:
    FieldElement(const PrimeField& field, std::uint64_t value)
        : field_(field), value_(std::uint32_t(value % field.modulus())) {}

    std::uint32_t value() const { return value_; }
    const PrimeField& field() const { return field_; }

    FieldElement operator-() const { return make(field_.neg(value_)); }
    FieldElement inv() const { return make(field_.inv(value_)); }
    FieldElement pow(std::uint64_t e) const { return make(field_.pow(value_, e)); }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return a.make(a.field_.add(a.value_, b.value_));
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return a.make(a.field_.sub(a.value_, b.value_));
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return a.make(a.field_.mul(a.value_, b.value_));
    }
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return a.make(a.field_.div(a.value_, b.value_));
    }
    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        a.check_same(b);
        return a.value_ == b.value_;
    }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

    std::string str() const { return std::to_string(value_); }

private:
    FieldElement make(std::uint32_t v) const {
        FieldElement e(field_, 0);
        e.value_ = v;
        return e;
    }

    void check_same(const FieldElement& other) const {
        if (field_ != other.field_)
            throw std::invalid_argument(
                "FieldElement: cannot combine elements of GF(" +
                std::to_string(field_.modulus()) + ") and GF(" +
                std::to_string(other.field_.modulus()) + ")");
    }

    PrimeField field_;
    std::uint32_t value_;
};

}  // namespace agtensor
