#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codes.hpp"
#include "rng.hpp"

namespace agtensor {

/// Affine point (x, y) on a curve over GF(p).
struct AffinePoint {
    std::uint32_t x;
    std::uint32_t y;
    friend bool operator==(const AffinePoint& a, const AffinePoint& b) {
        return a.x == b.x && a.y == b.y;
    }
};

/// Nonsingular curve y^2 = x^3 + a*x + b over GF(p), p > 3, with its affine
/// rational points enumerated in a fixed order (x ascending, then y
/// ascending).  The point count is checked against the Hasse bound
/// |N_affine - p| <= 2*sqrt(p) at construction.
class EllipticCurve {
public:
    EllipticCurve(const PrimeField& field, std::uint32_t a, std::uint32_t b)
        : field_(field), a_(a % std::uint32_t(field.modulus())),
          b_(b % std::uint32_t(field.modulus())) {
        const std::uint64_t p = field_.modulus();
        if (p <= 3)
            throw std::invalid_argument("EllipticCurve: requires p > 3");
        // Discriminant condition: 4a^3 + 27b^2 != 0.
        std::uint32_t disc = field_.add(
            field_.mul(4 % p, field_.pow(a_, 3)),
            field_.mul(27 % p, field_.mul(b_, b_)));
        if (disc == 0)
            throw std::invalid_argument("EllipticCurve: singular curve (4a^3 + 27b^2 = 0)");
        enumerate_points();
        std::int64_t diff = std::int64_t(points_.size()) - std::int64_t(p);
        if (__int128(diff) * diff > __int128(4) * p)
            throw std::logic_error("EllipticCurve: point count violates the Hasse bound");
    }

    const PrimeField& field() const { return field_; }
    std::uint32_t a() const { return a_; }
    std::uint32_t b() const { return b_; }
    const std::vector<AffinePoint>& affine_points() const { return points_; }
    std::int64_t affine_count() const { return std::int64_t(points_.size()); }
    /// Projective count (affine points plus the point at infinity).
    std::int64_t rational_count() const { return affine_count() + 1; }

private:
    void enumerate_points() {
        const std::uint64_t p = field_.modulus();
        // Square table: sqrt_of[v] = smallest y with y^2 = v, or p if none.
        std::vector<std::uint32_t> sqrt_of(p, std::uint32_t(p));
        for (std::uint64_t y = 0; y < p; ++y) {
            std::uint32_t v = field_.mul(std::uint32_t(y), std::uint32_t(y));
            if (sqrt_of[v] == p) sqrt_of[v] = std::uint32_t(y);
        }
        for (std::uint64_t x = 0; x < p; ++x) {
            std::uint32_t rhs = field_.add(
                field_.mul(std::uint32_t(x), field_.mul(std::uint32_t(x), std::uint32_t(x))),
                field_.add(field_.mul(a_, std::uint32_t(x)), b_));
            std::uint32_t y = sqrt_of[rhs];
            if (y == p) continue;
            points_.push_back({std::uint32_t(x), y});
            std::uint32_t y2 = field_.neg(y);
            if (y2 != y) points_.push_back({std::uint32_t(x), y2});
        }
        // Keep (x asc, y asc) order; -y may precede y.
        std::sort(points_.begin(), points_.end(), [](const AffinePoint& l, const AffinePoint& r) {
            return l.x != r.x ? l.x < r.x : l.y < r.y;
        });
    }

    PrimeField field_;
    std::uint32_t a_, b_;
    std::vector<AffinePoint> points_;
};

/// Number of affine points of y^2 = x^3 + a*x + b over GF(p).
inline std::int64_t count_affine_points(const PrimeField& field, std::uint32_t a,
                                        std::uint32_t b) {
    return EllipticCurve(field, a, b).affine_count();
}

/// First (a, b) in lexicographic scan order whose nonsingular curve has at
/// least `min_affine` affine points, or nullopt when no curve qualifies.
inline std::optional<std::pair<std::uint32_t, std::uint32_t>> find_curve(
    const PrimeField& field, std::int64_t min_affine) {
    const std::uint64_t p = field.modulus();
    if (p <= 3) throw std::invalid_argument("find_curve: requires p > 3");
    // Shared square table across candidates.
    std::vector<bool> is_square(p, false);
    for (std::uint64_t y = 0; y < p; ++y)
        is_square[(y * y) % p] = true;
    for (std::uint64_t a = 0; a < p; ++a) {
        for (std::uint64_t b = 0; b < p; ++b) {
            std::uint64_t disc = (4 * ((a * a % p) * a % p) + 27 * (b * b % p)) % p;
            if (disc == 0) continue;
            std::int64_t count = 0;
            for (std::uint64_t x = 0; x < p; ++x) {
                std::uint64_t rhs = ((x * x % p) * x + a * x + b) % p;
                if (rhs == 0)
                    count += 1;
                else if (is_square[rhs])
                    count += 2;
            }
            if (count >= min_affine) return std::make_pair(std::uint32_t(a), std::uint32_t(b));
        }
    }
    return std::nullopt;
}

/// Graded family of evaluation codes member(0..n) over a fixed point set:
///
///   * rs:        degree-l polynomial evaluations on distinct field points
///                (genus 0);
///   * elliptic:  evaluations of the functions with a pole of order at most l
///                at infinity, spanned by x^i y^j with j <= 1 and 2i+3j <= l
///                (genus 1).
///
/// Both constructions give dim(member(l)) >= l - genus, a certified distance
/// lower bound n - l (a nonzero member function has at most l zeros on the
/// evaluation set), and member(l) * member(m) inside member(l+m) under the
/// coordinatewise product.
///
/// Members are cached; the cache is shared by copies and guarded by a mutex
/// so concurrent member() calls observe identical generators.
class AGFamily {
public:
    enum class Kind { Rs, Elliptic };

    static AGFamily rs(const PrimeField& field, std::vector<std::uint32_t> eval_points) {
        if (eval_points.empty())
            throw std::invalid_argument("AGFamily: empty evaluation set");
        for (std::size_t i = 0; i < eval_points.size(); ++i) {
            if (eval_points[i] >= field.modulus())
                throw std::invalid_argument("AGFamily: evaluation point out of range");
            for (std::size_t j = i + 1; j < eval_points.size(); ++j)
                if (eval_points[i] == eval_points[j])
                    throw std::invalid_argument("AGFamily: repeated evaluation point");
        }
        AGFamily f(field, Kind::Rs, std::int64_t(eval_points.size()), 0);
        f.rs_points_ = std::move(eval_points);
        return f;
    }

    /// Reed-Solomon family on all of GF(q), so n = q.
    static AGFamily rs_full(const PrimeField& field) {
        std::vector<std::uint32_t> pts(field.modulus());
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = std::uint32_t(i);
        return rs(field, std::move(pts));
    }

    static AGFamily elliptic(const EllipticCurve& curve,
                             std::optional<std::vector<std::int64_t>> point_indices =
                                 std::nullopt) {
        std::vector<AffinePoint> pts;
        if (point_indices) {
            std::int64_t prev = -1;
            for (auto i : *point_indices) {
                if (i <= prev || i >= curve.affine_count())
                    throw std::invalid_argument(
                        "AGFamily: point indices must be strictly increasing and in range");
                prev = i;
                pts.push_back(curve.affine_points()[std::size_t(i)]);
            }
        } else {
            pts = curve.affine_points();
        }
        if (pts.empty()) throw std::invalid_argument("AGFamily: empty evaluation set");
        AGFamily f(curve.field(), Kind::Elliptic, std::int64_t(pts.size()), 1);
        f.curve_a_ = curve.a();
        f.curve_b_ = curve.b();
        f.ell_points_ = std::move(pts);
        return f;
    }

    const PrimeField& field() const { return field_; }
    Kind kind() const { return kind_; }
    std::int64_t length() const { return length_; }
    std::int64_t genus() const { return genus_; }
    std::uint32_t curve_a() const { return curve_a_; }
    std::uint32_t curve_b() const { return curve_b_; }
    const std::vector<std::uint32_t>& rs_points() const { return rs_points_; }
    const std::vector<AffinePoint>& elliptic_points() const { return ell_points_; }

    /// Test hook: same family with one member replaced, for exercising the
    /// verifier's violation reporting.
    AGFamily with_member_override(std::int64_t degree, const Matrix& generator) const {
        AGFamily f = *this;
        f.cache_ = std::make_shared<Cache>();
        f.overrides_ = std::make_shared<std::map<std::int64_t, Matrix>>(
            overrides_ ? *overrides_ : std::map<std::int64_t, Matrix>());
        f.overrides_->insert_or_assign(degree, generator);
        return f;
    }

    /// member(degree) for 0 <= degree <= n.
    const LinearCode& member(std::int64_t degree) const {
        if (degree < 0 || degree > length_)
            throw std::invalid_argument("AGFamily: degree out of range [0, n]");
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->members.find(degree);
        if (it != cache_->members.end()) return *it->second;
        auto code = std::make_shared<LinearCode>(build_member(degree));
        auto [pos, inserted] = cache_->members.emplace(degree, std::move(code));
        (void)inserted;
        return *pos->second;
    }

private:
    AGFamily(const PrimeField& field, Kind kind, std::int64_t length, std::int64_t genus)
        : field_(field), kind_(kind), length_(length), genus_(genus),
          cache_(std::make_shared<Cache>()) {}

    LinearCode build_member(std::int64_t degree) const {
        if (overrides_) {
            auto it = overrides_->find(degree);
            if (it != overrides_->end()) {
                LinearCode c(field_, std::size_t(length_), it->second);
                return c;
            }
        }
        Matrix rows = kind_ == Kind::Rs ? rs_rows(degree) : elliptic_rows(degree);
        LinearCode code(field_, std::size_t(length_), rows);
        code.set_distance_lower_bound(std::max<std::int64_t>(1, length_ - degree));
        return code;
    }

    Matrix rs_rows(std::int64_t degree) const {
        // Monomials 1, s, ..., s^degree evaluated on the point set.
        Matrix rows(field_, std::size_t(degree) + 1, std::size_t(length_));
        for (std::size_t x = 0; x < rs_points_.size(); ++x) {
            std::uint32_t v = 1;
            for (std::int64_t i = 0; i <= degree; ++i) {
                rows.set(std::size_t(i), x, v);
                v = field_.mul(v, rs_points_[x]);
            }
        }
        return rows;
    }

    Matrix elliptic_rows(std::int64_t degree) const {
        // Monomials x^i y^j, j in {0, 1}, ordered by pole order 2i + 3j.
        std::vector<std::pair<std::int64_t, std::int64_t>> monomials;
        for (std::int64_t t = 0; t <= degree; ++t) {
            if (t % 2 == 0) monomials.emplace_back(t / 2, 0);
            if (t >= 3 && t % 2 == 1) monomials.emplace_back((t - 3) / 2, 1);
        }
        Matrix rows(field_, monomials.size(), std::size_t(length_));
        for (std::size_t c = 0; c < ell_points_.size(); ++c) {
            const AffinePoint& pt = ell_points_[c];
            for (std::size_t r = 0; r < monomials.size(); ++r) {
                auto [i, j] = monomials[r];
                std::uint32_t v = field_.pow(pt.x, std::uint64_t(i));
                if (j == 1) v = field_.mul(v, pt.y);
                rows.set(r, c, v);
            }
        }
        return rows;
    }

    struct Cache {
        std::mutex mutex;
        std::map<std::int64_t, std::shared_ptr<const LinearCode>> members;
    };

    PrimeField field_;
    Kind kind_;
    std::int64_t length_;
    std::int64_t genus_;
    std::uint32_t curve_a_ = 0, curve_b_ = 0;
    std::vector<std::uint32_t> rs_points_;
    std::vector<AffinePoint> ell_points_;
    std::shared_ptr<Cache> cache_;
    std::shared_ptr<std::map<std::int64_t, Matrix>> overrides_;
};

enum class DistanceCheckMode {
    Exact,       // zero-set scan, exact verdict
    Certificate  // construction bound plus random spot checks
};

struct DegreeCheck {
    std::int64_t degree = 0;
    std::int64_t dimension = 0;
    std::int64_t dimension_slack = 0;  // dim - (degree - genus)
    bool dimension_ok = false;
    std::string distance_method;
    std::int64_t distance_value = 0;  // exact distance or certified bound
    bool distance_ok = false;
};

struct StarCheck {
    std::int64_t degree_left = 0;
    std::int64_t degree_right = 0;
    std::int64_t products_tested = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> violations;  // row index pairs
};

struct FamilyVerification {
    std::vector<DegreeCheck> degree_checks;
    std::vector<StarCheck> star_checks;
    std::int64_t violation_count = 0;
    bool ok() const { return violation_count == 0; }
};

/// Checks the family contract on the given samples: dimension and distance of
/// member(l) for each sampled l, and containment of coordinatewise products
/// member(l) * member(m) in member(l + m) for each sampled pair.  Failures are
/// report entries, not exceptions.
inline FamilyVerification verify_family(
    const AGFamily& family, const std::vector<std::int64_t>& degree_samples,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pair_samples,
    DistanceCheckMode mode, std::uint64_t budget = (1ull << 22),
    std::uint64_t spot_check_seed = 1, int spot_checks = 32) {
    FamilyVerification report;
    const std::int64_t n = family.length();
    for (std::int64_t degree : degree_samples) {
        const LinearCode& code = family.member(degree);
        DegreeCheck check;
        check.degree = degree;
        check.dimension = std::int64_t(code.dimension());
        check.dimension_slack = check.dimension - (degree - family.genus());
        check.dimension_ok = check.dimension_slack >= 0;
        if (!check.dimension_ok) ++report.violation_count;
        std::int64_t required = n - degree;
        if (code.dimension() == 0) {
            check.distance_method = "empty";
            check.distance_ok = true;  // no nonzero codeword exists
        } else if (mode == DistanceCheckMode::Exact) {
            check.distance_method = "zero-set-scan";
            check.distance_value = required <= 1
                                       ? 1  // any nonzero word has weight >= 1
                                       : std::int64_t(min_distance_by_zero_sets(code, budget));
            check.distance_ok = check.distance_value >= required;
        } else {
            check.distance_method = "certificate+spot-checks";
            check.distance_value = code.distance_lower_bound().value_or(0);
            check.distance_ok = required <= 1 || check.distance_value >= required;
            Rng rng(spot_check_seed + std::uint64_t(degree) * 0x9e3779b9u);
            for (int s = 0; s < spot_checks && check.distance_ok; ++s) {
                std::vector<std::uint32_t> coeffs(code.dimension());
                bool nonzero = false;
                for (auto& c : coeffs) {
                    c = std::uint32_t(rng.below(family.field().modulus()));
                    nonzero |= (c != 0);
                }
                if (!nonzero) continue;
                if (code.encode(coeffs).weight() < required) check.distance_ok = false;
            }
        }
        if (!check.distance_ok) ++report.violation_count;
        report.degree_checks.push_back(check);
    }
    for (auto [l, m] : pair_samples) {
        if (l + m > n)
            throw std::invalid_argument("verify_family: pair sample with l + m > n");
        const LinearCode& cl = family.member(l);
        const LinearCode& cm = family.member(m);
        const LinearCode& target = family.member(l + m);
        StarCheck check;
        check.degree_left = l;
        check.degree_right = m;
        const PrimeField& f = family.field();
        for (std::size_t i = 0; i < cl.dimension(); ++i)
            for (std::size_t j = 0; j < cm.dimension(); ++j) {
                Vector prod(f, std::size_t(n));
                for (std::size_t x = 0; x < std::size_t(n); ++x)
                    prod.set(x, f.mul(cl.generator().get(i, x), cm.generator().get(j, x)));
                ++check.products_tested;
                if (!target.contains(prod)) {
                    check.violations.emplace_back(std::int64_t(i), std::int64_t(j));
                    ++report.violation_count;
                }
            }
        report.star_checks.push_back(std::move(check));
    }
    return report;
}

}  // namespace agtensor
