#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace agtensor {

/// Fixed thresholds of the decoding guarantee.
///   * epsilon_max:      disagreement fractions must stay below 1/100;
///   * min_degree:       the decoded member degree must exceed 15 (and the
///                       genus);
///   * scale_constant:   the grid side must exceed 15 * (degree + genus)^2;
///   * robustness_bound: certified robustness ratio, 1/200.
inline const Rational kEpsilonMax(1, 100);
inline constexpr std::int64_t kMinDegree = 15;
inline constexpr std::int64_t kScaleConstant = 15;
inline const Rational kRobustnessBound(1, 200);

/// Derived per-run decoder constants.
///
/// window = 2 * (degree + genus) is the side of the sampled submatrices;
/// localizer_degree = floor(sqrt(eps) * window) + genus + 2 indexes the
/// family member from which the error localizer is drawn.
///
/// Quantities proportional to sqrt(eps) (line-pruning threshold sqrt(eps)/4,
/// bad-line bounds 2*sqrt(eps) and 4*sqrt(eps)) are never materialized as
/// floats; all comparisons against them happen in exact squared form.
struct DecoderConstants {
    Rational epsilon;
    std::int64_t degree = 0;
    std::int64_t genus = 0;
    std::int64_t window = 0;
    std::int64_t localizer_degree = 0;

    static DecoderConstants derive(const Rational& epsilon, std::int64_t degree,
                                   std::int64_t genus) {
        if (epsilon.sign() < 0 || epsilon > Rational(1))
            throw std::invalid_argument("DecoderConstants: epsilon must be in [0, 1]");
        if (degree < 0 || genus < 0)
            throw std::invalid_argument("DecoderConstants: negative degree or genus");
        DecoderConstants c;
        c.epsilon = epsilon;
        c.degree = degree;
        c.genus = genus;
        c.window = 2 * (degree + genus);
        c.localizer_degree =
            floor_sqrt(epsilon * Rational(c.window) * Rational(c.window)) + genus + 2;
        return c;
    }

    /// Line-pruning rule: error fraction above sqrt(eps)/4 over the full line
    /// length.  For eps = 0 the threshold degenerates to zero errors.
    bool line_exceeds_prune_threshold(std::int64_t errors, std::int64_t length) const {
        if (errors < 0 || length <= 0)
            throw std::invalid_argument("line_exceeds_prune_threshold: bad arguments");
        if (epsilon.is_zero()) return errors > 0;
        // errors/length > sqrt(eps)/4  <=>  (4*errors)^2 * ed > en * length^2
        __int128 lhs = __int128(16) * errors * errors * epsilon.denominator();
        __int128 rhs = __int128(epsilon.numerator()) * length * length;
        return lhs > rhs;
    }

    /// Bad-line rule inside a sampled window: error fraction above 1/4 (the
    /// exact value of eps / (2*sqrt(eps))^2 for eps > 0).
    bool exceeds_quarter_threshold(std::int64_t errors, std::int64_t window_len) const {
        if (errors < 0 || window_len <= 0)
            throw std::invalid_argument("exceeds_quarter_threshold: bad arguments");
        if (epsilon.is_zero()) return errors > 0;
        return 4 * errors > window_len;
    }

    /// Cap on the number of errors tolerated in a sampled window.
    std::int64_t window_error_cap() const {
        return std::int64_t((__int128(epsilon.numerator()) * window * window) /
                            epsilon.denominator());
    }
};

struct PreconditionCheck {
    std::string name;
    std::string detail;
    bool pass = false;
};

/// Verdicts for the decoding hypotheses and the five derived inequalities the
/// guarantee rests on.  With eps = 0 the run is degenerate (no disagreement);
/// the sqrt(eps)-scaled inequalities are then skipped and the guarantee is
/// established directly, so `ok()` does not require them.
struct PreconditionReport {
    std::vector<PreconditionCheck> checks;
    bool hypotheses_ok = false;
    bool inequalities_ok = false;
    bool degenerate = false;  // eps == 0

    bool ok() const { return hypotheses_ok && (degenerate || inequalities_ok); }

    std::string summary() const {
        std::string out;
        for (const auto& c : checks)
            out += std::string(c.pass ? "  [pass] " : "  [FAIL] ") + c.name + ": " + c.detail +
                   "\n";
        return out;
    }
};

namespace detail {

inline std::string approx(const Rational& r) { return r.decimal_str(6); }

// Display-only approximation of scale * sqrt(eps); verdicts never use it.
inline std::string approx_sqrt_scaled(std::int64_t scale, const Rational& eps) {
    double v = double(scale) *
               __builtin_sqrt(double(eps.numerator()) / double(eps.denominator()));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace detail

/// Checks every hypothesis and derived inequality for the given parameters.
/// All verdicts are exact; sqrt terms are compared in squared form.
inline PreconditionReport check_preconditions(std::int64_t n, std::int64_t degree,
                                              std::int64_t genus, std::uint64_t modulus,
                                              const Rational& eps) {
    if (n <= 0 || degree < 0 || genus < 0 || eps.sign() < 0)
        throw std::invalid_argument("check_preconditions: bad arguments");
    if (n > (std::int64_t(1) << 40) || eps.denominator() > (std::int64_t(1) << 44))
        throw std::invalid_argument("check_preconditions: parameters out of supported range");
    DecoderConstants c = DecoderConstants::derive(eps, degree, genus);
    PreconditionReport report;
    report.degenerate = eps.is_zero();
    const std::int64_t en = eps.numerator(), ed = eps.denominator();
    const std::int64_t d = c.localizer_degree, window = c.window;

    auto push = [&report](const std::string& name, bool pass, const std::string& detail) {
        report.checks.push_back({name, detail, pass});
        return pass;
    };

    bool h1 = push("epsilon-upper", eps < kEpsilonMax,
                   "eps = " + eps.str() + " ~ " + detail::approx(eps) + " < 1/100");
    push("epsilon-positive", eps.sign() > 0,
         eps.sign() > 0 ? "eps > 0" : "eps = 0 (degenerate run, guarantee direct)");
    bool h2 = push("degree-lower", degree > std::max(kMinDegree, genus),
                   "degree = " + std::to_string(degree) + " > max(15, genus = " +
                       std::to_string(genus) + ")");
    std::int64_t floor_n = kScaleConstant * (degree + genus) * (degree + genus);
    bool h3 = push("length-lower", n > floor_n,
                   "n = " + std::to_string(n) + " > 15*(degree+genus)^2 = " +
                       std::to_string(floor_n));
    push("field-prime", true, "q = " + std::to_string(modulus) + " (checked at construction)");
    report.hypotheses_ok = h1 && h2 && h3;

    // (1) 2*sqrt(eps) < 4*sqrt(eps) * (1 - 4*sqrt(eps)); for eps > 0 this
    // reduces to 64*eps < 1.
    bool i1;
    {
        i1 = eps.sign() > 0 && Rational(64) * eps < Rational(1);
        push("inequality-1", i1,
             "64*eps = " + (Rational(64) * eps).str() + " < 1" +
                 (eps.sign() == 0 ? " (fails literally at eps = 0)" : ""));
    }
    // (2) (1 - 1/4) * window > localizer_degree + degree.
    bool i2;
    {
        Rational lhs = Rational(3 * window, 4);
        std::int64_t rhs = d + degree;
        i2 = lhs > Rational(rhs);
        push("inequality-2", i2,
             "(3/4)*window = " + lhs.str() + " > localizer_degree + degree = " +
                 std::to_string(rhs));
    }
    // (3) n * (1 - 6*sqrt(eps)) > (localizer_degree + 1) * window, i.e.
    // n - (d+1)*window > 6*sqrt(eps)*n.
    bool i3;
    {
        std::int64_t margin = n - (d + 1) * window;
        i3 = margin > 0 && gt_sqrt_scaled(Rational(margin), 6 * n, eps);
        push("inequality-3", i3,
             "n - (localizer_degree+1)*window = " + std::to_string(margin) +
                 " > 6*sqrt(eps)*n ~ " + detail::approx_sqrt_scaled(6 * n, eps));
    }
    // (4) (2*sqrt(eps) + eps) * n / (n - degree) < 3*sqrt(eps); for eps > 0
    // this reduces to sqrt(eps)*n < n - 3*degree.
    bool i4;
    {
        std::int64_t margin = n - 3 * degree;
        i4 = eps.sign() > 0 && margin > 0 &&
             __int128(en) * n * n < __int128(margin) * margin * ed;
        push("inequality-4", i4,
             "sqrt(eps)*n < n - 3*degree = " + std::to_string(margin) +
                 (eps.sign() == 0 ? " (fails literally at eps = 0)" : ""));
    }
    // (5) (n - degree - 3*sqrt(eps)*n) / n > 1/2, i.e. n - 2*degree >
    // 6*sqrt(eps)*n.
    bool i5;
    {
        std::int64_t margin = n - 2 * degree;
        i5 = margin > 0 && gt_sqrt_scaled(Rational(margin), 6 * n, eps);
        push("inequality-5", i5,
             "n - 2*degree = " + std::to_string(margin) + " > 6*sqrt(eps)*n");
    }
    report.inequalities_ok = i1 && i2 && i3 && i4 && i5;
    return report;
}

}  // namespace agtensor
