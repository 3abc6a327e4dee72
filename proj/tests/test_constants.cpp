#include <catch2/catch_amalgamated.hpp>

#include <agtensor/constants.hpp>
#include <agtensor/rng.hpp>

using namespace agtensor;

TEST_CASE("rationals normalize and support exact arithmetic") {
    REQUIRE(Rational(6, 4) == Rational(3, 2));
    REQUIRE(Rational(-1, -2) == Rational(1, 2));
    REQUIRE(Rational(1, -2) == Rational(-1, 2));
    REQUIRE(Rational(0, 5) == Rational());
    REQUIRE_THROWS_AS(Rational(1, 0), std::domain_error);
    REQUIRE(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    REQUIRE(Rational(2, 3) - Rational(1, 6) == Rational(1, 2));
    REQUIRE(Rational(3, 4) * Rational(2, 9) == Rational(1, 6));
    REQUIRE(Rational(1, 2) / Rational(1, 3) == Rational(3, 2));
    REQUIRE(-Rational(2, 7) == Rational(-2, 7));
    REQUIRE_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
    REQUIRE(Rational(1, 3) < Rational(1, 2));
    REQUIRE(Rational(-1, 2) < Rational(0));
    REQUIRE(Rational(7, 5) >= Rational(7, 5));
    REQUIRE(Rational(2, 4).numerator() == 1);
    REQUIRE(Rational(2, 4).denominator() == 2);
    REQUIRE(Rational(-3).sign() == -1);
    REQUIRE(Rational().is_zero());
    // Overflow raises instead of wrapping.
    Rational huge(INT64_MAX, 1);
    REQUIRE_THROWS_AS(huge + huge, std::overflow_error);
}

TEST_CASE("rational formatting and parsing round-trip") {
    REQUIRE(Rational(1, 3).str() == "1/3");
    REQUIRE(Rational(4).str() == "4");
    REQUIRE(Rational(-7, 2).str() == "-7/2");
    REQUIRE(Rational(1, 3).decimal_str(4) == "0.3333");
    REQUIRE(Rational(-7, 2).decimal_str(4) == "-3.5000");
    REQUIRE(Rational(5).decimal_str(0) == "5");
    REQUIRE(Rational::parse("0.005") == Rational(1, 200));
    REQUIRE(Rational::parse("-2/4") == Rational(-1, 2));
    REQUIRE(Rational::parse("3") == Rational(3));
    REQUIRE(Rational::parse("79820/16008001") == Rational(79820, 16008001));
    REQUIRE(Rational::parse("-0.25") == Rational(-1, 4));
    REQUIRE_THROWS_AS(Rational::parse(""), std::invalid_argument);
    for (Rational r : {Rational(7, 9), Rational(-22, 7), Rational(0), Rational(4001)})
        REQUIRE(Rational::parse(r.str()) == r);
}

TEST_CASE("rational floor sqrt is exact at and around squares") {
    REQUIRE(floor_sqrt(Rational(0)) == 0);
    REQUIRE(floor_sqrt(Rational(1)) == 1);
    REQUIRE(floor_sqrt(Rational(2)) == 1);
    REQUIRE(floor_sqrt(Rational(4)) == 2);
    REQUIRE(floor_sqrt(Rational(1, 4)) == 0);
    REQUIRE(floor_sqrt(Rational(9, 4)) == 1);   // 2.25
    REQUIRE(floor_sqrt(Rational(28, 3)) == 3);  // 9.33...
    REQUIRE(floor_sqrt(Rational(81735680, 16008001)) == 2);  // ~5.106
    REQUIRE_THROWS_AS(floor_sqrt(Rational(-1)), std::domain_error);
    Rng rng(19);
    for (int t = 0; t < 200; ++t) {
        Rational r(std::int64_t(rng.below(1u << 20)), 1 + std::int64_t(rng.below(1000)));
        std::int64_t s = floor_sqrt(r);
        REQUIRE(Rational(s) * Rational(s) <= r);
        REQUIRE(Rational(s + 1) * Rational(s + 1) > r);
    }
}

TEST_CASE("sqrt-scaled comparisons decide exactly, including ties") {
    // eps = 4 has an integer square root, so ties are constructible.
    REQUIRE(le_sqrt_scaled(Rational(6), 3, Rational(4)));       // 6 <= 6
    REQUIRE_FALSE(lt_sqrt_scaled(Rational(6), 3, Rational(4)));  // not <
    REQUIRE_FALSE(le_sqrt_scaled(Rational(6) + Rational(1, 1000000), 3, Rational(4)));
    REQUIRE(le_sqrt_scaled(Rational(2), 4, Rational(1, 4)));  // 2 <= 4*(1/2)
    REQUIRE_FALSE(lt_sqrt_scaled(Rational(2), 4, Rational(1, 4)));
    REQUIRE_FALSE(le_sqrt_scaled(Rational(201, 100), 4, Rational(1, 4)));
    REQUIRE(lt_sqrt_scaled(Rational(199, 100), 4, Rational(1, 4)));
    // Sign conventions.
    REQUIRE(le_sqrt_scaled(Rational(-5), 0, Rational(0)));
    REQUIRE(lt_sqrt_scaled(Rational(-5), 0, Rational(0)));
    REQUIRE(le_sqrt_scaled(Rational(0), 0, Rational(0)));
    REQUIRE_FALSE(lt_sqrt_scaled(Rational(0), 0, Rational(1)));
    REQUIRE(lt_sqrt_scaled(Rational(0), 1, Rational(1, 100)));
    REQUIRE(gt_sqrt_scaled(Rational(7), 3, Rational(4)));
    REQUIRE(ge_sqrt_scaled(Rational(6), 3, Rational(4)));
    REQUIRE_THROWS_AS(le_sqrt_scaled(Rational(1), -1, Rational(1)), std::domain_error);
    REQUIRE_THROWS_AS(lt_sqrt_scaled(Rational(1), 1, Rational(-1)), std::domain_error);
    // Out-of-range squared operands raise instead of wrapping.
    REQUIRE_THROWS_AS(le_sqrt_scaled(Rational(std::int64_t(1) << 62), 2, Rational(1, 3)),
                      std::overflow_error);
}

TEST_CASE("global thresholds carry their fixed values") {
    REQUIRE(kEpsilonMax == Rational(1, 100));
    REQUIRE(kMinDegree == 15);
    REQUIRE(kScaleConstant == 15);
    REQUIRE(kRobustnessBound == Rational(1, 200));
}

TEST_CASE("derived constants follow the window and localizer formulas") {
    // Production-size parameters (frozen values checked by hand).
    DecoderConstants big = DecoderConstants::derive(Rational(79820, 16008001), 16, 0);
    REQUIRE(big.window == 32);
    REQUIRE(big.localizer_degree == 4);  // floor(sqrt(eps)*32) + 0 + 2
    REQUIRE(big.window_error_cap() == 5);  // floor(eps * 32^2)
    // Small fixture used by the pipeline tests.
    DecoderConstants small = DecoderConstants::derive(Rational(21, 576), 8, 0);
    REQUIRE(small.window == 16);
    REQUIRE(small.localizer_degree == 5);  // floor(sqrt(21/576)*16) = 3, +2
    REQUIRE(small.window_error_cap() == 9);
    // Genus shifts both derived quantities.
    DecoderConstants curved = DecoderConstants::derive(Rational(0), 16, 1);
    REQUIRE(curved.window == 34);
    REQUIRE(curved.localizer_degree == 3);  // 0 + genus + 2
    REQUIRE_THROWS_AS(DecoderConstants::derive(Rational(-1, 4), 4, 0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(DecoderConstants::derive(Rational(2), 4, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(DecoderConstants::derive(Rational(1, 4), -1, 0),
                      std::invalid_argument);
}

TEST_CASE("line pruning threshold is exact at the boundary") {
    DecoderConstants k = DecoderConstants::derive(Rational(21, 576), 8, 0);
    // threshold fraction sqrt(21/576)/4 ~ 0.0477; on length 24 the cut sits
    // between 1 and 2 errors.
    REQUIRE_FALSE(k.line_exceeds_prune_threshold(1, 24));
    REQUIRE(k.line_exceeds_prune_threshold(2, 24));
    REQUIRE_FALSE(k.line_exceeds_prune_threshold(0, 24));
    REQUIRE_THROWS_AS(k.line_exceeds_prune_threshold(-1, 24), std::invalid_argument);
    REQUIRE_THROWS_AS(k.line_exceeds_prune_threshold(1, 0), std::invalid_argument);
    // Degenerate eps: any error at all exceeds.
    DecoderConstants z = DecoderConstants::derive(Rational(0), 20, 0);
    REQUIRE_FALSE(z.line_exceeds_prune_threshold(0, 24));
    REQUIRE(z.line_exceeds_prune_threshold(1, 24));
    REQUIRE(z.window_error_cap() == 0);
}

TEST_CASE("window quarter threshold cuts strictly above one fourth") {
    DecoderConstants k = DecoderConstants::derive(Rational(21, 576), 8, 0);
    REQUIRE_FALSE(k.exceeds_quarter_threshold(4, 16));  // 4/16 == 1/4 exactly
    REQUIRE(k.exceeds_quarter_threshold(5, 16));
    REQUIRE_FALSE(k.exceeds_quarter_threshold(0, 16));
    DecoderConstants z = DecoderConstants::derive(Rational(0), 20, 0);
    REQUIRE(z.exceeds_quarter_threshold(1, 16));
    REQUIRE_FALSE(z.exceeds_quarter_threshold(0, 16));
}

TEST_CASE("precondition report accepts the production parameter set") {
    PreconditionReport r =
        check_preconditions(4001, 16, 0, 4001, Rational(79820, 16008001));
    REQUIRE(r.ok());
    REQUIRE(r.hypotheses_ok);
    REQUIRE(r.inequalities_ok);
    REQUIRE_FALSE(r.degenerate);
    for (const PreconditionCheck& c : r.checks) {
        INFO(c.name << ": " << c.detail);
        REQUIRE(c.pass);
    }
    REQUIRE(r.checks.size() == 10);
}

TEST_CASE("degenerate zero-disagreement runs pass on hypotheses alone") {
    PreconditionReport r = check_preconditions(4001, 16, 0, 4001, Rational(0));
    REQUIRE(r.degenerate);
    REQUIRE(r.hypotheses_ok);
    REQUIRE_FALSE(r.inequalities_ok);  // the literal inequalities need eps > 0
    REQUIRE(r.ok());
}

TEST_CASE("each violated hypothesis flips the verdict") {
    Rational eps(79820, 16008001);
    REQUIRE_FALSE(check_preconditions(4001, 15, 0, 4001, eps).ok());   // degree floor
    REQUIRE_FALSE(check_preconditions(3840, 16, 0, 4001, eps).ok());   // length floor
    REQUIRE_FALSE(check_preconditions(4001, 16, 16, 4001, eps).ok());  // genus dominates
    REQUIRE_FALSE(check_preconditions(4001, 16, 0, 4001, Rational(1, 100)).ok());
    REQUIRE_FALSE(check_preconditions(4001, 16, 0, 4001, Rational(1, 50)).ok());
    // The small pipeline fixture is deliberately outside the guarantee.
    REQUIRE_FALSE(check_preconditions(24, 8, 0, 29, Rational(21, 576)).ok());
    REQUIRE_THROWS_AS(check_preconditions(0, 16, 0, 4001, eps), std::invalid_argument);
    REQUIRE_THROWS_AS(check_preconditions(4001, 16, -1, 4001, eps), std::invalid_argument);
    REQUIRE_THROWS_AS(check_preconditions((std::int64_t(1) << 40) + 1, 16, 0, 4001, eps),
                      std::invalid_argument);
}
