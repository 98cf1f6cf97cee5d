#include <doctest.h>

#include <cmath>

#include "crem/speed_function.hpp"

using namespace crem;

TEST_CASE("exp family evaluates its closed form") {
    auto a = SpeedFunction::exp_family(3.0);
    CHECK(a.eval(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(a.eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.eval(0.5) == doctest::Approx((std::exp(1.5) - 1.0) / (std::exp(3.0) - 1.0)).epsilon(1e-14));
    CHECK(a.eval(0.5) == doctest::Approx(0.18243).epsilon(1e-4));
}

TEST_CASE("endpoint slopes match the differentiated closed forms") {
    auto a = SpeedFunction::exp_family(3.0);
    double e3 = std::exp(3.0);
    CHECK(std::abs(a.sigma_b_sq() - 3.0 / (e3 - 1.0)) < 1e-9);
    CHECK(std::abs(a.sigma_e_sq() - 3.0 * e3 / (e3 - 1.0)) < 1e-9);
    CHECK(a.sigma_b_sq() == doctest::Approx(0.157187).epsilon(1e-5));
    CHECK(a.sigma_e_sq() == doctest::Approx(3.157187).epsilon(1e-5));
}

TEST_CASE("variance profile and its inverse") {
    auto a = SpeedFunction::exp_family(3.0);
    CHECK(a.variance_profile(6.0, 6.0) == doctest::Approx(6.0));
    CHECK(a.variance_profile(0.0, 6.0) == doctest::Approx(0.0));
    double v = a.variance_profile(3.0, 6.0);
    CHECK(v == doctest::Approx(1.0946).epsilon(1e-4));

    CHECK(a.inverse_variance_profile(0.0, 6.0) == doctest::Approx(0.0));
    CHECK(a.inverse_variance_profile(6.0, 6.0) == doctest::Approx(6.0));
    CHECK(a.inverse_variance_profile(v, 6.0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_THROWS_AS((void)a.inverse_variance_profile(7.0, 6.0), NotAttained);
}

TEST_CASE("round trip of the variance profile") {
    auto a = SpeedFunction::exp_family(3.0);
    double t = 10.0;
    for (double s : {0.1, 1.0, 2.5, 5.0, 7.75, 9.9}) {
        double back = a.inverse_variance_profile(a.variance_profile(s, t), t);
        CHECK(std::abs(back - s) <= 1e-8 * t);
    }
}

TEST_CASE("eval is monotone over sorted inputs") {
    for (auto a : {SpeedFunction::exp_family(3.0), SpeedFunction::exp_family(-2.0),
                   SpeedFunction::parse("pwl:0,0;0.3,0.1;0.7,0.2;1,1")}) {
        double prev = a.eval(0.0);
        for (int i = 1; i <= 500; ++i) {
            double cur = a.eval(i / 500.0);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("validation catches the spec'd failure modes") {
    CHECK(SpeedFunction::exp_family(3.0).validate(100, true).ok());

    // A(x) = x fails strict weak-correlation validation but passes non-strict.
    auto ident = SpeedFunction::identity();
    auto strict = ident.validate(100, true);
    REQUIRE(!strict.ok());
    CHECK(strict.issues.front().condition == "A(x) < x fails");
    CHECK(ident.validate(100, false).ok());

    auto above = SpeedFunction::parse("pwl:0,0;0.5,0.6;1,1");
    auto rep = above.validate(101, true);  // grid hits x = 0.5 exactly
    REQUIRE(!rep.ok());
    bool found = false;
    for (const auto& issue : rep.issues)
        found |= issue.condition == "A(x) < x fails" && std::abs(issue.x - 0.5) < 0.02;
    CHECK(found);

    CHECK_THROWS_AS(SpeedFunction::parse("pwl:0,0;0.5,0.4;0.5,0.6;1,1"), MalformedKnots);
    CHECK_THROWS_AS((void)SpeedFunction::exp_family(3.0).eval(1.5), DomainError);
}

TEST_CASE("non-monotone and bad-endpoint profiles are reported") {
    auto dec = SpeedFunction::parse("pwl:0,0;0.5,0.4;1,0.2");
    auto rep = dec.validate(64, false);
    bool endpoint = false, monotone = false;
    for (const auto& issue : rep.issues) {
        endpoint |= issue.condition == "A(1) = 1 fails";
        monotone |= issue.condition == "A non-decreasing fails";
    }
    CHECK(endpoint);
    CHECK(monotone);
}

TEST_CASE("declared infinite end slope refuses sigma_e_sq") {
    auto a = SpeedFunction::piecewise_linear({{0.0, 0.0}, {0.9, 0.2}, {1.0, 1.0}}, true);
    CHECK(a.sigma_e_infinite());
    CHECK_THROWS_AS((void)a.sigma_e_sq(), InfiniteEndSlope);
}

TEST_CASE("parse round-trips the config syntax") {
    auto a = SpeedFunction::parse("exp:3.0");
    CHECK(a.form() == SpeedFunction::Form::ExpFamily);
    CHECK(a.eval(0.5) == doctest::Approx(0.18243).epsilon(1e-4));
    auto b = SpeedFunction::parse("pwl:0,0;0.5,0.4;1,1");
    CHECK(b.eval(0.25) == doctest::Approx(0.2));
    CHECK(SpeedFunction::parse(b.spec_string()).eval(0.25) == doctest::Approx(0.2));
    CHECK_THROWS_AS(SpeedFunction::parse("spline:1,2"), DomainError);
}

TEST_CASE("identity detection gives exact profile values") {
    auto ident = SpeedFunction::identity();
    CHECK(ident.is_identity());
    CHECK(ident.variance_profile(1.37, 6.0) == 1.37);  // bitwise, not approximate
    CHECK(ident.sigma_b_sq() == 1.0);
    CHECK(ident.sigma_e_sq() == 1.0);
}
