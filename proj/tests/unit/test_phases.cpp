#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crem/phases.hpp"
#include "crem/rng.hpp"

using namespace crem;

TEST_CASE("classification of the reference points") {
    auto origin = classify({0.0, 0.0});
    CHECK(origin.label == Phase::B1);
    CHECK(origin.predicted_limit == doctest::Approx(1.0));

    auto glassy = classify({2.0, 0.0});
    CHECK(glassy.label == Phase::B2);
    CHECK(glassy.predicted_limit == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-9));
    CHECK(glassy.predicted_limit == doctest::Approx(2.828427).epsilon(1e-6));

    auto oscillatory = classify({0.3, 1.1});
    CHECK(oscillatory.label == Phase::B3);
    CHECK(oscillatory.predicted_limit == doctest::Approx(0.59));

    double h = std::sqrt(0.5);
    auto triple = classify({h, h});
    CHECK(triple.label == Phase::Boundary);
    CHECK(triple.predicted_limit == doctest::Approx(1.0));
}

TEST_CASE("classification is symmetric in the signs of sigma and tau") {
    RngStream rng(12, 0, RngDomain::Fixture);
    for (int i = 0; i < 1000; ++i) {
        double s = 3.0 * rng.next_unit_half();
        double u = 3.0 * rng.next_unit_half();
        auto base = classify({s, u});
        for (auto [a, b] : {std::pair{-s, u}, {s, -u}, {-s, -u}}) {
            auto mirrored = classify({a, b});
            CHECK(mirrored.label == base.label);
            CHECK(mirrored.predicted_limit == doctest::Approx(base.predicted_limit).epsilon(1e-12));
        }
    }
}

TEST_CASE("the limit is continuous across every phase boundary") {
    const double eps = 1e-6;
    auto b1 = [](double s, double u) { return 1.0 + 0.5 * (s * s - u * u); };
    auto b2 = [](double s, double) { return std::numbers::sqrt2 * s; };
    auto b3 = [](double s, double) { return 0.5 + s * s; };

    // circle arc between B1 and B3
    for (int i = 0; i < 1000; ++i) {
        double theta = std::numbers::pi / 4 + (std::numbers::pi / 4) * (i + 0.5) / 1000.0;
        double s = std::cos(theta), u = std::sin(theta);
        CHECK(std::abs(b1(s * (1 - eps), u * (1 - eps)) - b3(s * (1 + eps), u * (1 + eps))) < 1e-4);
    }
    // diagonal between B1 and B2
    for (int i = 0; i < 1000; ++i) {
        double s = std::sqrt(0.5) + (std::numbers::sqrt2 - std::sqrt(0.5)) * (i + 0.5) / 1000.0;
        double u = std::numbers::sqrt2 - s;
        CHECK(std::abs(b1(s - eps, u - eps) - b2(s + eps, u + eps)) < 1e-4);
    }
    // vertical segment between B2 and B3
    for (int i = 0; i < 1000; ++i) {
        double s = std::sqrt(0.5), u = std::sqrt(0.5) + 2.0 * (i + 0.5) / 1000.0;
        CHECK(std::abs(b2(s + eps, u) - b3(s - eps, u)) < 1e-4);
    }
}

TEST_CASE("boundary distance drives the scan exclusion band") {
    CHECK(boundary_distance({std::sqrt(0.5), std::sqrt(0.5)}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(boundary_distance({0.0, 1.0}) == doctest::Approx(0.0));
    CHECK(boundary_distance({0.0, 0.0}) == doctest::Approx(1.0));
    // inside B2, far from all three curves
    CHECK(boundary_distance({2.0, 2.0}) > 0.5);
    // (2,0): nearest curve point is the diagonal endpoint (sqrt 2, 0)
    CHECK(boundary_distance({2.0, 0.0}) == doctest::Approx(2.0 - std::numbers::sqrt2).epsilon(1e-12));
}

TEST_CASE("m(t) closed form and limits") {
    CHECK(m_of_t(1.0) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
    CHECK(m_of_t(100.0) == doctest::Approx(139.7932).epsilon(1e-6));
    CHECK(std::abs(m_of_t(1e6) / 1e6 - std::numbers::sqrt2) < 1e-5);
    CHECK_THROWS_AS((void)m_of_t(0.0), DomainError);
}

TEST_CASE("extremal centering carries the 3/(2 sqrt 2) log coefficient") {
    for (double t : {8.0, 14.0, 100.0}) {
        CHECK(extremal_centering(t) ==
              doctest::Approx(std::numbers::sqrt2 * t -
                              3.0 * std::log(t) / (2.0 * std::numbers::sqrt2)).epsilon(1e-14));
        CHECK(m_of_t(t) - extremal_centering(t) ==
              doctest::Approx(std::log(t) / std::numbers::sqrt2).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)extremal_centering(0.0), DomainError);
}

TEST_CASE("m_A agrees with m at s = t and with the worked example") {
    auto a = SpeedFunction::exp_family(3.0);
    for (double t : {2.0, 6.0, 40.0}) CHECK(m_A(t, t, a) == doctest::Approx(m_of_t(t)).epsilon(1e-12));
    CHECK(m_A(3.0, 6.0, a) == doctest::Approx(2.3280).epsilon(1e-4));
    // log term vanishes at s = 1
    CHECK(m_A(1.0, 6.0, a) ==
          doctest::Approx(std::sqrt(2.0 * a.variance_profile(1.0, 6.0))).epsilon(1e-12));
    CHECK(m_A(0.0, 6.0, a) == 0.0);
}

TEST_CASE("envelope formula, clamps and monotonicity in C") {
    auto a = SpeedFunction::exp_family(3.0);
    double t = 100.0;
    // pick s with tA(s/t) = t/2 so the clamp is inactive at C = 20
    double s = a.inverse_variance_profile(t / 2.0, t);
    EnvelopeSpec spec{0.3, 20.0};
    CHECK(envelope_U(s, t, a, spec) == doctest::Approx(m_A(s, t, a) + std::pow(50.0, 0.3)).epsilon(1e-10));
    CHECK(envelope_U(s, t, a, spec) - m_A(s, t, a) == doctest::Approx(3.233).epsilon(1e-3));

    // near the ends the clamp pins to C^gamma
    CHECK(envelope_U(0.05, t, a, spec) ==
          doctest::Approx(m_A(0.05, t, a) + std::pow(20.0, 0.3)).epsilon(1e-12));
    CHECK(envelope_U(t, t, a, spec) ==
          doctest::Approx(m_A(t, t, a) + std::pow(20.0, 0.3)).epsilon(1e-12));

    RngStream rng(3, 0, RngDomain::Fixture);
    for (int i = 0; i < 200; ++i) {
        double ss = t * rng.next_unit_open();
        double prev = -1e300;
        for (double c : {5.0, 10.0, 20.0, 40.0}) {
            double val = envelope_U(ss, t, a, {0.3, c});
            CHECK(val >= prev);
            prev = val;
        }
        CHECK(envelope_U(ss, t, a, {0.3, 20.0}) >= m_A(ss, t, a));
    }
}
