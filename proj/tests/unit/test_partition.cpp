#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "crem/field.hpp"
#include "crem/oracles.hpp"
#include "crem/partition.hpp"
#include "crem/stats.hpp"

using namespace crem;

namespace {

std::vector<ScaledComplex> partition_sums(double t, double rho,
                                          const std::vector<ComplexTemperature>& betas,
                                          std::uint64_t seed, std::uint64_t reps,
                                          std::vector<std::uint64_t>* n_t = nullptr) {
    FieldParams params;
    params.speed = SpeedFunction::exp_family(3.0);
    params.offspring = OffspringDistribution::binary();
    params.t = t;
    params.rho = rho;
    SinkConfig sinks;
    sinks.track_max = false;
    sinks.betas = betas;
    std::vector<ScaledComplex> out;
    auto res = run_replicas(params, sinks, seed, reps, 2, select_kernel(KernelKind::Auto));
    for (const auto& o : res) {
        for (const auto& p : o.partition) out.push_back(p);
        if (n_t) n_t->push_back(o.n_t);
    }
    return out;
}

}  // namespace

TEST_CASE("normalize_b1 at beta = 0 is n(t) e^{-t} with unit mean") {
    std::vector<std::uint64_t> n_t;
    auto sums = partition_sums(5.0, 0.0, {{0.0, 0.0}}, 11, 4000, &n_t);
    std::vector<std::complex<double>> draws;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        auto d = normalize_b1(sums[i], {0.0, 0.0}, 0.0, 5.0);
        CHECK(d.imag() == 0.0);
        CHECK(d.real() == doctest::Approx(double(n_t[i]) * std::exp(-5.0)).epsilon(1e-12));
        draws.push_back(d);
    }
    auto s = summarize(draws);
    CHECK(std::abs(s.mean - std::complex<double>{1.0, 0.0}) <= 3.0 * s.stderr_mean);
}

TEST_CASE("mean-one pins the phase factor to 1") {
    // (sigma, tau, rho, t) = (0.3, 0.4, 0.5, 6): the first-moment phase is
    // rho sigma tau t = 0.36 rad, so the wrong factor shows up as a rotation.
    ComplexTemperature beta{0.3, 0.4};
    auto sums = partition_sums(6.0, 0.5, {beta}, 2211, 10000);
    std::vector<std::complex<double>> pf1, pf2;
    for (const auto& x : sums) {
        pf1.push_back(normalize_b1(x, beta, 0.5, 6.0, 1.0));
        pf2.push_back(normalize_b1(x, beta, 0.5, 6.0, 2.0));
    }
    auto s1 = summarize(pf1);
    auto s2 = summarize(pf2);
    double z1 = std::abs(s1.mean - std::complex<double>{1.0, 0.0}) / s1.stderr_mean;
    double z2 = std::abs(s2.mean - std::complex<double>{1.0, 0.0}) / s2.stderr_mean;
    CHECK(z1 <= 3.0);
    CHECK(z2 > 5.0);
}

TEST_CASE("normalize_b1 multiplier cases") {
    ScaledComplex x;
    x.add_exp({2.0, 0.7});
    // sigma = tau: (sigma^2 - tau^2)/2 = 0, multiplier e^{-t}; rho = 0 makes
    // the phase factor irrelevant
    auto v = normalize_b1(x, {0.3, 0.3}, 0.0, 10.0);
    CHECK(std::abs(v) == doctest::Approx(std::abs(x.value()) * std::exp(-10.0)).epsilon(1e-12));
    // tau = 0: normalization e^{-t(1+sigma^2/2)} regardless of the phase factor
    auto w1 = normalize_b1(x, {0.5, 0.0}, 0.9, 4.0, 1.0);
    auto w2 = normalize_b1(x, {0.5, 0.0}, 0.9, 4.0, 2.0);
    CHECK(w1 == w2);
    CHECK(std::abs(w1) == doctest::Approx(std::abs(x.value()) * std::exp(-4.0 * 1.125)).epsilon(1e-12));
}

TEST_CASE("normalize_b2 and normalize_b3 apply their exact multipliers") {
    ScaledComplex x;
    x.add_exp({2.0, 0.7});
    // b2 at sigma = 0 leaves the value unchanged
    CHECK(normalize_b2(x, 0.0, 9.0) == x.value());
    // b2 multiplier at t = 100, sigma = 1 is e^{-m(100)} = e^{-139.7932...}
    auto v = normalize_b2(x, 1.0, 100.0);
    CHECK(std::abs(v) == doctest::Approx(std::abs(x.value()) * std::exp(-139.79312)).epsilon(1e-4));
    // b3 multiplier e^{-t(1/2+sigma^2)}: sigma=0.3, t=10 -> e^{-5.9}
    auto w = normalize_b3(x, 0.3, 10.0);
    CHECK(std::abs(w) == doctest::Approx(std::abs(x.value()) * std::exp(-5.9)).epsilon(1e-12));
}

TEST_CASE("real beta with rho = 1 gives a real positive b2 normalization") {
    FieldParams params;
    params.speed = SpeedFunction::exp_family(3.0);
    params.offspring = OffspringDistribution::binary();
    params.t = 5.0;
    params.rho = 1.0;
    SinkConfig sinks;
    sinks.betas = {{2.0, 0.0}};
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        auto out = run_replica(params, sinks, 31, rep, select_kernel(KernelKind::Auto));
        auto v = normalize_b2(out.partition[0], 2.0, 5.0);
        CHECK(v.imag() == 0.0);
        CHECK(v.real() > 0.0);
    }
}

TEST_CASE("conjugation symmetry: tau -> -tau conjugates the partition sum bitwise") {
    auto plus = partition_sums(5.0, 0.5, {{0.4, 0.9}}, 77, 10);
    auto minus = partition_sums(5.0, 0.5, {{0.4, -0.9}}, 77, 10);
    REQUIRE(plus.size() == minus.size());
    for (std::size_t i = 0; i < plus.size(); ++i) {
        CHECK(plus[i].log_scale == minus[i].log_scale);
        CHECK(plus[i].mantissa.real() == minus[i].mantissa.real());
        CHECK(plus[i].mantissa.imag() == -minus[i].mantissa.imag());
    }
}

TEST_CASE("martingale draws: exact cases") {
    auto dist = OffspringDistribution::binary();
    CHECK(martingale_bbm({0.3, 0.3}, 0.0, 0.0, dist, 1, 0) == std::complex<double>{1.0, 0.0});

    // sigma = tau = 0: draw = n(t) e^{-t}; average near 1
    std::vector<std::complex<double>> draws;
    for (std::uint64_t rep = 0; rep < 4000; ++rep)
        draws.push_back(martingale_bbm({0.0, 0.0}, 0.0, 4.0, dist, 5, rep));
    auto s = summarize(draws);
    CHECK(std::abs(s.mean - std::complex<double>{1.0, 0.0}) <= 3.0 * s.stderr_mean);
}

TEST_CASE("martingale variance stabilizes in t and tracks the quadrature oracle") {
    auto dist = OffspringDistribution::binary();
    auto ident = SpeedFunction::identity();
    ComplexTemperature beta{0.3, 0.3};
    std::vector<double> variances;
    for (double t : {6.0, 8.0, 10.0}) {
        std::vector<std::complex<double>> draws;
        for (std::uint64_t rep = 0; rep < 2000; ++rep)
            draws.push_back(martingale_bbm(beta, 0.0, t, dist, 17, rep));
        double var = sample_variance(draws);
        double se = sample_variance_jackknife_stderr(draws);
        auto oracle = second_moment_b1_normalized(ident, beta, 0.0, t, 2.0);
        CHECK(!oracle.divergence_warning);
        CHECK(std::abs(var - (oracle.value - 1.0)) <= 4.0 * se);
        variances.push_back(var);
    }
    CHECK(variances[1] / variances[0] > 0.8);
    CHECK(variances[1] / variances[0] < 1.25);
    CHECK(variances[2] / variances[1] > 0.8);
    CHECK(variances[2] / variances[1] < 1.25);
}
