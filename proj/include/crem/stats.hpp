#pragma once
// Estimators and hypothesis checks on replica outputs: moment summaries with
// jackknife errors, phase-uniformity and mixed-moment isotropy checks,
// the |.|^4 / |.|^2 squared Gaussianity ratio, and least-squares slope fits.

#include <complex>
#include <span>
#include <vector>

#include "crem/errors.hpp"

namespace crem {

struct MomentSummary {
    std::size_t n = 0;
    std::complex<double> mean{0.0, 0.0};
    double abs2_mean = 0.0;
    double abs4_mean = 0.0;
    double stderr_mean = 0.0;  // sqrt((Var Re + Var Im)/n)
    double stderr_abs2 = 0.0;  // jackknife
};

MomentSummary summarize(std::span<const std::complex<double>> samples);

struct MixedMoment {
    int a = 0, b = 0;                 // E[N^a conj(N)^b]
    std::complex<double> value{0.0};  // sample mean
    double stderr_ = 0.0;
    double z = 0.0;  // |value| / stderr
};

struct IsotropyResult {
    double ks_phase_p = 0.0;  // KS of arg/2pi against uniform
    std::vector<MixedMoment> mixed;  // (1,0), (2,0), (2,1), (3,1)
};

IsotropyResult isotropy_tests(std::span<const std::complex<double>> samples);

struct GaussianityRatio {
    double ratio = 0.0;  // abs4_mean / abs2_mean^2; 2 for the isotropic complex Gaussian
    double stderr_ = 0.0;  // jackknife
};

GaussianityRatio gaussianity_ratio(std::span<const std::complex<double>> samples);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double resid = 0.0;  // sqrt(mean squared residual)
};

SlopeFit slope_fit(std::span<const std::pair<double, double>> pairs);

// One-sample KS p-value of values in [0,1) against the uniform law, using the
// asymptotic KS distribution with the Stephens small-sample correction.
double ks_uniform_pvalue(std::vector<double> values);

// Jackknife standard error of the sample variance of complex draws
// (1/(n-1)) sum |d_i - mean|^2.
double sample_variance(std::span<const std::complex<double>> samples);
double sample_variance_jackknife_stderr(std::span<const std::complex<double>> samples);

}  // namespace crem
