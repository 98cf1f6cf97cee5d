#include "crem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crem {

namespace {

// Asymptotic KS tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}.
double ks_tail(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 128; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double jackknife_stderr_from_loo(const std::vector<double>& loo) {
    double n = static_cast<double>(loo.size());
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    return std::sqrt((n - 1.0) / n * ss);
}

}  // namespace

MomentSummary summarize(std::span<const std::complex<double>> samples) {
    if (samples.size() < 2) throw TooFewSamples("summarize needs at least 2 samples");
    MomentSummary s;
    s.n = samples.size();
    double n = static_cast<double>(s.n);
    double sre = 0.0, sim = 0.0, s2 = 0.0, s4 = 0.0;
    for (auto z : samples) {
        sre += z.real();
        sim += z.imag();
        double a2 = std::norm(z);
        s2 += a2;
        s4 += a2 * a2;
    }
    s.mean = {sre / n, sim / n};
    s.abs2_mean = s2 / n;
    s.abs4_mean = s4 / n;
    double var_re = 0.0, var_im = 0.0, var_a2 = 0.0;
    for (auto z : samples) {
        var_re += (z.real() - s.mean.real()) * (z.real() - s.mean.real());
        var_im += (z.imag() - s.mean.imag()) * (z.imag() - s.mean.imag());
        var_a2 += (std::norm(z) - s.abs2_mean) * (std::norm(z) - s.abs2_mean);
    }
    s.stderr_mean = std::sqrt((var_re + var_im) / (n - 1.0) / n);
    // abs2_mean is itself a sample mean; its jackknife collapses to the
    // standard error of |z|^2, kept as a jackknife for uniformity.
    s.stderr_abs2 = std::sqrt(var_a2 / (n - 1.0) / n);
    return s;
}

IsotropyResult isotropy_tests(std::span<const std::complex<double>> samples) {
    if (samples.size() < 100) throw TooFewSamples("isotropy_tests needs at least 100 samples");
    IsotropyResult res;

    std::vector<double> phases;
    phases.reserve(samples.size());
    for (auto z : samples) {
        double p = std::arg(z) / (2.0 * std::numbers::pi);  // (-1/2, 1/2]
        if (p < 0.0) p += 1.0;
        phases.push_back(p);
    }
    res.ks_phase_p = ks_uniform_pvalue(std::move(phases));

    const int pairs[4][2] = {{1, 0}, {2, 0}, {2, 1}, {3, 1}};
    double n = static_cast<double>(samples.size());
    for (auto [a, b] : pairs) {
        MixedMoment m;
        m.a = a;
        m.b = b;
        std::complex<double> sum{0.0, 0.0};
        double ss = 0.0;
        std::vector<std::complex<double>> vals;
        vals.reserve(samples.size());
        for (auto z : samples) {
            std::complex<double> w = std::pow(z, a) * std::pow(std::conj(z), b);
            vals.push_back(w);
            sum += w;
        }
        m.value = sum / n;
        for (auto w : vals) ss += std::norm(w - m.value);
        m.stderr_ = std::sqrt(ss / (n - 1.0) / n);
        m.z = m.stderr_ > 0.0 ? std::abs(m.value) / m.stderr_ : 0.0;
        res.mixed.push_back(m);
    }
    return res;
}

GaussianityRatio gaussianity_ratio(std::span<const std::complex<double>> samples) {
    if (samples.size() < 100) throw TooFewSamples("gaussianity_ratio needs at least 100 samples");
    double n = static_cast<double>(samples.size());
    double s2 = 0.0, s4 = 0.0;
    for (auto z : samples) {
        double a2 = std::norm(z);
        s2 += a2;
        s4 += a2 * a2;
    }
    GaussianityRatio r;
    double m2 = s2 / n, m4 = s4 / n;
    r.ratio = m4 / (m2 * m2);
    std::vector<double> loo;
    loo.reserve(samples.size());
    for (auto z : samples) {
        double a2 = std::norm(z);
        double m2i = (s2 - a2) / (n - 1.0);
        double m4i = (s4 - a2 * a2) / (n - 1.0);
        loo.push_back(m4i / (m2i * m2i));
    }
    r.stderr_ = jackknife_stderr_from_loo(loo);
    return r;
}

SlopeFit slope_fit(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw DegenerateDesign("slope_fit needs at least 3 points");
    double n = static_cast<double>(pairs.size());
    double sx = 0.0, sy = 0.0;
    for (auto [x, y] : pairs) {
        sx += x;
        sy += y;
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (auto [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw DegenerateDesign("slope_fit needs distinct abscissae");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (auto [x, y] : pairs) {
        double r = y - (f.intercept + f.slope * x);
        ss += r * r;
    }
    f.resid = std::sqrt(ss / n);
    return f;
}

double ks_uniform_pvalue(std::vector<double> values) {
    if (values.size() < 2) throw TooFewSamples("ks test needs at least 2 samples");
    std::sort(values.begin(), values.end());
    double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double hi = (static_cast<double>(i) + 1.0) / n - values[i];
        double lo = values[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    double sqrt_n = std::sqrt(n);
    double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    return ks_tail(lambda);
}

double sample_variance(std::span<const std::complex<double>> samples) {
    if (samples.size() < 2) throw TooFewSamples("sample_variance needs at least 2 samples");
    double n = static_cast<double>(samples.size());
    std::complex<double> sum{0.0, 0.0};
    for (auto z : samples) sum += z;
    std::complex<double> mean = sum / n;
    double ss = 0.0;
    for (auto z : samples) ss += std::norm(z - mean);
    return ss / (n - 1.0);
}

double sample_variance_jackknife_stderr(std::span<const std::complex<double>> samples) {
    if (samples.size() < 3) throw TooFewSamples("jackknife needs at least 3 samples");
    double n = static_cast<double>(samples.size());
    std::complex<double> s{0.0, 0.0};
    double q = 0.0;
    for (auto z : samples) {
        s += z;
        q += std::norm(z);
    }
    std::vector<double> loo;
    loo.reserve(samples.size());
    for (auto z : samples) {
        std::complex<double> mi = (s - z) / (n - 1.0);
        double qi = q - std::norm(z);
        // sum |d - mi|^2 over the held-in points = qi - (n-1)|mi|^2
        loo.push_back((qi - (n - 1.0) * std::norm(mi)) / (n - 2.0));
    }
    return jackknife_stderr_from_loo(loo);
}

}  // namespace crem
