#pragma once
// The per-leaf inner loop: accumulate e^{sigma_j*x + i*tau_j*y} into one
// scaled-compensated sum per beta. This is the data-parallel hot path of the
// whole simulator (leaves x betas terms), so it comes in a scalar reference
// version and an AVX2 version selected at runtime and equivalence-tested
// against each other. Structure-of-arrays mirrors ScaledComplex::add_term.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "crem/scaled_complex.hpp"
#include "crem/types.hpp"

namespace crem {

struct PartitionSoA {
    std::vector<double> sigma, tau;
    std::vector<double> log_scale, m_re, m_im, c_re, c_im;
    bool empty = true;

    explicit PartitionSoA(const std::vector<ComplexTemperature>& betas) {
        const std::size_t n = betas.size();
        sigma.reserve(n);
        tau.reserve(n);
        for (const auto& b : betas) {
            sigma.push_back(b.sigma);
            tau.push_back(b.tau);
        }
        log_scale.assign(n, 0.0);
        m_re.assign(n, 0.0);
        m_im.assign(n, 0.0);
        c_re.assign(n, 0.0);
        c_im.assign(n, 0.0);
    }

    std::size_t size() const { return sigma.size(); }

    std::vector<ScaledComplex> finalize() const {
        std::vector<ScaledComplex> out(size());
        for (std::size_t j = 0; j < size(); ++j) {
            out[j].log_scale = log_scale[j];
            out[j].mantissa = {m_re[j], m_im[j]};
            out[j].comp = {c_re[j], c_im[j]};
        }
        return out;
    }
};

enum class KernelKind { Auto, Scalar, Avx2 };

KernelKind parse_kernel_kind(const std::string& name);  // "auto" | "scalar" | "avx2"

using LeafAccumulateFn = void (*)(PartitionSoA&, double x, double y);

// Resolves Auto to the best kernel this CPU supports. Throws DomainError if a
// forced kernel is unavailable.
LeafAccumulateFn select_kernel(KernelKind kind);
const char* kernel_name(LeafAccumulateFn fn);
bool avx2_available();

namespace kernels {
void accumulate_leaf_scalar(PartitionSoA& acc, double x, double y);
#if defined(CREM_HAVE_AVX2_BUILD)
void accumulate_leaf_avx2(PartitionSoA& acc, double x, double y);
#endif
}  // namespace kernels

}  // namespace crem
