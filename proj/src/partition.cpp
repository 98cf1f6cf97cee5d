#include "crem/partition.hpp"

#include "crem/phases.hpp"

namespace crem {

std::complex<double> normalize_b1(const ScaledComplex& x, ComplexTemperature beta, double rho,
                                  double t, double phase_factor) {
    if (!(t > 0.0)) throw DomainError("normalize_b1 needs t > 0");
    double log_shift = -t * (1.0 + 0.5 * (beta.sigma * beta.sigma - beta.tau * beta.tau));
    double phase_shift = -phase_factor * rho * beta.sigma * beta.tau * t;
    return x.value_scaled(log_shift, phase_shift);
}

std::complex<double> normalize_b2(const ScaledComplex& x, double sigma, double t) {
    return x.value_scaled(-sigma * m_of_t(t));
}

std::complex<double> normalize_b3(const ScaledComplex& x, double sigma, double t) {
    return x.value_scaled(-t * (0.5 + sigma * sigma));
}

std::complex<double> martingale_bbm(ComplexTemperature beta, double rho, double t,
                                    const OffspringDistribution& dist, std::uint64_t seed,
                                    std::uint64_t replica_index, double phase_factor) {
    if (t == 0.0) return {1.0, 0.0};  // single particle at the origin
    FieldParams params;
    params.speed = SpeedFunction::identity();
    params.offspring = dist;
    params.t = t;
    params.rho = rho;
    SinkConfig sinks;
    sinks.track_max = false;
    sinks.betas = {beta};
    auto out = run_replica(params, sinks, seed, replica_index, select_kernel(KernelKind::Auto));
    return normalize_b1(out.partition[0], beta, rho, t, phase_factor);
}

}  // namespace crem
