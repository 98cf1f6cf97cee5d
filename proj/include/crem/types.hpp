#pragma once
// Small value types shared by several modules.

#include <algorithm>
#include <cmath>

namespace crem {

// Inverse temperature beta = sigma + i*tau.
struct ComplexTemperature {
    double sigma = 0.0;
    double tau = 0.0;
};

// Time grid spacing for envelope checks during a replica pass.
struct GridSpec {
    double step = 0.25;
};

inline double default_grid_step(double t) { return std::min(0.05 * t, 0.25); }

// Parameters of the upper envelope U_{A,gamma}(s) = m_A(s) + clamp^gamma.
struct EnvelopeSpec {
    double gamma = 0.3;
    double c = 20.0;
};

// Extremal snapshot: keep leaves with value >= m(t) - b, cluster leaves whose
// most recent common ancestor lies above t - w.
struct SnapshotSpec {
    double b = 8.0;
    double w = 1.0;
};

}  // namespace crem
