#pragma once
// Correlated Gaussian fields (X, Y) generated along a streaming GW-tree
// traversal. Every edge segment carries one standard normal that drives both
// the CREM increment (variance tA(s1/t)-tA(s0/t)) and the sigma_b-scaled
// standard-BBM increment (variance sigma_b^2 (s1-s0)), which couples the two
// processes pathwise; an independent copy Z yields Y = rho X + sqrt(1-rho^2) Z
// at the leaves. Sinks (partition sums, max, envelope, snapshot, reservoir
// samples) see each leaf exactly once in a single pass.

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "crem/kernels/partition_kernel.hpp"
#include "crem/offspring.hpp"
#include "crem/scaled_complex.hpp"
#include "crem/speed_function.hpp"
#include "crem/types.hpp"

namespace crem {

struct FieldParams {
    SpeedFunction speed = SpeedFunction::exp_family(3.0);
    OffspringDistribution offspring = OffspringDistribution::binary();
    double t = 6.0;
    double rho = 0.0;
    GridSpec grid{};  // envelope-check subdivision
    std::uint64_t leaf_cap = 1ull << 27;
};

struct SinkConfig {
    std::vector<ComplexTemperature> betas;
    bool track_max = true;
    std::optional<EnvelopeSpec> envelope;
    std::optional<SnapshotSpec> snapshot;
    bool sample_leaf = false;  // one uniform leaf per replica: (x, y)
    bool sample_pair = false;  // one uniform leaf pair per replica: (x1, x2, branch time)
};

struct LeafSample {
    bool present = false;
    double x = 0.0, y = 0.0;
};

struct PairSample {
    bool present = false;
    double x1 = 0.0, x2 = 0.0;
    double d = 0.0;  // most recent common ancestor time
};

struct SnapshotPoint {
    double value_minus_m;
    std::uint32_t cluster;
};

struct ReplicaOutput {
    std::uint64_t replica_index = 0;
    std::uint64_t n_t = 0;
    bool overflowed = false;
    std::vector<ScaledComplex> partition;  // aligned with SinkConfig::betas
    double max_x = -std::numeric_limits<double>::infinity();
    // Envelope-crossing summary: crossing for clamp constant C happens iff
    // margin > C, where margin = sup exceedance^{1/gamma} over monitored times
    // whose exceedance already beats the tA-side of the clamp. margin_int
    // restricts to integer times (the union-bound comparison).
    bool envelope_crossed = false;
    double envelope_margin_any = -std::numeric_limits<double>::infinity();
    double envelope_margin_int = -std::numeric_limits<double>::infinity();
    std::vector<SnapshotPoint> snapshot;
    std::uint32_t snapshot_clusters = 0;
    LeafSample leaf;
    PairSample pair;
};

// Single pass over one sampled tree; deterministic in (seed, replica_index,
// params, sinks). Throws PopulationOverflow past params.leaf_cap.
ReplicaOutput run_replica(const FieldParams& params, const SinkConfig& sinks,
                          std::uint64_t seed, std::uint64_t replica_index,
                          LeafAccumulateFn kernel);

// Replicas 0..n-1 across a worker pool; outputs indexed by replica, so the
// merge order never depends on scheduling. Overflowed replicas are flagged,
// not fatal.
std::vector<ReplicaOutput> run_replicas(const FieldParams& params, const SinkConfig& sinks,
                                        std::uint64_t seed, std::uint64_t n_replicas,
                                        int workers, LeafAccumulateFn kernel);

struct CovarianceBin {
    double d_mean = 0.0;    // mean branch time of pairs in the bin
    double cov = 0.0;       // mean of x_i * x_j
    double stderr_ = 0.0;
    double theory = 0.0;    // t * A(d_mean / t)
    std::uint64_t count = 0;
};

struct CovarianceEstimate {
    double var_x = 0.0, var_x_stderr = 0.0;
    double cov_xy = 0.0, cov_xy_stderr = 0.0;
    std::vector<CovarianceBin> bins;
    std::uint64_t pairs_used = 0;
    std::uint64_t degenerate_skipped = 0;  // single-leaf replicas
    std::uint64_t overflowed = 0;
};

// One uniformly chosen leaf (and leaf pair) per replica keeps samples i.i.d.
// across replicas; within-replica leaves are correlated.
CovarianceEstimate leaf_covariance_estimate(const FieldParams& params, std::uint64_t replicas,
                                            int n_bins, std::uint64_t seed, int workers);

struct CrossingEstimate {
    double p_any = 0.0, p_any_stderr = 0.0;  // crossing at any grid/branch time
    double p_int = 0.0, p_int_stderr = 0.0;  // crossing at integer times only
    std::uint64_t replicas_used = 0;
    std::uint64_t overflowed = 0;
};

CrossingEstimate envelope_crossing_probability(const FieldParams& params, const EnvelopeSpec& env,
                                               std::uint64_t replicas, std::uint64_t seed,
                                               int workers);

}  // namespace crem
