#include "crem/field.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "crem/phases.hpp"
#include "crem/rng.hpp"
#include "crem/tree.hpp"

namespace crem {

namespace {

bool is_integer_time(double s) {
    double r = std::round(s);
    return r >= 1.0 && std::abs(s - r) < 1e-9;
}

// Immutable per-run context shared by all replicas.
struct FieldContext {
    const FieldParams& fp;
    const SinkConfig& sinks;
    LeafAccumulateFn kernel;
    double sigma_b = 0.0;      // sqrt(A'(0))
    double sqrt1mrho2 = 0.0;
    double m_t = 0.0;          // m(t), for snapshots
    double cluster_cut = 0.0;  // t - w
    double inv_gamma = 0.0;

    struct GridRow {
        double time;
        double var;     // tA(time/t)
        double m_a;     // m_A(time)
        double q_pow;   // min(var, t-var)^gamma
        bool integer;
    };
    std::vector<GridRow> grid;  // interior grid times, used only with envelope

    FieldContext(const FieldParams& fp_, const SinkConfig& sinks_, LeafAccumulateFn kernel_)
        : fp(fp_), sinks(sinks_), kernel(kernel_) {
        sigma_b = std::sqrt(fp.speed.sigma_b_sq());
        sqrt1mrho2 = std::sqrt(std::max(0.0, 1.0 - fp.rho * fp.rho));
        m_t = m_of_t(fp.t);
        if (sinks.snapshot) cluster_cut = fp.t - sinks.snapshot->w;
        if (sinks.envelope) {
            inv_gamma = 1.0 / sinks.envelope->gamma;
            double step = fp.grid.step;
            if (!(step > 0.0)) throw DomainError("grid step must be positive");
            for (std::uint64_t i = 1; i * step < fp.t; ++i) {
                double s = static_cast<double>(i) * step;
                GridRow row;
                row.time = s;
                row.var = fp.speed.variance_profile(s, fp.t);
                row.m_a = m_A(s, fp.t, fp.speed);
                row.q_pow = std::pow(std::min(row.var, fp.t - row.var), sinks.envelope->gamma);
                row.integer = is_integer_time(s);
                grid.push_back(row);
            }
        }
    }
};

// DFS visitor carrying the path state; memory O(depth).
class FieldVisitor {
public:
    FieldVisitor(const FieldContext& ctx, std::uint64_t seed, std::uint64_t replica)
        : ctx_(ctx),
          field_rng_(seed, replica, RngDomain::Field),
          samp_rng_(seed, replica, RngDomain::Sampling),
          acc_(ctx.sinks.betas) {
        cur_ = State{};
    }

    void on_edge(double s0, double s1) {
        if (ctx_.sinks.envelope) {
            // Subdivide at grid times inside (s0, s1); check the envelope at
            // every subdivision point and at s1.
            std::size_t gi = grid_index_after(s0);
            double a = s0;
            double va = ctx_.fp.speed.variance_profile(a, ctx_.fp.t);
            while (gi < ctx_.grid.size() && ctx_.grid[gi].time < s1) {
                const auto& row = ctx_.grid[gi];
                advance(a, va, row.time, row.var);
                check_envelope_row(row);
                a = row.time;
                va = row.var;
                ++gi;
            }
            double v1 = ctx_.fp.speed.variance_profile(s1, ctx_.fp.t);
            advance(a, va, s1, v1);
            check_envelope_fresh(s1, v1);
        } else {
            double va = ctx_.fp.speed.variance_profile(s0, ctx_.fp.t);
            double v1 = ctx_.fp.speed.variance_profile(s1, ctx_.fp.t);
            advance(s0, va, s1, v1);
        }
        if (ctx_.sinks.snapshot && s0 < ctx_.cluster_cut && s1 >= ctx_.cluster_cut) {
            cur_.cluster = next_cluster_++;
        }
    }

    void on_branch(const BranchEvent& ev) { anc_times_.push_back(ev.time); }

    void on_push() { saved_.push_back(cur_); }

    void on_restore(double /*time*/) { cur_ = saved_.back(); }

    void on_pop() {
        saved_.pop_back();
        anc_times_.pop_back();
    }

    void on_leaf(int /*depth*/) {
        ++n_leaves_;
        double x = cur_.x;
        double y = ctx_.fp.rho * x + ctx_.sqrt1mrho2 * cur_.z;
        if (!ctx_.sinks.betas.empty()) ctx_.kernel(acc_, x, y);
        if (ctx_.sinks.track_max) max_x_ = std::max(max_x_, x);
        if (ctx_.sinks.snapshot) {
            double rel = x - ctx_.m_t;
            if (rel >= -ctx_.sinks.snapshot->b)
                snapshot_.push_back({rel, cur_.cluster});
        }
        if (ctx_.sinks.sample_leaf) {
            double u = samp_rng_.next_unit_half();
            if (u * static_cast<double>(n_leaves_) < 1.0) {
                leaf_.present = true;
                leaf_.x = x;
                leaf_.y = y;
            }
        }
        if (ctx_.sinks.sample_pair) {
            double u = samp_rng_.next_unit_half();
            if (n_leaves_ <= 2) {
                store_pair_slot(static_cast<int>(n_leaves_) - 1, x);
            } else {
                double scaled = u * static_cast<double>(n_leaves_);
                if (scaled < 2.0) store_pair_slot(scaled < 1.0 ? 0 : 1, x);
            }
        }
    }

    void fill_output(ReplicaOutput& out) {
        out.n_t = n_leaves_;
        out.partition = acc_.finalize();
        out.max_x = max_x_;
        if (ctx_.sinks.envelope) {
            out.envelope_margin_any = margin_any_;
            out.envelope_margin_int = margin_int_;
            out.envelope_crossed = margin_any_ > ctx_.sinks.envelope->c;
        }
        if (ctx_.sinks.snapshot) {
            out.snapshot = std::move(snapshot_);
            std::vector<std::uint32_t> ids;
            ids.reserve(out.snapshot.size());
            for (const auto& p : out.snapshot) ids.push_back(p.cluster);
            std::sort(ids.begin(), ids.end());
            out.snapshot_clusters =
                static_cast<std::uint32_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
        }
        out.leaf = leaf_;
        if (ctx_.sinks.sample_pair && filled_mask_ == 3u) {
            out.pair.present = true;
            out.pair.x1 = pair_x_[0];
            out.pair.x2 = pair_x_[1];
            out.pair.d = mrca_time();
        }
    }

    RngStream& field_rng() { return field_rng_; }

private:
    struct State {
        double x = 0.0;        // CREM field value along the path
        double x_tilde = 0.0;  // coupled sigma_b-scaled standard-BBM value
        double z = 0.0;        // independent copy driving the imaginary part
        std::uint32_t cluster = 0;
    };

    // Index of the first grid row with time > s. Row k holds time (k+1)*step.
    std::size_t grid_index_after(double s) const {
        double step = ctx_.fp.grid.step;
        auto u = static_cast<std::size_t>(std::max(0.0, std::floor(s / step)));
        if (u > ctx_.grid.size()) u = ctx_.grid.size();
        while (u > 0 && ctx_.grid[u - 1].time > s) --u;
        while (u < ctx_.grid.size() && ctx_.grid[u].time <= s) ++u;
        return u;
    }

    // One Gaussian segment [a, b] with precomputed profile values.
    void advance(double a, double va, double b, double vb) {
        if (b <= a && vb <= va) return;
        double g, gz;
        field_rng_.next_gaussian_pair(g, gz);
        double dv = std::max(0.0, vb - va);
        double sd = std::sqrt(dv);
        cur_.x += sd * g;
        cur_.x_tilde += ctx_.sigma_b * std::sqrt(std::max(0.0, b - a)) * g;
        cur_.z += sd * gz;
    }

    void check_envelope_row(const FieldContext::GridRow& row) {
        record_exceedance(cur_.x - row.m_a, row.q_pow, row.integer);
    }

    void check_envelope_fresh(double s, double v) {
        double e = cur_.x - m_A(s, ctx_.fp.t, ctx_.fp.speed);
        double q_pow = std::pow(std::min(v, ctx_.fp.t - v), ctx_.sinks.envelope->gamma);
        record_exceedance(e, q_pow, is_integer_time(s));
    }

    void record_exceedance(double e, double q_pow, bool integer) {
        if (e <= 0.0 || e <= q_pow) return;
        double margin = std::pow(e, ctx_.inv_gamma);
        margin_any_ = std::max(margin_any_, margin);
        if (integer) margin_int_ = std::max(margin_int_, margin);
    }

    void store_pair_slot(int slot, double x) {
        pair_x_[slot] = x;
        pair_anc_[slot] = anc_times_;
        filled_mask_ |= (1u << slot);
    }

    double mrca_time() const {
        const auto& a = pair_anc_[0];
        const auto& b = pair_anc_[1];
        double d = 0.0;
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            if (a[i] == b[i])
                d = a[i];
            else
                break;
        }
        return d;
    }

    const FieldContext& ctx_;
    RngStream field_rng_;
    RngStream samp_rng_;
    PartitionSoA acc_;
    State cur_;
    std::vector<State> saved_;
    std::vector<double> anc_times_;
    std::uint64_t n_leaves_ = 0;
    double max_x_ = -std::numeric_limits<double>::infinity();
    double margin_any_ = -std::numeric_limits<double>::infinity();
    double margin_int_ = -std::numeric_limits<double>::infinity();
    std::vector<SnapshotPoint> snapshot_;
    std::uint32_t next_cluster_ = 1;
    LeafSample leaf_;
    double pair_x_[2] = {0.0, 0.0};
    std::vector<double> pair_anc_[2];
    unsigned filled_mask_ = 0;
};

ReplicaOutput run_replica_ctx(const FieldContext& ctx, std::uint64_t seed,
                              std::uint64_t replica_index) {
    ReplicaOutput out;
    out.replica_index = replica_index;
    RngStream tree_rng(seed, replica_index, RngDomain::Tree);
    FieldVisitor vis(ctx, seed, replica_index);
    traverse(ctx.fp.offspring, ctx.fp.t, tree_rng, vis, ctx.fp.leaf_cap);
    vis.fill_output(out);
    return out;
}

}  // namespace

ReplicaOutput run_replica(const FieldParams& params, const SinkConfig& sinks, std::uint64_t seed,
                          std::uint64_t replica_index, LeafAccumulateFn kernel) {
    FieldContext ctx(params, sinks, kernel);
    return run_replica_ctx(ctx, seed, replica_index);
}

std::vector<ReplicaOutput> run_replicas(const FieldParams& params, const SinkConfig& sinks,
                                        std::uint64_t seed, std::uint64_t n_replicas, int workers,
                                        LeafAccumulateFn kernel) {
    FieldContext ctx(params, sinks, kernel);
    std::vector<ReplicaOutput> out(n_replicas);
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, 64));

    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= n_replicas) return;
            try {
                out[i] = run_replica_ctx(ctx, seed, i);
            } catch (const PopulationOverflow&) {
                out[i] = ReplicaOutput{};
                out[i].replica_index = i;
                out[i].overflowed = true;
            }
        }
    };
    if (workers == 1 || n_replicas <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

CovarianceEstimate leaf_covariance_estimate(const FieldParams& params, std::uint64_t replicas,
                                            int n_bins, std::uint64_t seed, int workers) {
    if (replicas < 100) throw DomainError("leaf_covariance_estimate needs >= 100 replicas");
    SinkConfig sinks;
    sinks.track_max = false;
    sinks.sample_leaf = true;
    sinks.sample_pair = true;
    auto outs = run_replicas(params, sinks, seed, replicas, workers, select_kernel(KernelKind::Auto));

    CovarianceEstimate est;
    // Accumulate per-bin sums of the pair products.
    struct BinAcc {
        double sum_p = 0.0, sum_p2 = 0.0, sum_d = 0.0;
        std::uint64_t n = 0;
    };
    std::vector<BinAcc> bins(static_cast<std::size_t>(n_bins));
    double sx = 0.0, sx2 = 0.0;
    double sxy = 0.0, sxy2 = 0.0, sy = 0.0;
    std::uint64_t n_single = 0;

    for (const auto& o : outs) {
        if (o.overflowed) {
            ++est.overflowed;
            continue;
        }
        if (o.leaf.present) {
            sx += o.leaf.x;
            sx2 += o.leaf.x * o.leaf.x;
            double p = o.leaf.x * o.leaf.y;
            sy += o.leaf.y;
            sxy += p;
            sxy2 += p * p;
            ++n_single;
        }
        if (!o.pair.present) {
            ++est.degenerate_skipped;
            continue;
        }
        double p = o.pair.x1 * o.pair.x2;
        int b = std::min(n_bins - 1, static_cast<int>(o.pair.d / params.t * n_bins));
        bins[static_cast<std::size_t>(b)].sum_p += p;
        bins[static_cast<std::size_t>(b)].sum_p2 += p * p;
        bins[static_cast<std::size_t>(b)].sum_d += o.pair.d;
        bins[static_cast<std::size_t>(b)].n += 1;
        ++est.pairs_used;
    }

    // Leaf marginals: Var x(t) = t, Cov(x,y) = rho t. E[x] = 0 but the sample
    // mean is subtracted anyway.
    double n = static_cast<double>(n_single);
    double mx = sx / n;
    est.var_x = sx2 / n - mx * mx;
    // x is Gaussian by construction, so Var(x^2) = 2 Var(x)^2 sets the stderr.
    est.var_x_stderr = std::sqrt(2.0 / n) * (sx2 / n);
    double mxy = sxy / n;
    est.cov_xy = mxy - mx * (sy / n);
    est.cov_xy_stderr = std::sqrt(std::max(0.0, (sxy2 / n - mxy * mxy) / n));

    for (const auto& b : bins) {
        CovarianceBin out;
        out.count = b.n;
        if (b.n > 0) {
            out.d_mean = b.sum_d / static_cast<double>(b.n);
            out.cov = b.sum_p / static_cast<double>(b.n);
            out.theory = params.speed.variance_profile(out.d_mean, params.t);
            if (b.n > 1) {
                double var = b.sum_p2 / static_cast<double>(b.n) - out.cov * out.cov;
                out.stderr_ = std::sqrt(std::max(0.0, var / static_cast<double>(b.n)));
            }
        }
        est.bins.push_back(out);
    }
    return est;
}

CrossingEstimate envelope_crossing_probability(const FieldParams& params, const EnvelopeSpec& env,
                                               std::uint64_t replicas, std::uint64_t seed,
                                               int workers) {
    if (env.gamma >= 0.5)
        std::fprintf(stderr, "warning: envelope gamma %g >= 1/2, outside the guaranteed regime\n",
                     env.gamma);
    SinkConfig sinks;
    sinks.track_max = false;
    sinks.envelope = env;
    auto outs = run_replicas(params, sinks, seed, replicas, workers, select_kernel(KernelKind::Auto));
    CrossingEstimate est;
    std::uint64_t any = 0, integer = 0, used = 0;
    for (const auto& o : outs) {
        if (o.overflowed) {
            ++est.overflowed;
            continue;
        }
        ++used;
        if (o.envelope_margin_any > env.c) ++any;
        if (o.envelope_margin_int > env.c) ++integer;
    }
    est.replicas_used = used;
    double n = static_cast<double>(used);
    est.p_any = any / n;
    est.p_int = integer / n;
    est.p_any_stderr = std::sqrt(est.p_any * (1.0 - est.p_any) / n);
    est.p_int_stderr = std::sqrt(est.p_int * (1.0 - est.p_int) / n);
    return est;
}

}  // namespace crem
