#pragma once
// Offspring distributions (p_1, ..., p_max) for the supercritical GW tree.
// Support starts at one child (no death), the mean is pinned to 2 so that
// E[n(t)] = e^t, and K = sum k(k-1) p_k is computed at construction.

#include <string_view>
#include <vector>

#include "crem/errors.hpp"

namespace crem {

class OffspringDistribution {
public:
    // p_2 = 1: mean 2, K = 2.
    static OffspringDistribution binary();
    // probs[k-1] = p_k; requires sum 1 and mean 2, both within 1e-12.
    static OffspringDistribution from_probabilities(std::vector<double> probs);
    // "binary" or a comma list "p1,p2,...".
    static OffspringDistribution parse(std::string_view spec);

    const std::vector<double>& probabilities() const { return probs_; }
    double mean() const { return mean_; }
    double factorial_moment_k() const { return k_; }

    // CDF inversion; u in [0,1). Returns a child count >= 1.
    int sample(double u) const {
        for (std::size_t i = 0; i + 1 < cdf_.size(); ++i) {
            if (u < cdf_[i]) return static_cast<int>(i) + 1;
        }
        return static_cast<int>(cdf_.size());
    }

    std::string spec_string() const;

private:
    std::vector<double> probs_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    double k_ = 0.0;
};

}  // namespace crem
