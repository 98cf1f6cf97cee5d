#include <algorithm>
#include <cmath>

#include "accum_lane.hpp"
#include "crem/kernels/partition_kernel.hpp"

namespace crem::kernels {

void accumulate_leaf_scalar(PartitionSoA& acc, double x, double y) {
    const std::size_t n = acc.size();
    if (acc.empty) {
        for (std::size_t j = 0; j < n; ++j) lane_init(acc, j, x, y);
        acc.empty = false;
        return;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double ph = acc.tau[j] * y;
        lane_add(acc, j, x, std::cos(ph), std::sin(ph));
    }
}

}  // namespace crem::kernels
