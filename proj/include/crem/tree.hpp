#pragma once
// Streaming depth-first generation of the continuous-time GW tree. The tree is
// never materialized: the visitor sees edges, branch and leaf events in DFS
// order plus push/restore/pop around subtrees, and memory stays proportional
// to the current depth. Waiting times are exponential(1); every branch has at
// least one child, leaves sit at time t exactly.

#include <cstdint>
#include <vector>

#include "crem/errors.hpp"
#include "crem/offspring.hpp"
#include "crem/rng.hpp"

namespace crem {

inline constexpr std::uint64_t kDefaultLeafCap = 1ull << 27;

struct BranchEvent {
    std::uint64_t id;  // sequential in DFS order
    double time;
    int children;
    int depth;  // number of branch ancestors
};

// Visitor contract, all callbacks optional in spirit but required members:
//   on_edge(s0, s1)        downward edge segment, called before the event at s1
//   on_branch(BranchEvent) branch at s1 < t
//   on_leaf(depth)         leaf at time t
//   on_push()              DFS descends into the first child of the last branch
//   on_restore(time)       DFS starts the next child of the branch at `time`
//   on_pop()               subtree of the deepest open branch is complete
template <class Visitor>
std::uint64_t traverse(const OffspringDistribution& dist, double t, RngStream& rng,
                       Visitor&& vis, std::uint64_t leaf_cap = kDefaultLeafCap) {
    if (!(t > 0.0)) throw DomainError("horizon t must be positive");

    struct Frame {
        double time;
        int children_left;  // children not yet started, excluding the active one
    };
    std::vector<Frame> stack;
    std::uint64_t leaves = 0;
    std::uint64_t next_id = 0;
    double birth = 0.0;

    for (;;) {
        // Descend, always taking the first child, until a leaf at time t.
        for (;;) {
            double event_time = birth + rng.next_exponential();
            if (event_time >= t) {
                vis.on_edge(birth, t);
                vis.on_leaf(static_cast<int>(stack.size()));
                ++leaves;
                break;
            }
            int children = dist.sample(rng.next_unit_half());
            vis.on_edge(birth, event_time);
            vis.on_branch(BranchEvent{next_id++, event_time, children,
                                      static_cast<int>(stack.size())});
            stack.push_back({event_time, children - 1});
            vis.on_push();
            birth = event_time;
        }
        if (leaves > leaf_cap)
            throw PopulationOverflow("leaf count exceeded cap; retry with smaller t");

        // Unwind completed subtrees, then resume at the next pending child.
        while (!stack.empty() && stack.back().children_left == 0) {
            stack.pop_back();
            vis.on_pop();
        }
        if (stack.empty()) return leaves;
        stack.back().children_left -= 1;
        birth = stack.back().time;
        vis.on_restore(birth);
    }
}

}  // namespace crem
