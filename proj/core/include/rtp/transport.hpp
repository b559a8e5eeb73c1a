#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rtp {

struct TransportFlow {
    int source;
    int sink;
    double mass;
};

struct TransportSolution {
    double cost;
    std::vector<TransportFlow> flows;
    std::size_t pivots;
};

/// Balanced transportation problem on the complete bipartite graph, solved by a primal
/// network simplex (artificial root start, block pricing, strongly feasible trees).
/// Arc costs are evaluated on demand. Supplies and demands must be positive with equal totals.
TransportSolution solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                  const std::function<double(int, int)>& cost);

} // namespace rtp
