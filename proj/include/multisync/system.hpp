#pragma once

#include "multisync/graphs.hpp"
#include "multisync/matrix.hpp"

#include <optional>

namespace multisync {

/// The coupled-network description shared by the criteria checks and the
/// simulators: r layer coupling matrices G_k (n x n, zero row sums), r inner
/// coupling matrices D_k (m x m), a contraction constant c for the node
/// dynamics, a symmetric positive definite weighting V and an optional
/// feedback matrix P.
struct MultiNetworkSystem {
    std::vector<LaplacianMatrix> g_list;
    std::vector<RealMatrix> d_list;
    double lipschitz_c = 1.0;
    RealMatrix v;
    std::optional<RealMatrix> p;

    std::size_t node_count() const { return g_list.empty() ? 0 : g_list.front().size(); }
    std::size_t state_dim() const { return d_list.empty() ? 0 : d_list.front().rows(); }
    std::size_t layer_count() const { return g_list.size(); }

    static MultiNetworkSystem make(std::vector<LaplacianMatrix> gs, std::vector<RealMatrix> ds,
                                   double c = 1.0, std::optional<RealMatrix> v = std::nullopt,
                                   std::optional<RealMatrix> p = std::nullopt);
};

}  // namespace multisync
