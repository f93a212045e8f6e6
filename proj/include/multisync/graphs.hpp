#pragma once

#include "multisync/matrix.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace multisync {

/// Nonnegative-weighted directed graph on vertices 0..n-1. Entry (i, j) of
/// the weight matrix is the strength with which vertex j influences vertex i.
/// Vertex labels matter: graph sums are not isomorphism-invariant.
class WeightedDigraph {
public:
    explicit WeightedDigraph(RealMatrix weights);
    static WeightedDigraph empty(std::size_t n);

    std::size_t size() const { return weights_.rows(); }
    double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
    const RealMatrix& weights() const { return weights_; }

    void add_edge(std::size_t from, std::size_t to, double w = 1.0);

private:
    RealMatrix weights_;
};

/// Zero-row-sum coupling matrix (D - A of a digraph, or any matrix with
/// G e = 0 loaded directly). Off-diagonals are nonpositive whenever the
/// matrix came from a digraph.
class LaplacianMatrix {
public:
    explicit LaplacianMatrix(RealMatrix entries);

    std::size_t size() const { return entries_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const RealMatrix& matrix() const { return entries_; }

private:
    RealMatrix entries_;
};

/// L = D - A with D the diagonal of row sums; L e = 0 exactly.
LaplacianMatrix laplacian(const WeightedDigraph& g);

/// Entrywise sum of adjacency matrices over a shared vertex set.
WeightedDigraph graph_sum(const std::vector<WeightedDigraph>& gs);

/// Digraph with every edge orientation flipped.
WeightedDigraph reversal(const WeightedDigraph& g);

struct SpanningTreeReport {
    bool has_tree = false;
    std::vector<std::size_t> roots;  // vertices that reach every other vertex
};

/// True iff some vertex reaches all others along directed edges; lists all
/// such roots.
SpanningTreeReport has_spanning_directed_tree(const WeightedDigraph& g);

/// Weighted in-degree equals weighted out-degree at every vertex.
bool is_balanced(const WeightedDigraph& g, double tol = 1e-10);

/// Strong connectivity on the support of the weight matrix.
bool is_strongly_connected(const WeightedDigraph& g);

/// Recovers the digraph whose Laplacian is L (requires nonpositive
/// off-diagonals): a_ij = -L_ij for i != j.
WeightedDigraph digraph_from_laplacian(const LaplacianMatrix& l);

/// The three 5x5 example coupling matrices used throughout the test suite.
std::array<LaplacianMatrix, 3> paper_example();

/// A pair of 6-vertex circulant layers (shift-by-2 and shift-by-3): each
/// layer is disconnected, their Laplacians commute, and the graph sum is
/// strongly connected with a simple zero eigenvalue.
std::array<WeightedDigraph, 2> example_multilayer_pair();

}  // namespace multisync
