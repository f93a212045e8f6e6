#include "multisync/graphs.hpp"

#include <cmath>
#include <queue>
#include <sstream>

namespace multisync {

namespace {

// Vertices reachable from `start` along directed edges of the support graph.
std::vector<bool> reachable_from(const RealMatrix& w, std::size_t start) {
    const std::size_t n = w.rows();
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    seen[start] = true;
    frontier.push(start);
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v = 0; v < n; ++v) {
            // Edge u -> v: u influences v, i.e. weight(v, u) > 0.
            if (!seen[v] && w(v, u) > 0.0) {
                seen[v] = true;
                frontier.push(v);
            }
        }
    }
    return seen;
}

}  // namespace

WeightedDigraph::WeightedDigraph(RealMatrix weights) : weights_(std::move(weights)) {
    if (!weights_.square()) throw ValidationError("WeightedDigraph: weight matrix must be square");
    ensure_finite(weights_, "WeightedDigraph");
    for (std::size_t i = 0; i < weights_.rows(); ++i) {
        if (weights_(i, i) != 0.0) {
            std::ostringstream msg;
            msg << "WeightedDigraph: nonzero diagonal at vertex " << i;
            throw ValidationError(msg.str());
        }
        for (std::size_t j = 0; j < weights_.cols(); ++j) {
            if (weights_(i, j) < 0.0) {
                std::ostringstream msg;
                msg << "WeightedDigraph: negative weight at (" << i << "," << j << ")";
                throw ValidationError(msg.str());
            }
        }
    }
}

WeightedDigraph WeightedDigraph::empty(std::size_t n) {
    return WeightedDigraph(RealMatrix(n, n, 0.0));
}

void WeightedDigraph::add_edge(std::size_t from, std::size_t to, double w) {
    if (from >= size() || to >= size()) throw ValidationError("add_edge: vertex out of range");
    if (from == to) throw ValidationError("add_edge: self-loops not allowed");
    if (w < 0.0) throw ValidationError("add_edge: negative weight");
    // Influence convention: the edge from -> to lands in row `to`.
    weights_(to, from) += w;
}

LaplacianMatrix::LaplacianMatrix(RealMatrix entries) : entries_(std::move(entries)) {
    if (!entries_.square()) throw ValidationError("LaplacianMatrix: must be square");
    ensure_finite(entries_, "LaplacianMatrix");
    const double scale = std::max(1.0, entries_.frobenius_norm());
    for (std::size_t i = 0; i < entries_.rows(); ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < entries_.cols(); ++j) rowsum += entries_(i, j);
        if (std::abs(rowsum) > 1e-10 * scale) {
            std::ostringstream msg;
            msg << "LaplacianMatrix: row " << i << " sums to " << rowsum << ", expected 0";
            throw ValidationError(msg.str());
        }
    }
}

LaplacianMatrix laplacian(const WeightedDigraph& g) {
    const std::size_t n = g.size();
    RealMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            l(i, j) = -g.weight(i, j);
            degree += g.weight(i, j);
        }
        l(i, i) = degree;
        // nudge the diagonal until the row cancels exactly in double arithmetic
        for (int pass = 0; pass < 4; ++pass) {
            double rowsum = 0.0;
            for (std::size_t j = 0; j < n; ++j) rowsum += l(i, j);
            if (rowsum == 0.0) break;
            l(i, i) -= rowsum;
        }
    }
    return LaplacianMatrix(std::move(l));
}

WeightedDigraph graph_sum(const std::vector<WeightedDigraph>& gs) {
    if (gs.empty()) throw ValidationError("graph_sum: empty layer list");
    const std::size_t n = gs.front().size();
    RealMatrix total(n, n);
    for (const WeightedDigraph& g : gs) {
        if (g.size() != n) {
            std::ostringstream msg;
            msg << "graph_sum: layer order mismatch (" << g.size() << " vs " << n << ")";
            throw ValidationError(msg.str());
        }
        total += g.weights();
    }
    return WeightedDigraph(std::move(total));
}

WeightedDigraph reversal(const WeightedDigraph& g) {
    return WeightedDigraph(g.weights().transpose());
}

SpanningTreeReport has_spanning_directed_tree(const WeightedDigraph& g) {
    SpanningTreeReport report;
    const std::size_t n = g.size();
    for (std::size_t r = 0; r < n; ++r) {
        const std::vector<bool> seen = reachable_from(g.weights(), r);
        bool all = true;
        for (bool b : seen) all = all && b;
        if (all) report.roots.push_back(r);
    }
    report.has_tree = !report.roots.empty();
    return report;
}

bool is_balanced(const WeightedDigraph& g, double tol) {
    const std::size_t n = g.size();
    const double scale = std::max(1.0, g.weights().frobenius_norm());
    for (std::size_t v = 0; v < n; ++v) {
        double in = 0.0;
        double out = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            in += g.weight(v, j);   // influences arriving at v
            out += g.weight(j, v);  // influences leaving v
        }
        if (std::abs(in - out) > tol * scale) return false;
    }
    return true;
}

bool is_strongly_connected(const WeightedDigraph& g) {
    if (g.size() == 0) return false;
    const std::vector<bool> fwd = reachable_from(g.weights(), 0);
    const std::vector<bool> bwd = reachable_from(g.weights().transpose(), 0);
    for (std::size_t v = 0; v < g.size(); ++v)
        if (!fwd[v] || !bwd[v]) return false;
    return true;
}

WeightedDigraph digraph_from_laplacian(const LaplacianMatrix& l) {
    const std::size_t n = l.size();
    RealMatrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (l(i, j) > 0.0) {
                std::ostringstream msg;
                msg << "digraph_from_laplacian: positive off-diagonal at (" << i << "," << j << ")";
                throw ValidationError(msg.str());
            }
            w(i, j) = -l(i, j);
        }
    return WeightedDigraph(std::move(w));
}

std::array<LaplacianMatrix, 3> paper_example() {
    RealMatrix g1 = RealMatrix::from_rows({{1, 0, -1, 0, 0},
                                           {0, 2, 0, -1, -1},
                                           {-1, 0, 3, -1, -1},
                                           {-1, -1, 0, 3, -1},
                                           {0, 0, 0, -1, 1}});
    RealMatrix g2 = RealMatrix::from_rows({{2, -1, 0, 0, -1},
                                           {0, 1, 0, -1, 0},
                                           {0, 0, 2, -1, -1},
                                           {-1, 0, 0, 1, 0},
                                           {-1, 0, -1, -1, 3}});
    RealMatrix g3 = RealMatrix::from_rows({{1, -1, 0, 0, 0},
                                           {-1, 2, -1, 0, 0},
                                           {0, -1, 1, 0, 0},
                                           {0, 0, -1, 1, 0},
                                           {-1, -1, -1, 0, 3}});
    return {LaplacianMatrix(std::move(g1)), LaplacianMatrix(std::move(g2)),
            LaplacianMatrix(std::move(g3))};
}

std::array<WeightedDigraph, 2> example_multilayer_pair() {
    const std::size_t n = 6;
    WeightedDigraph shift2 = WeightedDigraph::empty(n);
    WeightedDigraph shift3 = WeightedDigraph::empty(n);
    for (std::size_t v = 0; v < n; ++v) {
        shift2.add_edge(v, (v + 2) % n);  // two directed triangles
        shift3.add_edge(v, (v + 3) % n);  // three 2-cycles
    }
    return {shift2, shift3};
}

}  // namespace multisync
