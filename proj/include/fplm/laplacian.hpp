#pragma once

// RBF-weighted graph Laplacian of a mesh 1-skeleton and its free/fixed partition.

#include "fplm/errors.hpp"
#include "fplm/simplicial.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <string>
#include <vector>

namespace fplm {

inline constexpr double kDefaultGamma = 0.1;

struct WeightedEdge
{
    int i;
    int j;
    double weight;
};

/// Mesh 1-skeleton with weights A_ij = exp(-gamma * |x_i - x_j|).
struct WeightedGraph
{
    int n = 0;
    std::vector<WeightedEdge> edges; ///< i < j, sorted, unique
    double gamma = kDefaultGamma;
    /// Edges whose endpoints coincide in ambient space (weight 1; violates general position).
    std::vector<std::pair<int, int>> coincident_edges;
};

inline WeightedGraph build_weights(const SimplicialMesh& mesh, double gamma = kDefaultGamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw ConfigError("gamma must be positive and finite, got " + std::to_string(gamma));
    WeightedGraph graph;
    graph.n = mesh.num_vertices();
    graph.gamma = gamma;
    for (const auto& [i, j] : skeleton_edges(mesh)) {
        const double dist = (mesh.vertices.row(i) - mesh.vertices.row(j)).norm();
        const double w = std::exp(-gamma * dist);
        if (!(w > 0.0) || !std::isfinite(w))
            throw MeshError("edge (" + std::to_string(i) + "," + std::to_string(j) + ") has non-positive weight");
        if (dist == 0.0)
            graph.coincident_edges.emplace_back(i, j);
        graph.edges.push_back({i, j, w});
    }
    return graph;
}

/// Weighted degree D_ii = sum_j A_ij.
inline Eigen::VectorXd degrees(const WeightedGraph& graph)
{
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(graph.n);
    for (const auto& e : graph.edges) {
        deg[e.i] += e.weight;
        deg[e.j] += e.weight;
    }
    return deg;
}

inline Eigen::SparseMatrix<double> laplacian_matrix(const WeightedGraph& graph)
{
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(graph.edges.size() * 2 + static_cast<std::size_t>(graph.n));
    const Eigen::VectorXd deg = degrees(graph);
    for (int v = 0; v < graph.n; ++v)
        triplets.emplace_back(v, v, deg[v]);
    for (const auto& e : graph.edges) {
        triplets.emplace_back(e.i, e.j, -e.weight);
        triplets.emplace_back(e.j, e.i, -e.weight);
    }
    Eigen::SparseMatrix<double> lap(graph.n, graph.n);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    lap.makeCompressed();
    return lap;
}

/// Laplacian L = D - A with the free/fixed partition used by the fixed-point solve.
///
/// Free vertices are numbered in increasing vertex order, as are fixed vertices
/// in the order given by the caller. `free_block()` is L_y and
/// `coupling_block()` is L_yc, both in that numbering.
struct LaplacianSystem
{
    Eigen::SparseMatrix<double> laplacian;
    Eigen::VectorXd degrees;
    std::vector<int> free_indices;
    std::vector<int> fixed_indices;
    /// For each vertex: position within free_indices (>= 0) or -(1 + position within fixed_indices).
    std::vector<int> slot;

    int num_free() const { return static_cast<int>(free_indices.size()); }
    int num_fixed() const { return static_cast<int>(fixed_indices.size()); }

    Eigen::SparseMatrix<double> free_block() const
    {
        std::vector<Eigen::Triplet<double>> t;
        for (int col = 0; col < laplacian.outerSize(); ++col) {
            if (slot[col] < 0)
                continue;
            for (Eigen::SparseMatrix<double>::InnerIterator it(laplacian, col); it; ++it)
                if (slot[it.row()] >= 0)
                    t.emplace_back(slot[it.row()], slot[col], it.value());
        }
        Eigen::SparseMatrix<double> out(num_free(), num_free());
        out.setFromTriplets(t.begin(), t.end());
        out.makeCompressed();
        return out;
    }

    Eigen::SparseMatrix<double> coupling_block() const
    {
        std::vector<Eigen::Triplet<double>> t;
        for (int col = 0; col < laplacian.outerSize(); ++col) {
            if (slot[col] >= 0)
                continue;
            const int fixed_pos = -slot[col] - 1;
            for (Eigen::SparseMatrix<double>::InnerIterator it(laplacian, col); it; ++it)
                if (slot[it.row()] >= 0)
                    t.emplace_back(slot[it.row()], fixed_pos, it.value());
        }
        Eigen::SparseMatrix<double> out(num_free(), num_fixed());
        out.setFromTriplets(t.begin(), t.end());
        out.makeCompressed();
        return out;
    }

    /// Right-hand side -L_yc C for fixed targets C (rows follow fixed_indices).
    Eigen::MatrixXd fixed_rhs(const Eigen::MatrixXd& targets) const
    {
        if (targets.rows() != num_fixed())
            throw ConfigError("fixed target rows do not match the fixed vertex count");
        return -(coupling_block() * targets);
    }
};

inline LaplacianSystem assemble_system(const WeightedGraph& graph, const std::vector<int>& fixed)
{
    if (fixed.empty())
        throw ConfigError("at least one fixed vertex is required");
    LaplacianSystem sys;
    sys.laplacian = laplacian_matrix(graph);
    sys.degrees = degrees(graph);
    sys.slot.assign(static_cast<std::size_t>(graph.n), 0);
    std::vector<char> is_fixed(static_cast<std::size_t>(graph.n), 0);
    for (std::size_t k = 0; k < fixed.size(); ++k) {
        const int v = fixed[k];
        if (v < 0 || v >= graph.n)
            throw ConfigError("fixed vertex " + std::to_string(v) + " out of range");
        if (is_fixed[v])
            throw ConfigError("fixed vertex " + std::to_string(v) + " listed twice");
        is_fixed[v] = 1;
        sys.slot[v] = -static_cast<int>(k) - 1;
    }
    sys.fixed_indices = fixed;
    for (int v = 0; v < graph.n; ++v) {
        if (!is_fixed[v]) {
            sys.slot[v] = static_cast<int>(sys.free_indices.size());
            sys.free_indices.push_back(v);
        }
    }

    // Every component needs a fixed vertex, otherwise L_y is singular.
    detail::DisjointSets comps(graph.n);
    for (const auto& e : graph.edges)
        comps.unite(e.i, e.j);
    std::vector<char> anchored(static_cast<std::size_t>(graph.n), 0);
    for (int v : fixed)
        anchored[comps.find(v)] = 1;
    for (int v = 0; v < graph.n; ++v) {
        if (!anchored[comps.find(v)])
            throw MeshError("vertex " + std::to_string(v)
                            + " lies in a connected component without fixed vertices (singular system)");
    }
    return sys;
}

/// Max over free vertices of |y_i - sum_j lambda_ij y_j| with lambda_ij = A_ij / D_ii.
inline double max_convex_combination_residual(const WeightedGraph& graph,
                                              const std::vector<int>& free_indices,
                                              const Eigen::MatrixXd& coords)
{
    Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(graph.n, coords.cols());
    const Eigen::VectorXd deg = degrees(graph);
    for (const auto& e : graph.edges) {
        weighted.row(e.i) += e.weight * coords.row(e.j);
        weighted.row(e.j) += e.weight * coords.row(e.i);
    }
    double worst = 0.0;
    for (int v : free_indices) {
        if (deg[v] <= 0.0)
            continue;
        worst = std::max(worst, (coords.row(v) - weighted.row(v) / deg[v]).norm());
    }
    return worst;
}

/// Max over free vertices of |D_ii y_i - sum_j A_ij y_j| (first-order-condition residual).
inline double max_first_order_residual(const WeightedGraph& graph,
                                       const std::vector<int>& free_indices,
                                       const Eigen::MatrixXd& coords)
{
    const Eigen::MatrixXd lap_y = laplacian_matrix(graph) * coords;
    double worst = 0.0;
    for (int v : free_indices)
        worst = std::max(worst, lap_y.row(v).norm());
    return worst;
}

} // namespace fplm
