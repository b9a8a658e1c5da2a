#pragma once

// Fixed-point Laplacian mapping.
//
// Minimises tr(Y^T L Y) with a subset of rows of Y pinned to fixed targets.
// For strongly connected decompositions the first solve pins a seed simplex to
// a regular simplex; when the decomposition has a boundary, the boundary
// vertices are then pinned at their first-solve images and everything else is
// solved again. Decompositions with dividing edges (d = 2) are instead solved
// once with the boundary loop pinned to a regular polygon.

#include "fplm/errors.hpp"
#include "fplm/laplacian.hpp"
#include "fplm/simplicial.hpp"
#include "fplm/solver.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fplm {

enum class FixedKind
{
    SelectedSimplex,
    InnerBoundary,
    RegularPolygon,
};

inline const char* to_string(FixedKind k)
{
    switch (k) {
    case FixedKind::SelectedSimplex: return "selected-simplex";
    case FixedKind::InnerBoundary: return "inner-boundary";
    case FixedKind::RegularPolygon: return "regular-polygon";
    }
    return "unknown";
}

inline FixedKind parse_fixed_kind(const std::string& name)
{
    for (auto k : {FixedKind::SelectedSimplex, FixedKind::InnerBoundary, FixedKind::RegularPolygon})
        if (name == to_string(k))
            return k;
    throw ConfigError("unknown fixed-set kind '" + name + "'");
}

/// Constrained vertices and their images; row k of `targets` belongs to `indices[k]`.
struct FixedPointSet
{
    std::vector<int> indices;
    Eigen::MatrixXd targets;
    FixedKind kind = FixedKind::SelectedSimplex;
};

enum class Branch
{
    OneRound,
    TwoRound,
    RegularPolygon,
};

inline const char* to_string(Branch b)
{
    switch (b) {
    case Branch::OneRound: return "one-round";
    case Branch::TwoRound: return "two-round";
    case Branch::RegularPolygon: return "p-gon";
    }
    return "unknown";
}

struct SeedStrategy
{
    enum class Kind
    {
        Random,
        Index,
        MostInterior,
    };

    Kind kind = Kind::MostInterior;
    std::uint64_t value = 0; ///< RNG seed for Random, simplex index for Index

    static SeedStrategy random(std::uint64_t seed) { return {Kind::Random, seed}; }
    static SeedStrategy index(std::uint64_t k) { return {Kind::Index, k}; }
    static SeedStrategy most_interior() { return {Kind::MostInterior, 0}; }
};

inline std::string to_string(const SeedStrategy& s)
{
    switch (s.kind) {
    case SeedStrategy::Kind::Random: return "random";
    case SeedStrategy::Kind::Index: return "index:" + std::to_string(s.value);
    case SeedStrategy::Kind::MostInterior: return "most-interior";
    }
    return "unknown";
}

/// Accepts "most-interior", "random" (uses `rng_seed`) or "index:K".
inline SeedStrategy parse_seed_strategy(const std::string& text, std::uint64_t rng_seed)
{
    if (text == "most-interior")
        return SeedStrategy::most_interior();
    if (text == "random")
        return SeedStrategy::random(rng_seed);
    if (text.rfind("index:", 0) == 0) {
        try {
            std::size_t used = 0;
            const auto k = std::stoull(text.substr(6), &used);
            if (used == text.size() - 6)
                return SeedStrategy::index(k);
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("unknown seed strategy '" + text + "' (expected most-interior|random|index:K)");
}

struct FplmOptions
{
    double gamma = kDefaultGamma;
    SeedStrategy seed = SeedStrategy::most_interior();
    SolveConfig solver;
    /// Orientation of the regular polygon used by the dividing-edge branch.
    bool counterclockwise = true;
    double vol_tol = kDefaultVolumeTolerance;
};

struct Embedding
{
    Eigen::MatrixXd coords; ///< N x d
    int rounds_run = 0;
    Branch branch = Branch::OneRound;
    int seed_simplex = -1; ///< -1 for the regular-polygon branch
    FixedPointSet fixed_round1;
    std::optional<FixedPointSet> fixed_round2;
    Eigen::MatrixXd round1_coords;
    std::vector<SolveReport> solves;

    const FixedPointSet& final_fixed() const { return fixed_round2 ? *fixed_round2 : fixed_round1; }

    /// Vertices solved for in the final round, in increasing order.
    std::vector<int> final_free() const
    {
        std::vector<char> fixed(static_cast<std::size_t>(coords.rows()), 0);
        for (int v : final_fixed().indices)
            fixed[v] = 1;
        std::vector<int> out;
        for (int v = 0; v < coords.rows(); ++v)
            if (!fixed[v])
                out.push_back(v);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Seed simplex and fixed-point construction

/// Graph distance (in edges) from each vertex to the nearest boundary vertex;
/// max int where the boundary is empty or unreachable.
inline std::vector<int> distance_to_boundary(const SimplicialMesh& mesh, const BoundaryComplex& boundary)
{
    const int n = mesh.num_vertices();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& [i, j] : skeleton_edges(mesh)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<int> dist(static_cast<std::size_t>(n), std::numeric_limits<int>::max());
    std::vector<int> queue;
    for (int v : boundary.vertices) {
        dist[v] = 0;
        queue.push_back(v);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        for (int w : adj[v]) {
            if (dist[w] == std::numeric_limits<int>::max()) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

inline int select_seed_simplex(const SimplicialMesh& mesh, const SeedStrategy& strategy)
{
    const int m = mesh.num_simplices();
    if (m == 0)
        throw MeshError("mesh has no simplices");
    switch (strategy.kind) {
    case SeedStrategy::Kind::Index:
        if (strategy.value >= static_cast<std::uint64_t>(m))
            throw ConfigError("seed simplex index " + std::to_string(strategy.value) + " out of range");
        return static_cast<int>(strategy.value);
    case SeedStrategy::Kind::Random: {
        std::mt19937_64 rng(strategy.value);
        return static_cast<int>(rng() % static_cast<std::uint64_t>(m));
    }
    case SeedStrategy::Kind::MostInterior: {
        const auto dist = distance_to_boundary(mesh, detect_boundary(mesh));
        int best = 0;
        int best_score = -1;
        for (int s = 0; s < m; ++s) {
            int score = std::numeric_limits<int>::max();
            for (int k = 0; k < mesh.simplices.cols(); ++k)
                score = std::min(score, dist[mesh.simplices(s, k)]);
            if (score > best_score) {
                best_score = score;
                best = s;
            }
        }
        return best;
    }
    }
    return 0;
}

/// Vertices of a regular d-simplex with unit circumradius centred at the origin, one per row.
inline Eigen::MatrixXd regular_simplex(int d)
{
    if (d < 1)
        throw ConfigError("regular simplex needs d >= 1");
    Eigen::MatrixXd out(d + 1, d);
    if (d == 1) {
        out << -1.0, 1.0;
    } else if (d == 2) {
        for (int k = 0; k < 3; ++k) {
            const double angle = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
            out(k, 0) = std::cos(angle);
            out(k, 1) = std::sin(angle);
        }
    } else if (d == 3) {
        const double a = std::sqrt(8.0 / 9.0), b = std::sqrt(2.0 / 9.0), c = std::sqrt(2.0 / 3.0);
        out << 0.0, 0.0, 1.0,
               a, 0.0, -1.0 / 3.0,
               -b, c, -1.0 / 3.0,
               -b, -c, -1.0 / 3.0;
    } else {
        // Centred standard basis of R^{d+1}, expressed in an orthonormal basis of its hyperplane.
        Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(d + 1, d + 1);
        basis.rowwise() -= basis.colwise().mean();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.transpose());
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d + 1, d);
        out = basis * q;
        out /= out.row(0).norm();
    }
    return out;
}

/// Pin the seed simplex's vertices, in stored order, to a regular simplex.
inline FixedPointSet make_c1(const SimplicialMesh& mesh, int simplex)
{
    if (simplex < 0 || simplex >= mesh.num_simplices())
        throw ConfigError("simplex index out of range");
    FixedPointSet out;
    out.kind = FixedKind::SelectedSimplex;
    out.targets = regular_simplex(mesh.intrinsic_dim());
    for (int k = 0; k < mesh.simplices.cols(); ++k)
        out.indices.push_back(mesh.simplices(simplex, k));
    return out;
}

/// Pin the boundary loop, in cycle order, to the vertices of a regular p-gon on the unit circle.
inline FixedPointSet make_regular_polygon(const SimplicialMesh& mesh, const BoundaryComplex& boundary,
                                          bool counterclockwise = true)
{
    if (mesh.intrinsic_dim() != 2)
        throw ConfigError("regular polygon boundary is only defined for d = 2");
    if (boundary.cycles.size() != 1)
        throw MeshError("regular polygon boundary needs exactly one boundary loop, found "
                        + std::to_string(boundary.cycles.size()));
    const auto& cycle = boundary.cycles.front();
    const int p = static_cast<int>(cycle.size());
    if (p < 3)
        throw MeshError("boundary loop has fewer than 3 vertices");
    FixedPointSet out;
    out.kind = FixedKind::RegularPolygon;
    out.indices = cycle;
    out.targets.resize(p, 2);
    const double sign = counterclockwise ? 1.0 : -1.0;
    for (int k = 0; k < p; ++k) {
        const double angle = sign * 2.0 * std::numbers::pi * k / p;
        out.targets(k, 0) = std::cos(angle);
        out.targets(k, 1) = std::sin(angle);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Solve

/// One fixed-point solve: fixed rows are copied from the targets, free rows solved.
inline Eigen::MatrixXd solve_fixed_point(const WeightedGraph& graph, const FixedPointSet& fixed,
                                         const SolveConfig& config, SolveReport* report = nullptr)
{
    if (fixed.targets.rows() != static_cast<Eigen::Index>(fixed.indices.size()))
        throw ConfigError("fixed targets do not match fixed indices");
    const LaplacianSystem system = assemble_system(graph, fixed.indices);
    const Eigen::MatrixXd rhs = system.fixed_rhs(fixed.targets);
    const Eigen::MatrixXd free = solve_spd(system, rhs, config, report);
    Eigen::MatrixXd coords(graph.n, fixed.targets.cols());
    for (int k = 0; k < system.num_free(); ++k)
        coords.row(system.free_indices[k]) = free.row(k);
    for (std::size_t k = 0; k < fixed.indices.size(); ++k)
        coords.row(fixed.indices[k]) = fixed.targets.row(static_cast<Eigen::Index>(k));
    return coords;
}

/// Two rounds of fixed-point Laplacian mapping, or the regular-polygon branch
/// when the decomposition has dividing faces.
inline Embedding run_fplm(const SimplicialMesh& mesh, const FplmOptions& options = {})
{
    require_valid(mesh, options.vol_tol);
    const int d = mesh.intrinsic_dim();
    const BoundaryComplex boundary = detect_boundary(mesh);
    if (d == 2 && boundary.cycles.size() > 1)
        throw MeshError("mesh has " + std::to_string(boundary.cycles.size())
                        + " boundary loops; only disk or sphere topology is supported");
    const auto dividing = detect_dividing_simplices(mesh, boundary);
    const WeightedGraph graph = build_weights(mesh, options.gamma);

    Embedding out;
    if (dividing.empty()) {
        out.seed_simplex = select_seed_simplex(mesh, options.seed);
        out.fixed_round1 = make_c1(mesh, out.seed_simplex);
        SolveReport report;
        out.round1_coords = solve_fixed_point(graph, out.fixed_round1, options.solver, &report);
        out.solves.push_back(report);

        std::vector<int> seed_vertices = out.fixed_round1.indices;
        std::sort(seed_vertices.begin(), seed_vertices.end());
        if (boundary.empty() || boundary.vertices == seed_vertices) {
            out.coords = out.round1_coords;
            out.rounds_run = 1;
            out.branch = Branch::OneRound;
            return out;
        }

        FixedPointSet inner;
        inner.kind = FixedKind::InnerBoundary;
        inner.indices = boundary.vertices;
        inner.targets.resize(static_cast<Eigen::Index>(inner.indices.size()), d);
        for (std::size_t k = 0; k < inner.indices.size(); ++k)
            inner.targets.row(static_cast<Eigen::Index>(k)) = out.round1_coords.row(inner.indices[k]);
        out.coords = solve_fixed_point(graph, inner, options.solver, &report);
        out.solves.push_back(report);
        out.fixed_round2 = std::move(inner);
        out.rounds_run = 2;
        out.branch = Branch::TwoRound;
        return out;
    }

    if (d != 2)
        throw MeshError("mesh has " + std::to_string(dividing.size())
                        + " dividing faces; the convex-polytope boundary is only constructed for d = 2");
    if (boundary.empty())
        throw MeshError("dividing faces reported on a mesh without boundary");
    out.fixed_round1 = make_regular_polygon(mesh, boundary, options.counterclockwise);
    SolveReport report;
    out.round1_coords = solve_fixed_point(graph, out.fixed_round1, options.solver, &report);
    out.solves.push_back(report);
    out.coords = out.round1_coords;
    out.rounds_run = 1;
    out.branch = Branch::RegularPolygon;
    return out;
}

} // namespace fplm
