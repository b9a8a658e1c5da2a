#pragma once

// Numerical certification of embeddings: edge crossings, simplex orientation,
// hull containment, boundary convexity and the convex-combination identity.

#include "fplm/errors.hpp"
#include "fplm/fplm.hpp"
#include "fplm/hull.hpp"
#include "fplm/laplacian.hpp"
#include "fplm/predicates.hpp"
#include "fplm/simplicial.hpp"

#include <Eigen/Core>
#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fplm {

// ---------------------------------------------------------------------------
// Edge crossings

struct CrossingResult
{
    long count = 0;
    /// Offending pairs of edge positions (i < j), sorted.
    std::vector<std::pair<int, int>> pairs;
};

namespace detail {

inline predicates::Point2 point_of(const Eigen::MatrixXd& coords, int v)
{
    return {coords(v, 0), coords(v, 1)};
}

// Crossing rule for one edge pair; see count_crossings.
inline bool edges_conflict(const std::pair<int, int>& e, const std::pair<int, int>& f, const Eigen::MatrixXd& coords)
{
    const auto [a0, a1] = e;
    const auto [b0, b1] = f;
    const bool same = (a0 == b0 && a1 == b1) || (a0 == b1 && a1 == b0);
    if (same)
        return point_of(coords, a0) != point_of(coords, a1);
    int shared = -1, ea = -1, fb = -1;
    if (a0 == b0) { shared = a0; ea = a1; fb = b1; }
    else if (a0 == b1) { shared = a0; ea = a1; fb = b0; }
    else if (a1 == b0) { shared = a1; ea = a0; fb = b1; }
    else if (a1 == b1) { shared = a1; ea = a0; fb = b0; }
    if (shared >= 0)
        return predicates::shared_endpoint_overlap(point_of(coords, shared), point_of(coords, ea),
                                                   point_of(coords, fb));
    return predicates::segments_intersect(point_of(coords, a0), point_of(coords, a1), point_of(coords, b0),
                                          point_of(coords, b1));
}

} // namespace detail

/// Count unordered edge pairs that violate a straight-line drawing.
///
/// Edges without a common endpoint conflict when their closed segments meet
/// (proper crossings, touching, or collinear overlap). Edges sharing one
/// endpoint conflict only when they overlap beyond that endpoint. A uniform
/// grid prunes candidate pairs; a dense all-pairs sweep is used when the grid
/// would degenerate (very uneven edge lengths).
inline CrossingResult count_crossings(const std::vector<std::pair<int, int>>& edges, const Eigen::MatrixXd& coords)
{
    if (coords.cols() != 2)
        throw ConfigError("count_crossings requires 2D coordinates");
    CrossingResult out;
    const int m = static_cast<int>(edges.size());
    if (m < 2)
        return out;
    for (const auto& [a, b] : edges)
        if (a < 0 || b < 0 || a >= coords.rows() || b >= coords.rows())
            throw ConfigError("edge references a vertex outside the coordinate table");

    Eigen::MatrixXd lo(m, 2), hi(m, 2);
    double total_len = 0.0;
    for (int k = 0; k < m; ++k) {
        const Eigen::RowVector2d p = coords.row(edges[k].first), q = coords.row(edges[k].second);
        lo.row(k) = p.cwiseMin(q);
        hi.row(k) = p.cwiseMax(q);
        total_len += (hi.row(k) - lo.row(k)).maxCoeff();
    }
    const Eigen::RowVector2d origin = lo.colwise().minCoeff();
    const Eigen::RowVector2d extent = hi.colwise().maxCoeff() - origin;

    auto brute_force = [&]() {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                if ((lo.row(i).array() > hi.row(j).array()).any() || (lo.row(j).array() > hi.row(i).array()).any())
                    continue;
                if (detail::edges_conflict(edges[i], edges[j], coords))
                    out.pairs.emplace_back(i, j);
            }
    };

    const double cell = total_len / m;
    const long max_cells = 4L * m + 16;
    if (!(cell > 0.0) || !std::isfinite(cell) || !std::isfinite(extent.sum())) {
        brute_force();
    } else {
        const long nx = std::clamp<long>(static_cast<long>(extent.x() / cell) + 1, 1, max_cells);
        const long ny = std::clamp<long>(static_cast<long>(extent.y() / cell) + 1, 1, max_cells / nx + 1);
        const double sx = extent.x() > 0 ? static_cast<double>(nx) / extent.x() : 0.0;
        const double sy = extent.y() > 0 ? static_cast<double>(ny) / extent.y() : 0.0;
        auto cx = [&](double x) { return std::clamp<long>(static_cast<long>((x - origin.x()) * sx), 0, nx - 1); };
        auto cy = [&](double y) { return std::clamp<long>(static_cast<long>((y - origin.y()) * sy), 0, ny - 1); };

        long insertions = 0;
        for (int k = 0; k < m; ++k)
            insertions += (cx(hi(k, 0)) - cx(lo(k, 0)) + 1) * (cy(hi(k, 1)) - cy(lo(k, 1)) + 1);
        if (insertions > 64L * m) {
            brute_force();
        } else {
            std::vector<std::vector<int>> grid(static_cast<std::size_t>(nx * ny));
            for (int k = 0; k < m; ++k)
                for (long x = cx(lo(k, 0)); x <= cx(hi(k, 0)); ++x)
                    for (long y = cy(lo(k, 1)); y <= cy(hi(k, 1)); ++y)
                        grid[static_cast<std::size_t>(x * ny + y)].push_back(k);
            for (long x = 0; x < nx; ++x) {
                for (long y = 0; y < ny; ++y) {
                    const auto& bucket = grid[static_cast<std::size_t>(x * ny + y)];
                    for (std::size_t u = 0; u < bucket.size(); ++u) {
                        for (std::size_t v = u + 1; v < bucket.size(); ++v) {
                            const int i = bucket[u], j = bucket[v];
                            if ((lo.row(i).array() > hi.row(j).array()).any()
                                || (lo.row(j).array() > hi.row(i).array()).any())
                                continue;
                            // Test each pair once: in the first cell of its box overlap.
                            if (std::max(cx(lo(i, 0)), cx(lo(j, 0))) != x || std::max(cy(lo(i, 1)), cy(lo(j, 1))) != y)
                                continue;
                            if (detail::edges_conflict(edges[i], edges[j], coords))
                                out.pairs.emplace_back(std::min(i, j), std::max(i, j));
                        }
                    }
                }
            }
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    out.count = static_cast<long>(out.pairs.size());
    return out;
}

// ---------------------------------------------------------------------------
// Orientation

struct OrientationCounts
{
    long positive = 0;
    long negative = 0;
    long near_zero = 0;

    long total() const { return positive + negative + near_zero; }
    bool single_sign() const { return near_zero == 0 && (positive == 0 || negative == 0) && total() > 0; }
};

inline constexpr double kDefaultOrientationTolerance = 1e-12;

namespace detail {

inline void check_embedding_shape(const SimplicialMesh& mesh, const Eigen::MatrixXd& coords)
{
    if (coords.cols() != mesh.intrinsic_dim())
        throw ConfigError("embedding dimension " + std::to_string(coords.cols()) + " differs from intrinsic dimension "
                          + std::to_string(mesh.intrinsic_dim()));
    if (coords.rows() != mesh.num_vertices())
        throw ConfigError("embedding has " + std::to_string(coords.rows()) + " rows, mesh has "
                          + std::to_string(mesh.num_vertices()) + " vertices");
}

inline Eigen::VectorXd signed_volumes(const Eigen::MatrixXi& oriented, const Eigen::MatrixXd& coords)
{
    const int d = static_cast<int>(oriented.cols()) - 1;
    double factorial = 1.0;
    for (int k = 2; k <= d; ++k)
        factorial *= k;
    Eigen::VectorXd vols(oriented.rows());
    Eigen::MatrixXd edges(d, d);
    for (Eigen::Index s = 0; s < oriented.rows(); ++s) {
        for (int k = 0; k < d; ++k)
            edges.col(k) = (coords.row(oriented(s, k + 1)) - coords.row(oriented(s, 0))).transpose();
        vols[s] = edges.determinant() / factorial;
    }
    return vols;
}

} // namespace detail

/// Signed d-volume of each simplex after combinatorial orientation canonicalisation.
inline Eigen::VectorXd signed_volumes(const SimplicialMesh& mesh, const Eigen::MatrixXd& coords)
{
    detail::check_embedding_shape(mesh, coords);
    return detail::signed_volumes(orient_simplices(mesh), coords);
}

/// Classify simplices by orientation sign; |volume| < tol * scale^d counts as zero,
/// where scale is the bounding-box diameter of the embedding.
inline OrientationCounts orientation_histogram(const SimplicialMesh& mesh, const Eigen::MatrixXd& coords,
                                               double tol = kDefaultOrientationTolerance)
{
    const int d = mesh.intrinsic_dim();
    detail::check_embedding_shape(mesh, coords);
    const Eigen::MatrixXi oriented = orient_simplices(mesh);
    const Eigen::VectorXd vols = detail::signed_volumes(oriented, coords);
    const double threshold = tol * std::pow(bounding_box_diameter(coords), d);
    OrientationCounts out;
    for (int s = 0; s < mesh.num_simplices(); ++s) {
        if (!(std::abs(vols[s]) >= threshold) || vols[s] == 0.0) {
            ++out.near_zero;
            continue;
        }
        int sign = vols[s] > 0 ? 1 : -1;
        if (d == 2) {
            sign = predicates::orient2d(detail::point_of(coords, oriented(s, 0)), detail::point_of(coords, oriented(s, 1)),
                                        detail::point_of(coords, oriented(s, 2)));
        } else if (d == 3) {
            auto p = [&](int k) {
                const int v = oriented(s, k);
                return predicates::Point3(coords(v, 0), coords(v, 1), coords(v, 2));
            };
            sign = predicates::orient3d(p(0), p(1), p(2), p(3));
        }
        if (sign > 0)
            ++out.positive;
        else if (sign < 0)
            ++out.negative;
        else
            ++out.near_zero;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hull containment and boundary convexity

/// Largest signed distance of a free vertex outside the hull of the fixed targets (<= 0: contained).
inline double check_hull_containment(const FixedPointSet& fixed, const Eigen::MatrixXd& coords,
                                     const std::vector<int>& free_indices)
{
    if (fixed.targets.cols() != coords.cols())
        throw ConfigError("fixed targets and embedding differ in dimension");
    const HullDistance distance(fixed.targets);
    double worst = -std::numeric_limits<double>::infinity();
    for (int v : free_indices)
        worst = std::max(worst, distance(coords.row(v).transpose()));
    return worst;
}

struct BoundaryConvexity
{
    bool convex = true;
    int worst_vertex = -1;     ///< vertex with the largest reflex turn, -1 if none
    double worst_violation = 0.0; ///< sine of that reflex turn
    int orientation = 0;       ///< +1 counterclockwise polygon, -1 clockwise
};

inline constexpr double kDefaultConvexityTolerance = 1e-9;

/// A closed polygon is convex when no vertex turns against the polygon's own
/// orientation by more than `tol` (measured as the sine of the turn angle).
inline BoundaryConvexity check_boundary_convexity(const std::vector<int>& cycle, const Eigen::MatrixXd& coords,
                                                  double tol = kDefaultConvexityTolerance)
{
    if (coords.cols() != 2)
        throw ConfigError("boundary convexity requires 2D coordinates");
    BoundaryConvexity out;
    const std::size_t p = cycle.size();
    if (p < 3) {
        out.convex = false;
        return out;
    }
    double area2 = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        const auto a = detail::point_of(coords, cycle[k]);
        const auto b = detail::point_of(coords, cycle[(k + 1) % p]);
        area2 += a.x() * b.y() - a.y() * b.x();
    }
    out.orientation = area2 > 0 ? 1 : (area2 < 0 ? -1 : 0);
    if (out.orientation == 0) {
        out.convex = false;
        return out;
    }
    for (std::size_t k = 0; k < p; ++k) {
        const auto prev = detail::point_of(coords, cycle[(k + p - 1) % p]);
        const auto cur = detail::point_of(coords, cycle[k]);
        const auto next = detail::point_of(coords, cycle[(k + 1) % p]);
        const int turn = predicates::orient2d(prev, cur, next);
        if (turn == 0 || turn == out.orientation)
            continue;
        const Eigen::Vector2d e1 = cur - prev, e2 = next - cur;
        const double denom = e1.norm() * e2.norm();
        const double sine = denom > 0.0 ? std::abs(e1.x() * e2.y() - e1.y() * e2.x()) / denom : 0.0;
        if (sine > out.worst_violation || out.worst_vertex < 0) {
            out.worst_violation = sine;
            out.worst_vertex = cycle[k];
        }
    }
    out.convex = out.worst_violation <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// Audit

enum class Verdict
{
    InjectiveCertified,
    Violated,
};

inline const char* to_string(Verdict v)
{
    return v == Verdict::InjectiveCertified ? "injective-certified" : "violated";
}

/// Free/fixed split and weights of the final solve; enables the residual and hull checks.
struct AuditPartition
{
    WeightedGraph graph;
    FixedPointSet fixed;
};

struct ValidityReport
{
    int dim = 0;
    long num_vertices = 0;
    long num_simplices = 0;
    long num_edges = 0;
    double diameter = 0.0;
    std::optional<long> crossing_count; ///< d = 2 only
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> crossing_edges;
    OrientationCounts orientation;
    /// Seed simplex of a closed mesh; its image bounds all others and is left out of `orientation`.
    std::optional<long> excluded_simplex;
    std::optional<double> max_convex_residual;
    std::optional<double> hull_violation;
    std::optional<BoundaryConvexity> boundary_convexity;
    Verdict verdict = Verdict::Violated;
    std::vector<std::string> reasons;

    bool certified() const { return verdict == Verdict::InjectiveCertified; }
};

struct AuditOptions
{
    double orientation_tol = kDefaultOrientationTolerance;
    double convexity_tol = kDefaultConvexityTolerance;
};

namespace detail {

inline std::optional<long> find_simplex(const SimplicialMesh& mesh, std::vector<int> vertices)
{
    std::sort(vertices.begin(), vertices.end());
    if (static_cast<Eigen::Index>(vertices.size()) != mesh.simplices.cols())
        return std::nullopt;
    std::vector<int> row(vertices.size());
    for (Eigen::Index s = 0; s < mesh.num_simplices(); ++s) {
        for (std::size_t c = 0; c < row.size(); ++c)
            row[c] = mesh.simplices(s, static_cast<Eigen::Index>(c));
        std::sort(row.begin(), row.end());
        if (row == vertices)
            return static_cast<long>(s);
    }
    return std::nullopt;
}

} // namespace detail

inline ValidityReport audit(const SimplicialMesh& mesh, const Eigen::MatrixXd& coords,
                            const std::optional<AuditPartition>& partition = std::nullopt,
                            const AuditOptions& options = {})
{
    ValidityReport report;
    report.dim = mesh.intrinsic_dim();
    report.num_vertices = mesh.num_vertices();
    report.num_simplices = mesh.num_simplices();
    report.diameter = bounding_box_diameter(coords);
    const auto edges = skeleton_edges(mesh);
    report.num_edges = static_cast<long>(edges.size());

    if (partition && partition->fixed.kind == FixedKind::SelectedSimplex && detect_boundary(mesh).empty())
        report.excluded_simplex = detail::find_simplex(mesh, partition->fixed.indices);
    if (report.excluded_simplex) {
        SimplicialMesh rest;
        rest.vertices = mesh.vertices;
        rest.simplices.resize(mesh.num_simplices() - 1, mesh.simplices.cols());
        for (Eigen::Index s = 0, r = 0; s < mesh.num_simplices(); ++s)
            if (s != *report.excluded_simplex)
                rest.simplices.row(r++) = mesh.simplices.row(s);
        report.orientation = orientation_histogram(rest, coords, options.orientation_tol);
    } else {
        report.orientation = orientation_histogram(mesh, coords, options.orientation_tol);
    }
    if (report.dim == 2) {
        const CrossingResult crossings = count_crossings(edges, coords);
        report.crossing_count = crossings.count;
        for (const auto& [i, j] : crossings.pairs)
            report.crossing_edges.emplace_back(edges[i], edges[j]);
        const BoundaryComplex boundary = detect_boundary(mesh);
        if (boundary.cycles.size() == 1)
            report.boundary_convexity = check_boundary_convexity(boundary.cycles.front(), coords, options.convexity_tol);
    }

    if (partition) {
        std::vector<char> fixed(static_cast<std::size_t>(mesh.num_vertices()), 0);
        for (int v : partition->fixed.indices)
            fixed[v] = 1;
        std::vector<int> free;
        for (int v = 0; v < mesh.num_vertices(); ++v)
            if (!fixed[v])
                free.push_back(v);
        report.max_convex_residual = max_convex_combination_residual(partition->graph, free, coords);
        if (report.dim <= 3 && !free.empty())
            report.hull_violation = check_hull_containment(partition->fixed, coords, free);
    }

    if (report.crossing_count && *report.crossing_count > 0)
        report.reasons.push_back(std::to_string(*report.crossing_count) + " edge crossing(s)");
    if (report.orientation.positive > 0 && report.orientation.negative > 0)
        report.reasons.push_back("mixed orientations (" + std::to_string(report.orientation.positive) + " positive, "
                                 + std::to_string(report.orientation.negative) + " negative)");
    if (report.orientation.near_zero > 0)
        report.reasons.push_back(std::to_string(report.orientation.near_zero) + " near-zero volume simplices");
    report.verdict = report.reasons.empty() ? Verdict::InjectiveCertified : Verdict::Violated;
    return report;
}

inline nlohmann::json to_json(const ValidityReport& r)
{
    nlohmann::json j;
    j["verdict"] = to_string(r.verdict);
    j["intrinsic_dim"] = r.dim;
    j["num_vertices"] = r.num_vertices;
    j["num_simplices"] = r.num_simplices;
    j["num_edges"] = r.num_edges;
    j["diameter"] = r.diameter;
    j["crossing_count"] = r.crossing_count ? nlohmann::json(*r.crossing_count) : nlohmann::json(nullptr);
    auto& pairs = j["crossing_edges"] = nlohmann::json::array();
    for (const auto& [e, f] : r.crossing_edges)
        pairs.push_back({{e.first, e.second}, {f.first, f.second}});
    j["orientation"] = {{"positive", r.orientation.positive},
                        {"negative", r.orientation.negative},
                        {"near_zero", r.orientation.near_zero}};
    j["excluded_simplex"] = r.excluded_simplex ? nlohmann::json(*r.excluded_simplex) : nlohmann::json(nullptr);
    j["max_convex_residual"] = r.max_convex_residual ? nlohmann::json(*r.max_convex_residual) : nlohmann::json(nullptr);
    j["hull_violation"] = r.hull_violation ? nlohmann::json(*r.hull_violation) : nlohmann::json(nullptr);
    if (r.boundary_convexity) {
        j["boundary_convexity"] = {{"convex", r.boundary_convexity->convex},
                                   {"worst_vertex", r.boundary_convexity->worst_vertex},
                                   {"worst_violation", r.boundary_convexity->worst_violation},
                                   {"orientation", r.boundary_convexity->orientation}};
    } else {
        j["boundary_convexity"] = nullptr;
    }
    j["reasons"] = r.reasons;
    return j;
}

inline std::string to_text(const ValidityReport& r)
{
    std::ostringstream os;
    os << "verdict:            " << to_string(r.verdict) << "\n";
    os << "simplices:          " << r.num_simplices << " (d = " << r.dim << "), vertices " << r.num_vertices
       << ", edges " << r.num_edges << "\n";
    if (r.crossing_count)
        os << "edge crossings:     " << *r.crossing_count << "\n";
    else
        os << "edge crossings:     n/a\n";
    os << "orientation:        " << r.orientation.positive << " positive, " << r.orientation.negative
       << " negative, " << r.orientation.near_zero << " near-zero";
    if (r.excluded_simplex)
        os << " (seed simplex " << *r.excluded_simplex << " excluded)";
    os << "\n";
    if (r.max_convex_residual)
        os << "convex residual:    " << *r.max_convex_residual << "\n";
    if (r.hull_violation)
        os << "hull violation:     " << *r.hull_violation << "\n";
    if (r.boundary_convexity) {
        os << "boundary convexity: " << (r.boundary_convexity->convex ? "convex" : "non-convex");
        if (r.boundary_convexity->worst_vertex >= 0)
            os << " (worst reflex vertex " << r.boundary_convexity->worst_vertex << ", sine "
               << r.boundary_convexity->worst_violation << ")";
        os << "\n";
    }
    for (const auto& reason : r.reasons)
        os << "reason:             " << reason << "\n";
    return os.str();
}

} // namespace fplm
