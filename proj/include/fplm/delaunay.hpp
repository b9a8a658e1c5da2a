#pragma once

// Bowyer-Watson incremental Delaunay triangulation with exact predicates.

#include "fplm/errors.hpp"
#include "fplm/predicates.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <vector>

namespace fplm {

/// Delaunay triangulation of the rows of an n x 2 matrix; triangles are
/// counterclockwise. Points are inserted in input order and a point on a
/// circumcircle does not invalidate that triangle, so cocircular inputs
/// resolve deterministically in favour of earlier triangles.
inline Eigen::MatrixXi delaunay2d(const Eigen::MatrixXd& points)
{
    using predicates::Point2;
    const int n = static_cast<int>(points.rows());
    if (points.cols() != 2)
        throw ConfigError("delaunay2d expects 2D points");
    if (n < 3)
        throw ConfigError("delaunay2d needs at least 3 points");
    if (!points.allFinite())
        throw ConfigError("delaunay2d: non-finite coordinates");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return points(a, 0) != points(b, 0) ? points(a, 0) < points(b, 0) : points(a, 1) < points(b, 1);
    });
    for (int k = 1; k < n; ++k)
        if (points.row(order[k]) == points.row(order[k - 1]))
            throw ConfigError("delaunay2d: duplicate point " + std::to_string(order[k]));

    std::vector<Point2> pts(static_cast<std::size_t>(n) + 3);
    for (int i = 0; i < n; ++i)
        pts[i] = Point2(points(i, 0), points(i, 1));
    bool collinear = true;
    for (int i = 2; i < n && collinear; ++i)
        collinear = predicates::orient2d(pts[0], pts[1], pts[i]) == 0;
    if (collinear)
        throw ConfigError("delaunay2d: all points are collinear");

    const Eigen::RowVector2d lo = points.colwise().minCoeff();
    const Eigen::RowVector2d hi = points.colwise().maxCoeff();
    const Point2 centre = 0.5 * (lo + hi).transpose();
    const double span = std::max((hi - lo).maxCoeff(), 1e-300);
    const double big = 1e4 * span;
    pts[n] = centre + Point2(-big, -big);
    pts[n + 1] = centre + Point2(big, -big);
    pts[n + 2] = centre + Point2(0.0, big);

    std::vector<std::array<int, 3>> tris = {{n, n + 1, n + 2}};
    std::vector<char> alive = {1};
    auto edge_key = [&](int u, int v) { return static_cast<long long>(u) * (n + 3) + v; };

    std::vector<int> bad;
    std::unordered_set<long long> cavity_edges;
    for (int p = 0; p < n; ++p) {
        bad.clear();
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!alive[t])
                continue;
            const auto& tri = tris[t];
            if (predicates::in_circle(pts[tri[0]], pts[tri[1]], pts[tri[2]], pts[p]) > 0)
                bad.push_back(static_cast<int>(t));
        }
        cavity_edges.clear();
        for (int t : bad)
            for (int k = 0; k < 3; ++k)
                cavity_edges.insert(edge_key(tris[t][k], tris[t][(k + 1) % 3]));
        std::vector<std::array<int, 3>> fresh;
        for (int t : bad) {
            for (int k = 0; k < 3; ++k) {
                const int u = tris[t][k], v = tris[t][(k + 1) % 3];
                if (!cavity_edges.count(edge_key(v, u)))
                    fresh.push_back({u, v, p});
            }
            alive[t] = 0;
        }
        for (const auto& tri : fresh) {
            tris.push_back(tri);
            alive.push_back(1);
        }
    }

    std::vector<std::array<int, 3>> kept;
    for (std::size_t t = 0; t < tris.size(); ++t)
        if (alive[t] && tris[t][0] < n && tris[t][1] < n && tris[t][2] < n)
            kept.push_back(tris[t]);
    Eigen::MatrixXi out(static_cast<Eigen::Index>(kept.size()), 3);
    for (std::size_t t = 0; t < kept.size(); ++t)
        for (int k = 0; k < 3; ++k)
            out(static_cast<Eigen::Index>(t), k) = kept[t][k];
    return out;
}

} // namespace fplm
