#pragma once

// Convex hulls in the plane and in space, with signed point-to-hull distances.

#include "fplm/errors.hpp"
#include "fplm/predicates.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <vector>

namespace fplm {

/// Strictly convex hull polygon of the rows of an n x 2 matrix, counterclockwise,
/// as row indices. Throws ConfigError if the points are collinear.
inline std::vector<int> convex_hull_2d(const Eigen::MatrixXd& pts)
{
    using predicates::Point2;
    const int n = static_cast<int>(pts.rows());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pts(a, 0) != pts(b, 0))
            return pts(a, 0) < pts(b, 0);
        return pts(a, 1) < pts(b, 1);
    });
    auto at = [&](int i) { return Point2(pts(i, 0), pts(i, 1)); };
    std::vector<int> hull(2 * static_cast<std::size_t>(n) + 1);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && predicates::orient2d(at(hull[k - 2]), at(hull[k - 1]), at(order[i])) <= 0)
            --k;
        hull[k++] = order[i];
    }
    for (int i = n - 2, lower = static_cast<int>(k) + 1; i >= 0; --i) {
        while (static_cast<int>(k) >= lower
               && predicates::orient2d(at(hull[k - 2]), at(hull[k - 1]), at(order[i])) <= 0)
            --k;
        hull[k++] = order[i];
    }
    hull.resize(k > 0 ? k - 1 : 0);
    if (hull.size() < 3)
        throw ConfigError("points are affinely degenerate (collinear); no 2D hull");
    return hull;
}

/// Oriented triangle of a 3D hull; the outward normal follows the right-hand rule.
struct HullFace
{
    int a, b, c;
};

/// Convex hull of the rows of an n x 3 matrix by incremental insertion with
/// exact visibility tests. Points on a face plane are treated as not visible,
/// so coplanar facets may be triangulated arbitrarily.
inline std::vector<HullFace> convex_hull_3d(const Eigen::MatrixXd& pts)
{
    using predicates::Point3;
    const int n = static_cast<int>(pts.rows());
    auto at = [&](int i) { return Point3(pts(i, 0), pts(i, 1), pts(i, 2)); };

    // Initial tetrahedron.
    int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
    for (int i = 1; i < n && i1 < 0; ++i)
        if (at(i) != at(i0))
            i1 = i;
    for (int i = 1; i1 >= 0 && i < n && i2 < 0; ++i) {
        const Eigen::Vector3d cr = (at(i1) - at(i0)).cross(at(i) - at(i0));
        if (cr.squaredNorm() > 0.0)
            i2 = i;
    }
    for (int i = 1; i2 >= 0 && i < n && i3 < 0; ++i)
        if (predicates::orient3d(at(i0), at(i1), at(i2), at(i)) != 0)
            i3 = i;
    if (i3 < 0)
        throw ConfigError("points are affinely degenerate (coplanar); no 3D hull");
    if (predicates::orient3d(at(i0), at(i1), at(i2), at(i3)) > 0)
        std::swap(i1, i2);

    std::vector<HullFace> faces = {{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i0, i2, i3}};
    std::vector<char> alive(faces.size(), 1);
    std::unordered_map<std::uint64_t, int> edge_face;
    auto key = [](int u, int v) { return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v); };
    auto register_face = [&](int f) {
        const HullFace& h = faces[f];
        edge_face[key(h.a, h.b)] = f;
        edge_face[key(h.b, h.c)] = f;
        edge_face[key(h.c, h.a)] = f;
    };
    for (int f = 0; f < 4; ++f)
        register_face(f);

    std::vector<char> visible;
    for (int p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3)
            continue;
        const Point3 q = at(p);
        visible.assign(faces.size(), 0);
        bool any = false;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!alive[f])
                continue;
            if (predicates::orient3d(at(faces[f].a), at(faces[f].b), at(faces[f].c), q) > 0) {
                visible[f] = 1;
                any = true;
            }
        }
        if (!any)
            continue;
        std::vector<std::pair<int, int>> horizon;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!visible[f])
                continue;
            const int e[3][2] = {{faces[f].a, faces[f].b}, {faces[f].b, faces[f].c}, {faces[f].c, faces[f].a}};
            for (const auto& uv : e) {
                const auto it = edge_face.find(key(uv[1], uv[0]));
                if (it == edge_face.end() || !visible[it->second])
                    horizon.emplace_back(uv[0], uv[1]);
            }
        }
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!visible[f])
                continue;
            alive[f] = 0;
            for (const auto& [u, v] : {std::pair{faces[f].a, faces[f].b}, std::pair{faces[f].b, faces[f].c},
                                       std::pair{faces[f].c, faces[f].a}}) {
                const auto it = edge_face.find(key(u, v));
                if (it != edge_face.end() && it->second == static_cast<int>(f))
                    edge_face.erase(it);
            }
        }
        for (const auto& [u, v] : horizon) {
            faces.push_back({u, v, p});
            alive.push_back(1);
            register_face(static_cast<int>(faces.size()) - 1);
        }
    }

    std::vector<HullFace> out;
    for (std::size_t f = 0; f < faces.size(); ++f)
        if (alive[f])
            out.push_back(faces[f]);
    return out;
}

/// Signed distance of `p` to the hull of `fixed_pts` measured as the largest
/// outward offset over the hull's supporting lines or planes: negative inside,
/// zero on the boundary, positive outside.
class HullDistance
{
public:
    explicit HullDistance(const Eigen::MatrixXd& fixed_pts)
        : dim_(static_cast<int>(fixed_pts.cols()))
    {
        if (dim_ == 1) {
            lo_ = fixed_pts.col(0).minCoeff();
            hi_ = fixed_pts.col(0).maxCoeff();
            if (!(hi_ > lo_))
                throw ConfigError("fixed targets are affinely degenerate (single point)");
        } else if (dim_ == 2) {
            const auto hull = convex_hull_2d(fixed_pts);
            for (std::size_t k = 0; k < hull.size(); ++k) {
                const Eigen::Vector2d a = fixed_pts.row(hull[k]).transpose();
                const Eigen::Vector2d b = fixed_pts.row(hull[(k + 1) % hull.size()]).transpose();
                const Eigen::Vector2d e = b - a;
                Eigen::VectorXd normal(2);
                normal << e.y(), -e.x();
                normal.normalize();
                normals_.push_back(normal);
                offsets_.push_back(normal.dot(a));
            }
        } else if (dim_ == 3) {
            for (const HullFace& f : convex_hull_3d(fixed_pts)) {
                const Eigen::Vector3d a = fixed_pts.row(f.a).transpose();
                const Eigen::Vector3d b = fixed_pts.row(f.b).transpose();
                const Eigen::Vector3d c = fixed_pts.row(f.c).transpose();
                Eigen::VectorXd normal = (b - a).cross(c - a).normalized();
                normals_.push_back(normal);
                offsets_.push_back(normal.dot(a));
            }
        } else {
            throw ConfigError("hull containment supports dimensions 1 to 3");
        }
    }

    double operator()(const Eigen::VectorXd& p) const
    {
        if (dim_ == 1)
            return std::max(lo_ - p[0], p[0] - hi_);
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < normals_.size(); ++k)
            worst = std::max(worst, normals_[k].dot(p) - offsets_[k]);
        return worst;
    }

private:
    int dim_;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<Eigen::VectorXd> normals_;
    std::vector<double> offsets_;
};

} // namespace fplm
