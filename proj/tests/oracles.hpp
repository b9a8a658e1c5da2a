#pragma once

// Independent reference implementations used only by the test suite. None of
// these call into the library's predicates or solvers.

#include "fplm/simplicial.hpp"

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

struct RPoint2
{
    Rational x, y;
};

inline RPoint2 exact2(const Eigen::MatrixXd& c, int v)
{
    return {Rational(c(v, 0)), Rational(c(v, 1))};
}

inline int sign(const Rational& r)
{
    return r > 0 ? 1 : (r < 0 ? -1 : 0);
}

inline int cross_sign(const RPoint2& o, const RPoint2& a, const RPoint2& b)
{
    return sign((a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x));
}

inline bool on_closed_segment(const RPoint2& p, const RPoint2& a, const RPoint2& b)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y
           && p.y <= std::max(a.y, b.y);
}

// Do two closed segments share a point other than a common mesh endpoint?
// Segments with a shared vertex index conflict only when collinear with
// overlap of positive length. Identical index pairs always conflict.
inline bool edges_conflict(std::pair<int, int> e, std::pair<int, int> f, const Eigen::MatrixXd& coords)
{
    if (std::minmax(e.first, e.second) == std::minmax(f.first, f.second))
        return true;
    const RPoint2 a = exact2(coords, e.first), b = exact2(coords, e.second);
    const RPoint2 c = exact2(coords, f.first), d = exact2(coords, f.second);
    int shared = -1, ea = -1, fb = -1;
    if (e.first == f.first) { shared = e.first; ea = e.second; fb = f.second; }
    if (e.first == f.second) { shared = e.first; ea = e.second; fb = f.first; }
    if (e.second == f.first) { shared = e.second; ea = e.first; fb = f.second; }
    if (e.second == f.second) { shared = e.second; ea = e.first; fb = f.first; }
    if (shared >= 0) {
        const RPoint2 s = exact2(coords, shared), p = exact2(coords, ea), q = exact2(coords, fb);
        if (cross_sign(s, p, q) != 0)
            return false;
        // Collinear through s: overlap iff p and q lie on the same side of s.
        const Rational dot = (p.x - s.x) * (q.x - s.x) + (p.y - s.y) * (q.y - s.y);
        return dot > 0;
    }
    const int d1 = cross_sign(a, b, c), d2 = cross_sign(a, b, d);
    const int d3 = cross_sign(c, d, a), d4 = cross_sign(c, d, b);
    if (d1 * d2 < 0 && d3 * d4 < 0)
        return true;
    if (d1 == 0 && on_closed_segment(c, a, b))
        return true;
    if (d2 == 0 && on_closed_segment(d, a, b))
        return true;
    if (d3 == 0 && on_closed_segment(a, c, d))
        return true;
    if (d4 == 0 && on_closed_segment(b, c, d))
        return true;
    return false;
}

inline long brute_force_crossings(const std::vector<std::pair<int, int>>& edges, const Eigen::MatrixXd& coords)
{
    long count = 0;
    for (std::size_t i = 0; i < edges.size(); ++i)
        for (std::size_t j = i + 1; j < edges.size(); ++j)
            if (edges_conflict(edges[i], edges[j], coords))
                ++count;
    return count;
}

// Gaussian elimination with partial pivoting on a dense copy.
inline Eigen::MatrixXd dense_solve(Eigen::MatrixXd a, Eigen::MatrixXd b)
{
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k)))
                piv = i;
        if (a(piv, k) == 0.0)
            throw std::runtime_error("singular matrix");
        a.row(k).swap(a.row(piv));
        b.row(k).swap(b.row(piv));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a.row(i) -= f * a.row(k);
            b.row(i) -= f * b.row(k);
        }
    }
    Eigen::MatrixXd x(n, b.cols());
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        Eigen::RowVectorXd acc = b.row(i);
        for (Eigen::Index j = i + 1; j < n; ++j)
            acc -= a(i, j) * x.row(j);
        x.row(i) = acc / a(i, i);
    }
    return x;
}

// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double min_eigenvalue(Eigen::MatrixXd a)
{
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q)
                off += a(p, q) * a(p, q);
        if (off < 1e-22)
            break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    return a.diagonal().minCoeff();
}

// Exact separating-axis test: true iff the closed tetrahedra have
// intersecting interiors.
struct RPoint3
{
    Rational x, y, z;
};

inline RPoint3 sub(const RPoint3& a, const RPoint3& b)
{
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline RPoint3 cross(const RPoint3& a, const RPoint3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline Rational dot(const RPoint3& a, const RPoint3& b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline bool tetra_interiors_intersect(const std::array<RPoint3, 4>& p, const std::array<RPoint3, 4>& q)
{
    std::vector<RPoint3> axes;
    auto add_faces = [&](const std::array<RPoint3, 4>& t) {
        static constexpr int f[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
        for (const auto& face : f)
            axes.push_back(cross(sub(t[face[1]], t[face[0]]), sub(t[face[2]], t[face[0]])));
    };
    add_faces(p);
    add_faces(q);
    static constexpr int e[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (const auto& ea : e)
        for (const auto& eb : e)
            axes.push_back(cross(sub(p[ea[1]], p[ea[0]]), sub(q[eb[1]], q[eb[0]])));
    for (const auto& axis : axes) {
        if (axis.x == 0 && axis.y == 0 && axis.z == 0)
            continue;
        Rational pmin = dot(axis, p[0]), pmax = pmin, qmin = dot(axis, q[0]), qmax = qmin;
        for (int k = 1; k < 4; ++k) {
            const Rational a = dot(axis, p[k]), b = dot(axis, q[k]);
            pmin = std::min(pmin, a);
            pmax = std::max(pmax, a);
            qmin = std::min(qmin, b);
            qmax = std::max(qmax, b);
        }
        if (pmax <= qmin || qmax <= pmin)
            return false;
    }
    return true;
}

inline long intersecting_tetra_pairs(const fplm::SimplicialMesh& mesh, const Eigen::MatrixXd& coords)
{
    std::vector<std::array<RPoint3, 4>> tets(static_cast<std::size_t>(mesh.num_simplices()));
    for (Eigen::Index s = 0; s < mesh.num_simplices(); ++s)
        for (int c = 0; c < 4; ++c) {
            const int v = mesh.simplices(s, c);
            tets[s][c] = {Rational(coords(v, 0)), Rational(coords(v, 1)), Rational(coords(v, 2))};
        }
    long count = 0;
    for (std::size_t i = 0; i < tets.size(); ++i)
        for (std::size_t j = i + 1; j < tets.size(); ++j)
            if (tetra_interiors_intersect(tets[i], tets[j]))
                ++count;
    return count;
}

// Shoelace / Gram determinant area of a planar triangle in exact arithmetic.
inline int triangle_sign(const Eigen::MatrixXd& c, int a, int b, int d)
{
    return cross_sign(exact2(c, a), exact2(c, b), exact2(c, d));
}

// Is point p strictly inside the circumcircle of counterclockwise abc?
inline bool strictly_in_circumcircle(const Eigen::MatrixXd& c, int a, int b, int d, int p)
{
    const RPoint2 pa = exact2(c, a), pb = exact2(c, b), pc = exact2(c, d), pp = exact2(c, p);
    const Rational adx = pa.x - pp.x, ady = pa.y - pp.y;
    const Rational bdx = pb.x - pp.x, bdy = pb.y - pp.y;
    const Rational cdx = pc.x - pp.x, cdy = pc.y - pp.y;
    const Rational det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
                         - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
                         + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
    return det > 0;
}

// ---------------------------------------------------------------------------
// Fixtures

inline fplm::SimplicialMesh make_mesh(std::vector<std::vector<double>> pts, std::vector<std::vector<int>> simp)
{
    fplm::SimplicialMesh m;
    m.vertices.resize(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(pts.front().size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts[i].size(); ++j)
            m.vertices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pts[i][j];
    m.simplices.resize(static_cast<Eigen::Index>(simp.size()), static_cast<Eigen::Index>(simp.front().size()));
    for (std::size_t i = 0; i < simp.size(); ++i)
        for (std::size_t j = 0; j < simp[i].size(); ++j)
            m.simplices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = simp[i][j];
    return m;
}

// n x n planar grid over [0,1]^2 with every cell cut along the same diagonal.
inline fplm::SimplicialMesh planar_grid(int n)
{
    fplm::SimplicialMesh m;
    m.vertices.resize(n * n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m.vertices.row(i * n + j) << static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1);
    m.simplices.resize(2 * (n - 1) * (n - 1), 3);
    int t = 0;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            const int a = i * n + j, b = (i + 1) * n + j, c = (i + 1) * n + j + 1, d = i * n + j + 1;
            m.simplices.row(t++) << a, b, c;
            m.simplices.row(t++) << a, c, d;
        }
    return m;
}

} // namespace oracle
