#pragma once

// Robust geometric predicates.
//
// Each predicate first evaluates the determinant in double precision and
// compares it against a forward error bound. Only when the sign is not
// certified by the bound is the determinant recomputed in exact rational
// arithmetic. Input doubles are converted to rationals exactly, so the
// returned sign is the sign of the true determinant of the given inputs.

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>

namespace fplm::predicates {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kEps = std::numeric_limits<double>::epsilon() * 0.5;
inline constexpr double kOrient2Bound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kOrient3Bound = (7.0 + 56.0 * kEps) * kEps;
inline constexpr double kInCircleBound = (10.0 + 96.0 * kEps) * kEps;

template <typename T>
int sign_of(const T& v)
{
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

inline int orient2d_exact(const Point2& a, const Point2& b, const Point2& c)
{
    const Rational ax(a.x()), ay(a.y());
    const Rational bx = Rational(b.x()) - ax, by = Rational(b.y()) - ay;
    const Rational cx = Rational(c.x()) - ax, cy = Rational(c.y()) - ay;
    return sign_of(Rational(bx * cy - by * cx));
}

inline int orient3d_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d)
{
    Rational m[3][3];
    const Point3* rows[3] = {&b, &c, &d};
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k)
            m[r][k] = Rational((*rows[r])[k]) - Rational(a[k]);
    const Rational det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                       - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                       + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return sign_of(det);
}

inline int in_circle_exact(const Point2& a, const Point2& b, const Point2& c, const Point2& d)
{
    const Rational dx(d.x()), dy(d.y());
    const Rational adx = Rational(a.x()) - dx, ady = Rational(a.y()) - dy;
    const Rational bdx = Rational(b.x()) - dx, bdy = Rational(b.y()) - dy;
    const Rational cdx = Rational(c.x()) - dx, cdy = Rational(c.y()) - dy;
    const Rational alift = adx * adx + ady * ady;
    const Rational blift = bdx * bdx + bdy * bdy;
    const Rational clift = cdx * cdx + cdy * cdy;
    const Rational det = alift * (bdx * cdy - cdx * bdy)
                       + blift * (cdx * ady - adx * cdy)
                       + clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

} // namespace detail

/// Sign of the signed area of triangle (a, b, c): +1 when counterclockwise.
inline int orient2d(const Point2& a, const Point2& b, const Point2& c)
{
    const double left = (b.x() - a.x()) * (c.y() - a.y());
    const double right = (b.y() - a.y()) * (c.x() - a.x());
    const double det = left - right;
    const double bound = detail::kOrient2Bound * (std::abs(left) + std::abs(right));
    if (det > bound || -det > bound)
        return det > 0 ? 1 : -1;
    return detail::orient2d_exact(a, b, c);
}

/// Sign of det[b - a, c - a, d - a]; +1 when (a, b, c, d) is a right-handed tetrahedron.
inline int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d)
{
    const Point3 u = b - a, v = c - a, w = d - a;
    const double t0 = u.x() * (v.y() * w.z() - v.z() * w.y());
    const double t1 = u.y() * (v.x() * w.z() - v.z() * w.x());
    const double t2 = u.z() * (v.x() * w.y() - v.y() * w.x());
    const double det = t0 - t1 + t2;
    const double permanent =
        std::abs(u.x()) * (std::abs(v.y() * w.z()) + std::abs(v.z() * w.y()))
        + std::abs(u.y()) * (std::abs(v.x() * w.z()) + std::abs(v.z() * w.x()))
        + std::abs(u.z()) * (std::abs(v.x() * w.y()) + std::abs(v.y() * w.x()));
    const double bound = detail::kOrient3Bound * permanent;
    if (det > bound || -det > bound)
        return det > 0 ? 1 : -1;
    return detail::orient3d_exact(a, b, c, d);
}

/// +1 if d lies strictly inside the circumcircle of the counterclockwise
/// triangle (a, b, c), -1 if strictly outside, 0 if cocircular.
inline int in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d)
{
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double bc = bdx * cdy - cdx * bdy;
    const double ca = cdx * ady - adx * cdy;
    const double ab = adx * bdy - bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * bc + blift * ca + clift * ab;
    const double permanent = (std::abs(bdx * cdy) + std::abs(cdx * bdy)) * alift
                           + (std::abs(cdx * ady) + std::abs(adx * cdy)) * blift
                           + (std::abs(adx * bdy) + std::abs(bdx * ady)) * clift;
    const double bound = detail::kInCircleBound * permanent;
    if (det > bound || -det > bound)
        return det > 0 ? 1 : -1;
    return detail::in_circle_exact(a, b, c, d);
}

namespace detail {

// c is known to be collinear with segment ab; true if it lies within the closed box of ab.
inline bool within_collinear_span(const Point2& a, const Point2& b, const Point2& c)
{
    if (a.x() != b.x())
        return (a.x() <= c.x() && c.x() <= b.x()) || (b.x() <= c.x() && c.x() <= a.x());
    return (a.y() <= c.y() && c.y() <= b.y()) || (b.y() <= c.y() && c.y() <= a.y());
}

} // namespace detail

/// True if the closed segments [p0, p1] and [q0, q1] share at least one point.
inline bool segments_intersect(const Point2& p0, const Point2& p1, const Point2& q0, const Point2& q1)
{
    const int o1 = orient2d(p0, p1, q0);
    const int o2 = orient2d(p0, p1, q1);
    const int o3 = orient2d(q0, q1, p0);
    const int o4 = orient2d(q0, q1, p1);
    if (o1 * o2 < 0 && o3 * o4 < 0)
        return true;
    if (o1 == 0 && detail::within_collinear_span(p0, p1, q0))
        return true;
    if (o2 == 0 && detail::within_collinear_span(p0, p1, q1))
        return true;
    if (o3 == 0 && detail::within_collinear_span(q0, q1, p0))
        return true;
    if (o4 == 0 && detail::within_collinear_span(q0, q1, p1))
        return true;
    return false;
}

/// For segments [s, a] and [s, b] sharing the endpoint s: true if they overlap
/// in more than the shared point, i.e. a and b are collinear with s and on the same side.
inline bool shared_endpoint_overlap(const Point2& s, const Point2& a, const Point2& b)
{
    if (a == s || b == s)
        return false;
    if (orient2d(s, a, b) != 0)
        return false;
    const Point2 da = a - s, db = b - s;
    // Collinear: same side iff the coordinate signs agree on a nonzero axis.
    if (da.x() != 0.0)
        return (da.x() > 0) == (db.x() > 0);
    return (da.y() > 0) == (db.y() > 0);
}

} // namespace fplm::predicates
