#pragma once

// Synthetic manifolds with ground-truth latent coordinates.

#include "fplm/delaunay.hpp"
#include "fplm/errors.hpp"
#include "fplm/simplicial.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace fplm {

enum class GeneratorKind
{
    SwissRoll,
    Paraboloid,
    MonkeySaddle,
    TwinPeaks,
    Sphere,
    Ball3,
    GridDisk,
};

inline const char* to_string(GeneratorKind k)
{
    switch (k) {
    case GeneratorKind::SwissRoll: return "swiss-roll";
    case GeneratorKind::Paraboloid: return "paraboloid";
    case GeneratorKind::MonkeySaddle: return "monkey-saddle";
    case GeneratorKind::TwinPeaks: return "twin-peaks";
    case GeneratorKind::Sphere: return "sphere";
    case GeneratorKind::Ball3: return "ball3";
    case GeneratorKind::GridDisk: return "grid-disk";
    }
    return "unknown";
}

inline GeneratorKind parse_generator_kind(const std::string& name)
{
    for (auto k : {GeneratorKind::SwissRoll, GeneratorKind::Paraboloid, GeneratorKind::MonkeySaddle,
                   GeneratorKind::TwinPeaks, GeneratorKind::Sphere, GeneratorKind::Ball3, GeneratorKind::GridDisk})
        if (name == to_string(k))
            return k;
    throw ConfigError("unknown generator kind '" + name + "'");
}

enum class Triangulation
{
    StructuredGrid,   ///< surfaces: regular latent grid
    Delaunay,         ///< surfaces: random latent samples, Delaunay triangulated
    ConcentricShells, ///< ball3: icosphere shells joined by prism layers around a centre vertex
    CubeGrid,         ///< ball3: five-tetrahedron cube grid clipped to the ball
};

inline const char* to_string(Triangulation t)
{
    switch (t) {
    case Triangulation::StructuredGrid: return "grid";
    case Triangulation::Delaunay: return "delaunay";
    case Triangulation::ConcentricShells: return "shells";
    case Triangulation::CubeGrid: return "cube";
    }
    return "unknown";
}

inline Triangulation parse_triangulation(const std::string& name)
{
    for (auto t : {Triangulation::StructuredGrid, Triangulation::Delaunay, Triangulation::ConcentricShells,
                   Triangulation::CubeGrid})
        if (name == to_string(t))
            return t;
    throw ConfigError("unknown triangulation '" + name + "' (expected grid, delaunay, shells or cube)");
}

inline Triangulation default_triangulation(GeneratorKind kind)
{
    switch (kind) {
    case GeneratorKind::Ball3: return Triangulation::ConcentricShells;
    default: return Triangulation::StructuredGrid;
    }
}

struct GeneratorSpec
{
    GeneratorKind kind = GeneratorKind::GridDisk;
    /// Samples per latent axis for surfaces; subdivision level for sphere;
    /// LEVELxSHELLS for shell balls; cells per axis for cube-grid balls.
    /// A single surface value applies to both axes. Empty means the default.
    std::vector<int> resolution;
    std::uint64_t seed = 0;
    std::optional<Triangulation> triangulation;
};

/// Defaults: 30x30 surfaces, icosphere level 3, 1x5 shell ball (1040 tets), 7-cell cube ball.
inline std::vector<int> default_resolution(GeneratorKind kind, Triangulation tri)
{
    switch (kind) {
    case GeneratorKind::Sphere: return {3};
    case GeneratorKind::Ball3: return tri == Triangulation::CubeGrid ? std::vector<int>{7} : std::vector<int>{1, 5};
    default: return {30, 30};
    }
}

inline std::vector<int> default_resolution(GeneratorKind kind)
{
    return default_resolution(kind, default_triangulation(kind));
}

/// "30x30" -> {30, 30}; "3" -> {3}.
inline std::vector<int> parse_resolution(const std::string& text)
{
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find('x', pos);
        const std::string part = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (part.empty() || used != part.size() || value <= 0)
            throw ConfigError("bad resolution '" + text + "' (expected e.g. 30x30 or 3)");
        out.push_back(value);
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

struct GeneratedMesh
{
    SimplicialMesh mesh;
    Eigen::MatrixXd latent; ///< N x d ground-truth chart coordinates
};

namespace detail {

// Triangulate an nx x ny latent grid. Diagonals follow an X pattern about the
// grid centre so every corner cell is split through its corner vertex; this
// keeps grids with at least 3 samples per axis free of dividing edges.
inline Eigen::MatrixXi grid_triangles(int nx, int ny)
{
    Eigen::MatrixXi tris(2 * (nx - 1) * (ny - 1), 3);
    auto id = [ny](int i, int j) { return i * ny + j; };
    int t = 0;
    for (int i = 0; i + 1 < nx; ++i) {
        for (int j = 0; j + 1 < ny; ++j) {
            const double cx = (i + 0.5) - (nx - 1) / 2.0;
            const double cy = (j + 0.5) - (ny - 1) / 2.0;
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (cx * cy >= 0) {
                tris.row(t++) << a, b, c;
                tris.row(t++) << a, c, d;
            } else {
                tris.row(t++) << a, b, d;
                tris.row(t++) << b, c, d;
            }
        }
    }
    return tris;
}

struct LatentDomain
{
    double u0, u1, v0, v1;
};

inline LatentDomain domain_of(GeneratorKind kind)
{
    switch (kind) {
    case GeneratorKind::SwissRoll: return {1.5 * std::numbers::pi, 4.5 * std::numbers::pi, 0.0, 10.0};
    case GeneratorKind::GridDisk: return {0.0, 1.0, 0.0, 1.0};
    default: return {-1.0, 1.0, -1.0, 1.0};
    }
}

inline Eigen::RowVector3d lift_surface(GeneratorKind kind, double u, double v)
{
    switch (kind) {
    case GeneratorKind::SwissRoll: return {u * std::cos(u), v, u * std::sin(u)};
    case GeneratorKind::Paraboloid: return {u, v, u * u + v * v};
    case GeneratorKind::MonkeySaddle: return {u, v, u * u * u - 3.0 * u * v * v};
    case GeneratorKind::TwinPeaks: return {u, v, std::sin(std::numbers::pi * u) * std::tanh(3.0 * v)};
    default: return {u, v, 0.0};
    }
}

inline GeneratedMesh make_surface(const GeneratorSpec& spec, int nx, int ny)
{
    if (nx < 2 || ny < 2)
        throw ConfigError("surface resolution must be at least 2 per axis");
    const LatentDomain dom = domain_of(spec.kind);
    GeneratedMesh out;
    if (spec.triangulation.value_or(Triangulation::StructuredGrid) == Triangulation::StructuredGrid) {
        out.latent.resize(nx * ny, 2);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                out.latent(i * ny + j, 0) = dom.u0 + (dom.u1 - dom.u0) * i / (nx - 1);
                out.latent(i * ny + j, 1) = dom.v0 + (dom.v1 - dom.v0) * j / (ny - 1);
            }
        out.mesh.simplices = grid_triangles(nx, ny);
    } else {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        out.latent.resize(nx * ny, 2);
        for (int k = 0; k < nx * ny; ++k) {
            const double a = unit(rng), b = unit(rng);
            out.latent(k, 0) = dom.u0 + (dom.u1 - dom.u0) * a;
            out.latent(k, 1) = dom.v0 + (dom.v1 - dom.v0) * b;
        }
        out.mesh.simplices = delaunay2d(out.latent);
    }
    if (spec.kind == GeneratorKind::GridDisk) {
        out.mesh.vertices = out.latent;
    } else {
        out.mesh.vertices.resize(out.latent.rows(), 3);
        for (Eigen::Index k = 0; k < out.latent.rows(); ++k)
            out.mesh.vertices.row(k) = lift_surface(spec.kind, out.latent(k, 0), out.latent(k, 1));
    }
    return out;
}

inline GeneratedMesh make_icosphere(int level)
{
    if (level < 0 || level > 9)
        throw ConfigError("icosphere level must lie in [0, 9]");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : verts)
        v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end())
                return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const int id = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    GeneratedMesh out;
    out.mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    out.latent.resize(static_cast<Eigen::Index>(verts.size()), 2);
    for (std::size_t k = 0; k < verts.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        out.mesh.vertices.row(row) = verts[k].transpose();
        out.latent(row, 0) = std::atan2(verts[k].y(), verts[k].x());
        out.latent(row, 1) = std::asin(std::clamp(verts[k].z(), -1.0, 1.0));
    }
    out.mesh.simplices.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int k = 0; k < 3; ++k)
            out.mesh.simplices(static_cast<Eigen::Index>(f), k) = faces[f][k];
    return out;
}

// Unit ball from an r^3 grid of cubes over [-1, 1]^3, each split into five
// tetrahedra with alternating parity so shared faces agree. Cubes whose centre
// lies outside the ball are dropped; dividing faces are then split.
inline GeneratedMesh make_ball(int r)
{
    if (r < 1)
        throw ConfigError("ball3 resolution must be at least 1");
    const int np = r + 1;
    auto id = [np](int i, int j, int k) { return (i * np + j) * np + k; };
    static constexpr int kEven[5][4][3] = {
        {{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}},
        {{1, 0, 0}, {0, 0, 0}, {1, 1, 0}, {1, 0, 1}},
        {{0, 1, 0}, {0, 0, 0}, {0, 1, 1}, {1, 1, 0}},
        {{0, 0, 1}, {0, 0, 0}, {1, 0, 1}, {0, 1, 1}},
        {{1, 1, 1}, {1, 1, 0}, {0, 1, 1}, {1, 0, 1}},
    };
    SimplicialMesh grid;
    grid.vertices.resize(np * np * np, 3);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j)
            for (int k = 0; k < np; ++k)
                grid.vertices.row(id(i, j, k)) << -1.0 + 2.0 * i / r, -1.0 + 2.0 * j / r, -1.0 + 2.0 * k / r;

    std::vector<std::array<int, 4>> tets;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                const Eigen::Vector3d centre(-1.0 + (2.0 * i + 1.0) / r, -1.0 + (2.0 * j + 1.0) / r,
                                             -1.0 + (2.0 * k + 1.0) / r);
                if (centre.norm() >= 1.0)
                    continue;
                const bool odd = (i + j + k) % 2 == 1;
                for (const auto& tet : kEven) {
                    std::array<int, 4> t{};
                    for (int c = 0; c < 4; ++c) {
                        const int dx = odd ? 1 - tet[c][0] : tet[c][0];
                        t[c] = id(i + dx, j + tet[c][1], k + tet[c][2]);
                    }
                    tets.push_back(t);
                }
            }
    if (tets.empty())
        throw ConfigError("ball3 resolution keeps no cells");
    grid.simplices.resize(static_cast<Eigen::Index>(tets.size()), 4);
    for (std::size_t t = 0; t < tets.size(); ++t)
        for (int c = 0; c < 4; ++c)
            grid.simplices(static_cast<Eigen::Index>(t), c) = tets[t][c];

    GeneratedMesh out;
    out.mesh = split_dividing_faces(remove_unused_vertices(grid));
    out.latent = out.mesh.vertices;
    return out;
}

// Unit ball as `shells` concentric icospheres at radii k / shells around a
// centre vertex. The innermost sphere is coned to the centre; consecutive
// spheres are joined by triangular prisms, each cut into three tetrahedra
// along diagonals chosen by vertex index so neighbouring prisms agree.
inline GeneratedMesh make_shell_ball(int level, int shells)
{
    if (shells < 1)
        throw ConfigError("shell ball needs at least one shell");
    const SimplicialMesh ico = make_icosphere(level).mesh;
    const int nv = static_cast<int>(ico.num_vertices());
    auto id = [nv](int shell, int v) { return 1 + (shell - 1) * nv + v; };

    GeneratedMesh out;
    out.mesh.vertices.resize(1 + shells * nv, 3);
    out.mesh.vertices.row(0).setZero();
    for (int k = 1; k <= shells; ++k)
        for (int v = 0; v < nv; ++v)
            out.mesh.vertices.row(id(k, v)) = ico.vertices.row(v).normalized() * (static_cast<double>(k) / shells);

    out.mesh.simplices.resize(ico.num_simplices() * (1 + 3 * (shells - 1)), 4);
    Eigen::Index t = 0;
    for (Eigen::Index f = 0; f < ico.num_simplices(); ++f) {
        std::array<int, 3> tri{ico.simplices(f, 0), ico.simplices(f, 1), ico.simplices(f, 2)};
        std::sort(tri.begin(), tri.end());
        out.mesh.simplices.row(t++) << 0, id(1, tri[0]), id(1, tri[1]), id(1, tri[2]);
        for (int k = 1; k < shells; ++k) {
            const int a = id(k, tri[0]), b = id(k, tri[1]), c = id(k, tri[2]);
            const int A = id(k + 1, tri[0]), B = id(k + 1, tri[1]), C = id(k + 1, tri[2]);
            out.mesh.simplices.row(t++) << a, b, c, C;
            out.mesh.simplices.row(t++) << a, b, B, C;
            out.mesh.simplices.row(t++) << a, A, B, C;
        }
    }
    out.latent = out.mesh.vertices;
    return out;
}

} // namespace detail

inline GeneratedMesh generate(const GeneratorSpec& spec)
{
    const Triangulation tri = spec.triangulation.value_or(default_triangulation(spec.kind));
    const bool ball = spec.kind == GeneratorKind::Ball3;
    const bool ball_tri = tri == Triangulation::ConcentricShells || tri == Triangulation::CubeGrid;
    if (spec.kind == GeneratorKind::Sphere ? tri != Triangulation::StructuredGrid : ball != ball_tri)
        throw ConfigError(std::string("triangulation '") + to_string(tri) + "' does not apply to "
                          + to_string(spec.kind));
    std::vector<int> res = spec.resolution.empty() ? default_resolution(spec.kind, tri) : spec.resolution;
    GeneratedMesh out;
    switch (spec.kind) {
    case GeneratorKind::Sphere:
        if (res.size() != 1)
            throw ConfigError("sphere takes a single subdivision level");
        out = detail::make_icosphere(res[0]);
        break;
    case GeneratorKind::Ball3:
        if (tri == Triangulation::CubeGrid) {
            if (res.size() != 1)
                throw ConfigError("cube-grid ball3 takes a single cells-per-axis value");
            out = detail::make_ball(res[0]);
        } else {
            if (res.size() != 2)
                throw ConfigError("shell ball3 takes a resolution of the form LEVELxSHELLS");
            if (res[0] > 5)
                throw ConfigError("shell ball3 icosphere level must be at most 5");
            out = detail::make_shell_ball(res[0], res[1]);
        }
        break;
    default:
        if (res.size() == 1)
            res.push_back(res[0]);
        if (res.size() != 2)
            throw ConfigError("surfaces take a resolution of the form NxM");
        out = detail::make_surface(spec, res[0], res[1]);
        break;
    }
    const auto violations = validate_mesh(out.mesh);
    if (!violations.empty())
        throw MeshError(std::string("generated ") + to_string(spec.kind)
                        + " mesh is invalid: " + violations.front().message);
    return out;
}

} // namespace fplm
