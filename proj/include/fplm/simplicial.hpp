#pragma once

// d-simplex decompositions: validation, boundary extraction, dividing faces,
// combinatorial orientation, and polygon tessellation.

#include "fplm/errors.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fplm {

/// Vertices in ambient space plus d-simplex connectivity.
///
/// `vertices` is N x l, `simplices` is M x (d + 1). The intrinsic dimension is
/// carried by the simplex width so the two can never disagree.
struct SimplicialMesh
{
    Eigen::MatrixXd vertices;
    Eigen::MatrixXi simplices;

    int num_vertices() const { return static_cast<int>(vertices.rows()); }
    int num_simplices() const { return static_cast<int>(simplices.rows()); }
    int ambient_dim() const { return static_cast<int>(vertices.cols()); }
    int intrinsic_dim() const { return static_cast<int>(simplices.cols()) - 1; }
};

/// Euclidean diameter of the axis-aligned bounding box of the rows of `points`.
inline double bounding_box_diameter(const Eigen::MatrixXd& points)
{
    if (points.rows() == 0)
        return 0.0;
    return (points.colwise().maxCoeff() - points.colwise().minCoeff()).norm();
}

// ---------------------------------------------------------------------------
// Face table

/// All (d-1)-faces of a simplex list, keyed by sorted vertex indices, with the
/// simplices that contain each face. Faces are stored in lexicographic order.
class FaceTable
{
public:
    explicit FaceTable(const Eigen::MatrixXi& simplices)
        : face_size_(static_cast<int>(simplices.cols()) - 1)
    {
        const int m = static_cast<int>(simplices.rows());
        const int width = static_cast<int>(simplices.cols());
        if (face_size_ < 1 || m == 0)
            return;

        std::vector<int> keys(static_cast<std::size_t>(m) * width * face_size_);
        std::vector<int> order(static_cast<std::size_t>(m) * width);
        for (int s = 0; s < m; ++s) {
            for (int k = 0; k < width; ++k) {
                int* key = &keys[(static_cast<std::size_t>(s) * width + k) * face_size_];
                int pos = 0;
                for (int j = 0; j < width; ++j)
                    if (j != k)
                        key[pos++] = simplices(s, j);
                std::sort(key, key + face_size_);
            }
        }
        std::iota(order.begin(), order.end(), 0);
        auto key_of = [&](int entry) { return &keys[static_cast<std::size_t>(entry) * face_size_]; };
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const int* ka = key_of(a);
            const int* kb = key_of(b);
            const auto cmp = std::lexicographical_compare(ka, ka + face_size_, kb, kb + face_size_);
            if (cmp)
                return true;
            if (std::equal(ka, ka + face_size_, kb))
                return a < b;
            return false;
        });

        for (std::size_t i = 0; i < order.size(); ++i) {
            const int entry = order[i];
            if (i == 0 || !std::equal(key_of(entry), key_of(entry) + face_size_, key_of(order[i - 1]))) {
                offsets_.push_back(static_cast<int>(coface_simplex_.size()));
                vertices_.insert(vertices_.end(), key_of(entry), key_of(entry) + face_size_);
            }
            coface_simplex_.push_back(entry / width);
            coface_local_.push_back(entry % width);
        }
        num_faces_ = static_cast<int>(offsets_.size());
        offsets_.push_back(static_cast<int>(coface_simplex_.size()));
    }

    int size() const { return num_faces_; }
    int face_size() const { return face_size_; }

    std::span<const int> face(int f) const
    {
        return {vertices_.data() + static_cast<std::size_t>(f) * face_size_, static_cast<std::size_t>(face_size_)};
    }

    int coface_count(int f) const { return offsets_[f + 1] - offsets_[f]; }
    std::span<const int> coface_simplices(int f) const
    {
        return {coface_simplex_.data() + offsets_[f], static_cast<std::size_t>(coface_count(f))};
    }
    /// Local index (within the simplex) of the vertex opposite the face.
    std::span<const int> coface_locals(int f) const
    {
        return {coface_local_.data() + offsets_[f], static_cast<std::size_t>(coface_count(f))};
    }

private:
    int face_size_ = 0;
    int num_faces_ = 0;
    std::vector<int> vertices_;
    std::vector<int> offsets_;
    std::vector<int> coface_simplex_;
    std::vector<int> coface_local_;
};

// ---------------------------------------------------------------------------
// Validation

enum class MeshRule
{
    DimensionMismatch,
    IndexOutOfRange,
    RepeatedVertex,
    FaceOvershared,
    Disconnected,
    Degenerate,
};

inline const char* to_string(MeshRule rule)
{
    switch (rule) {
    case MeshRule::DimensionMismatch: return "dimension mismatch";
    case MeshRule::IndexOutOfRange: return "index out of range";
    case MeshRule::RepeatedVertex: return "repeated vertex";
    case MeshRule::FaceOvershared: return "face shared by more than 2 simplices";
    case MeshRule::Disconnected: return "disconnected simplex adjacency";
    case MeshRule::Degenerate: return "degenerate simplex";
    }
    return "unknown";
}

struct MeshViolation
{
    MeshRule rule;
    int simplex = -1;      ///< offending simplex, -1 if not applicable
    std::vector<int> face; ///< offending face (sorted), empty if not applicable
    std::string message;
};

inline constexpr double kDefaultVolumeTolerance = 1e-12;

/// Unsigned d-volume of the simplex spanned by `corners` (d+1 rows, any ambient dimension).
inline double simplex_volume(const Eigen::MatrixXd& corners)
{
    const int d = static_cast<int>(corners.rows()) - 1;
    if (d <= 0)
        return 0.0;
    Eigen::MatrixXd edges(corners.cols(), d);
    for (int k = 0; k < d; ++k)
        edges.col(k) = (corners.row(k + 1) - corners.row(0)).transpose();
    const double gram = (edges.transpose() * edges).determinant();
    double factorial = 1.0;
    for (int k = 2; k <= d; ++k)
        factorial *= k;
    return std::sqrt(std::max(gram, 0.0)) / factorial;
}

inline Eigen::MatrixXd simplex_corners(const SimplicialMesh& mesh, int s)
{
    Eigen::MatrixXd corners(mesh.simplices.cols(), mesh.vertices.cols());
    for (int k = 0; k < mesh.simplices.cols(); ++k)
        corners.row(k) = mesh.vertices.row(mesh.simplices(s, k));
    return corners;
}

namespace detail {

class DisjointSets
{
public:
    explicit DisjointSets(int n)
        : parent_(static_cast<std::size_t>(n))
    {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

inline std::string join_indices(std::span<const int> idx)
{
    std::string out = "(";
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i)
            out += ",";
        out += std::to_string(idx[i]);
    }
    return out + ")";
}

} // namespace detail

/// Check the decomposition rules; an empty result means the mesh is valid.
inline std::vector<MeshViolation> validate_mesh(const SimplicialMesh& mesh,
                                                double vol_tol = kDefaultVolumeTolerance)
{
    std::vector<MeshViolation> out;
    const int d = mesh.intrinsic_dim();
    const int n = mesh.num_vertices();
    const int m = mesh.num_simplices();

    if (d < 1 || d > mesh.ambient_dim()) {
        out.push_back({MeshRule::DimensionMismatch, -1, {},
                       "intrinsic dimension " + std::to_string(d) + " not in [1, "
                           + std::to_string(mesh.ambient_dim()) + "]"});
        return out;
    }
    if (m == 0) {
        out.push_back({MeshRule::Disconnected, -1, {}, "mesh has no simplices"});
        return out;
    }

    bool structural_ok = true;
    for (int s = 0; s < m; ++s) {
        std::vector<int> row;
        for (int k = 0; k <= d; ++k)
            row.push_back(mesh.simplices(s, k));
        for (int v : row) {
            if (v < 0 || v >= n) {
                out.push_back({MeshRule::IndexOutOfRange, s, {},
                               "simplex " + std::to_string(s) + " references vertex " + std::to_string(v)
                                   + " outside [0, " + std::to_string(n) + ")"});
                structural_ok = false;
                break;
            }
        }
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            out.push_back({MeshRule::RepeatedVertex, s, {},
                           "simplex " + std::to_string(s) + " repeats a vertex"});
            structural_ok = false;
        }
    }
    if (!structural_ok)
        return out;

    const FaceTable faces(mesh.simplices);
    detail::DisjointSets components(m);
    for (int f = 0; f < faces.size(); ++f) {
        const auto cof = faces.coface_simplices(f);
        if (cof.size() > 2) {
            const auto key = faces.face(f);
            out.push_back({MeshRule::FaceOvershared, cof[0], {key.begin(), key.end()},
                           "face " + detail::join_indices(key) + " shared by " + std::to_string(cof.size())
                               + " simplices"});
        }
        for (std::size_t i = 1; i < cof.size(); ++i)
            components.unite(cof[0], cof[i]);
    }
    for (int s = 1; s < m; ++s) {
        if (components.find(s) != 0) {
            out.push_back({MeshRule::Disconnected, s, {},
                           "simplex " + std::to_string(s) + " is not face-connected to simplex 0"});
            break;
        }
    }

    const double diam = bounding_box_diameter(mesh.vertices);
    const double threshold = vol_tol * std::pow(diam, d);
    for (int s = 0; s < m; ++s) {
        const double vol = simplex_volume(simplex_corners(mesh, s));
        if (!(vol >= threshold) || vol == 0.0) {
            out.push_back({MeshRule::Degenerate, s, {},
                           "simplex " + std::to_string(s) + " is degenerate (volume " + std::to_string(vol) + ")"});
        }
    }
    return out;
}

/// Throws MeshError describing the first violation, if any.
inline void require_valid(const SimplicialMesh& mesh, double vol_tol = kDefaultVolumeTolerance)
{
    const auto violations = validate_mesh(mesh, vol_tol);
    if (!violations.empty()) {
        std::string what = "invalid mesh: " + violations.front().message;
        if (violations.size() > 1)
            what += " (+" + std::to_string(violations.size() - 1) + " more)";
        throw MeshError(what);
    }
}

// ---------------------------------------------------------------------------
// Orientation

namespace detail {

inline int permutation_parity(std::span<const int> seq)
{
    int inversions = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (seq[i] > seq[j])
                ++inversions;
    return (inversions % 2 == 0) ? 1 : -1;
}

// Orientation induced on the face opposite `local` relative to its sorted key.
inline int induced_face_sign(const Eigen::MatrixXi& simplices, int s, int local)
{
    std::vector<int> seq;
    for (int j = 0; j < simplices.cols(); ++j)
        if (j != local)
            seq.push_back(simplices(s, j));
    return ((local % 2 == 0) ? 1 : -1) * permutation_parity(seq);
}

} // namespace detail

/// Reorder simplex vertices so neighbouring simplices induce opposite orientations
/// on every shared face. Each face-connected component keeps the vertex order
/// of its lowest-index simplex. Throws MeshError if no consistent orientation exists.
inline Eigen::MatrixXi orient_simplices(const SimplicialMesh& mesh)
{
    Eigen::MatrixXi out = mesh.simplices;
    const int m = mesh.num_simplices();
    if (m == 0 || mesh.intrinsic_dim() < 1)
        return out;

    const FaceTable faces(mesh.simplices);
    // Adjacency through manifold faces: (neighbour, face, my local, their local).
    struct Link { int other, my_local, other_local; };
    std::vector<std::vector<Link>> links(static_cast<std::size_t>(m));
    for (int f = 0; f < faces.size(); ++f) {
        if (faces.coface_count(f) != 2)
            continue;
        const auto cs = faces.coface_simplices(f);
        const auto cl = faces.coface_locals(f);
        links[cs[0]].push_back({cs[1], cl[0], cl[1]});
        links[cs[1]].push_back({cs[0], cl[1], cl[0]});
    }

    std::vector<int> flip(static_cast<std::size_t>(m), 0); // 0 unvisited, +1 keep, -1 flipped
    std::vector<int> queue;
    for (int root = 0; root < m; ++root) {
        if (flip[root] != 0)
            continue;
        flip[root] = 1;
        queue.assign(1, root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int s = queue[head];
            for (const Link& link : links[s]) {
                const int mine = flip[s] * detail::induced_face_sign(mesh.simplices, s, link.my_local);
                const int theirs_raw = detail::induced_face_sign(mesh.simplices, link.other, link.other_local);
                const int wanted = (theirs_raw == -mine) ? 1 : -1;
                if (flip[link.other] == 0) {
                    flip[link.other] = wanted;
                    queue.push_back(link.other);
                } else if (flip[link.other] != wanted) {
                    throw MeshError("mesh is not orientable: conflict between simplices " + std::to_string(s)
                                    + " and " + std::to_string(link.other));
                }
            }
        }
    }
    for (int s = 0; s < m; ++s)
        if (flip[s] < 0)
            std::swap(out(s, 0), out(s, 1));
    return out;
}

// ---------------------------------------------------------------------------
// Boundary

struct BoundaryComplex
{
    /// (d-1)-faces contained in exactly one d-simplex, as sorted index tuples.
    std::vector<std::vector<int>> faces;
    /// Sorted, deduplicated vertices of `faces`.
    std::vector<int> vertices;
    /// d = 2 only: each closed boundary loop, in the direction induced by the
    /// consistently oriented triangles (interior on the left when the
    /// orientation is counterclockwise). Loops start at their smallest vertex.
    std::vector<std::vector<int>> cycles;

    bool empty() const { return faces.empty(); }
};

inline BoundaryComplex detect_boundary(const SimplicialMesh& mesh)
{
    BoundaryComplex out;
    const int d = mesh.intrinsic_dim();
    if (d < 1)
        return out;
    const FaceTable faces(mesh.simplices);
    std::vector<int> boundary_face_ids;
    for (int f = 0; f < faces.size(); ++f) {
        if (faces.coface_count(f) == 1) {
            const auto key = faces.face(f);
            out.faces.emplace_back(key.begin(), key.end());
            out.vertices.insert(out.vertices.end(), key.begin(), key.end());
            boundary_face_ids.push_back(f);
        }
    }
    std::sort(out.vertices.begin(), out.vertices.end());
    out.vertices.erase(std::unique(out.vertices.begin(), out.vertices.end()), out.vertices.end());

    if (d != 2 || out.faces.empty())
        return out;

    // Undirected boundary adjacency plus the directed edges induced by orientation.
    const int n = mesh.num_vertices();
    std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(n));
    for (const auto& e : out.faces) {
        adjacent[e[0]].push_back(e[1]);
        adjacent[e[1]].push_back(e[0]);
    }
    for (int v : out.vertices) {
        if (adjacent[v].size() != 2) {
            throw MeshError("non-manifold boundary: vertex " + std::to_string(v) + " has "
                            + std::to_string(adjacent[v].size()) + " incident boundary edges");
        }
    }

    Eigen::MatrixXi oriented;
    try {
        oriented = orient_simplices(mesh);
    } catch (const MeshError&) {
        oriented = mesh.simplices;
    }
    std::vector<int> successor(static_cast<std::size_t>(n), -1);
    for (int f : boundary_face_ids) {
        const int s = faces.coface_simplices(f)[0];
        const int local = faces.coface_locals(f)[0];
        const int a = oriented(s, (local + 1) % 3);
        const int b = oriented(s, (local + 2) % 3);
        successor[a] = b;
    }

    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    for (int start : out.vertices) {
        if (visited[start])
            continue;
        std::vector<int> loop{start};
        visited[start] = 1;
        int next = successor[start];
        if (next < 0 || (next != adjacent[start][0] && next != adjacent[start][1]))
            next = std::min(adjacent[start][0], adjacent[start][1]);
        int prev = start;
        int cur = next;
        while (cur != start) {
            if (visited[cur])
                throw MeshError("boundary walk revisited vertex " + std::to_string(cur));
            visited[cur] = 1;
            loop.push_back(cur);
            const int nxt = adjacent[cur][0] == prev ? adjacent[cur][1] : adjacent[cur][0];
            prev = cur;
            cur = nxt;
        }
        out.cycles.push_back(std::move(loop));
    }
    return out;
}

/// Interior (d-1)-faces whose vertices all lie on the boundary (dividing edges for d = 2).
inline std::vector<std::vector<int>> detect_dividing_simplices(const SimplicialMesh& mesh,
                                                               const BoundaryComplex& boundary)
{
    std::vector<std::vector<int>> out;
    if (boundary.vertices.empty())
        return out;
    std::vector<char> on_boundary(static_cast<std::size_t>(mesh.num_vertices()), 0);
    for (int v : boundary.vertices)
        on_boundary[v] = 1;
    const FaceTable faces(mesh.simplices);
    for (int f = 0; f < faces.size(); ++f) {
        if (faces.coface_count(f) != 2)
            continue;
        const auto key = faces.face(f);
        if (std::all_of(key.begin(), key.end(), [&](int v) { return on_boundary[v] != 0; }))
            out.emplace_back(key.begin(), key.end());
    }
    return out;
}

inline bool is_strongly_connected(const SimplicialMesh& mesh)
{
    return detect_dividing_simplices(mesh, detect_boundary(mesh)).empty();
}

// ---------------------------------------------------------------------------
// 1-skeleton, tessellation, refinement

/// Unique undirected edges (i < j) of every simplex, sorted.
inline std::vector<std::pair<int, int>> skeleton_edges(const SimplicialMesh& mesh)
{
    std::vector<std::pair<int, int>> edges;
    const int width = static_cast<int>(mesh.simplices.cols());
    edges.reserve(static_cast<std::size_t>(mesh.num_simplices()) * width * (width - 1) / 2);
    for (int s = 0; s < mesh.num_simplices(); ++s)
        for (int a = 0; a < width; ++a)
            for (int b = a + 1; b < width; ++b) {
                const int i = mesh.simplices(s, a), j = mesh.simplices(s, b);
                edges.emplace_back(std::min(i, j), std::max(i, j));
            }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

/// Fan-triangulate polygon faces from each face's lowest-index vertex.
inline SimplicialMesh triangulate_polygon_faces(const std::vector<std::vector<int>>& faces,
                                                const Eigen::MatrixXd& vertices)
{
    std::vector<std::array<int, 3>> tris;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& poly = faces[f];
        if (poly.size() < 3)
            throw MeshError("face " + std::to_string(f) + " has fewer than 3 vertices");
        std::vector<int> sorted = poly;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MeshError("face " + std::to_string(f) + " repeats a vertex");
        const auto lowest = std::min_element(poly.begin(), poly.end()) - poly.begin();
        const std::size_t n = poly.size();
        for (std::size_t k = 1; k + 1 < n; ++k) {
            tris.push_back({poly[lowest], poly[(lowest + k) % n], poly[(lowest + k + 1) % n]});
        }
    }
    SimplicialMesh mesh;
    mesh.vertices = vertices;
    mesh.simplices.resize(static_cast<Eigen::Index>(tris.size()), 3);
    for (std::size_t t = 0; t < tris.size(); ++t)
        for (int k = 0; k < 3; ++k)
            mesh.simplices(static_cast<Eigen::Index>(t), k) = tris[t][k];
    return mesh;
}

/// Drop vertices no simplex references and renumber the rest in their original order.
inline SimplicialMesh remove_unused_vertices(const SimplicialMesh& mesh, std::vector<int>* old_to_new = nullptr)
{
    std::vector<int> remap(static_cast<std::size_t>(mesh.num_vertices()), -1);
    for (int s = 0; s < mesh.num_simplices(); ++s)
        for (int k = 0; k < mesh.simplices.cols(); ++k)
            remap[mesh.simplices(s, k)] = 0;
    int next = 0;
    for (int& r : remap)
        if (r == 0)
            r = next++;
    SimplicialMesh out;
    out.vertices.resize(next, mesh.vertices.cols());
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (remap[v] >= 0)
            out.vertices.row(remap[v]) = mesh.vertices.row(v);
    out.simplices = mesh.simplices;
    for (int s = 0; s < out.num_simplices(); ++s)
        for (int k = 0; k < out.simplices.cols(); ++k)
            out.simplices(s, k) = remap[out.simplices(s, k)];
    if (old_to_new)
        *old_to_new = std::move(remap);
    return out;
}

/// Remove every dividing face by inserting a vertex at its centroid and
/// splitting the two simplices that share it. The inserted vertices are
/// interior, so no new dividing face is created. Requires d >= 2.
inline SimplicialMesh split_dividing_faces(SimplicialMesh mesh)
{
    const int d = mesh.intrinsic_dim();
    if (d < 2)
        throw ConfigError("split_dividing_faces requires intrinsic dimension >= 2");
    for (;;) {
        const auto dividing = detect_dividing_simplices(mesh, detect_boundary(mesh));
        if (dividing.empty())
            return mesh;

        const FaceTable faces(mesh.simplices);
        // Locate each dividing face in the table; faces are sorted lexicographically.
        std::vector<char> touched(static_cast<std::size_t>(mesh.num_simplices()), 0);
        std::vector<char> removed(static_cast<std::size_t>(mesh.num_simplices()), 0);
        std::vector<std::vector<int>> added;
        std::vector<Eigen::RowVectorXd> new_points;
        int f = 0;
        for (const auto& target : dividing) {
            while (f < faces.size() && !std::equal(target.begin(), target.end(), faces.face(f).begin()))
                ++f;
            const auto cs = faces.coface_simplices(f);
            const auto cl = faces.coface_locals(f);
            if (touched[cs[0]] || touched[cs[1]])
                continue;
            touched[cs[0]] = touched[cs[1]] = 1;
            removed[cs[0]] = removed[cs[1]] = 1;

            Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(mesh.vertices.cols());
            for (int v : target)
                centroid += mesh.vertices.row(v);
            centroid /= static_cast<double>(target.size());
            const int mid = mesh.num_vertices() + static_cast<int>(new_points.size());
            new_points.push_back(centroid);

            // Each side simplex (face + apex) becomes d simplices (mid replaces one face vertex).
            for (int side = 0; side < 2; ++side) {
                const int s = cs[side];
                const int apex_local = cl[side];
                for (int k = 0; k <= d; ++k) {
                    if (k == apex_local)
                        continue;
                    std::vector<int> simplex;
                    for (int j = 0; j <= d; ++j)
                        simplex.push_back(j == k ? mid : mesh.simplices(s, j));
                    added.push_back(std::move(simplex));
                }
            }
        }

        SimplicialMesh next;
        next.vertices.resize(mesh.num_vertices() + static_cast<int>(new_points.size()), mesh.vertices.cols());
        next.vertices.topRows(mesh.num_vertices()) = mesh.vertices;
        for (std::size_t i = 0; i < new_points.size(); ++i)
            next.vertices.row(mesh.num_vertices() + static_cast<Eigen::Index>(i)) = new_points[i];
        int kept = 0;
        for (int s = 0; s < mesh.num_simplices(); ++s)
            kept += removed[s] ? 0 : 1;
        next.simplices.resize(kept + static_cast<int>(added.size()), d + 1);
        int row = 0;
        for (int s = 0; s < mesh.num_simplices(); ++s)
            if (!removed[s])
                next.simplices.row(row++) = mesh.simplices.row(s);
        for (const auto& simplex : added) {
            for (int k = 0; k <= d; ++k)
                next.simplices(row, k) = simplex[k];
            ++row;
        }
        mesh = std::move(next);
    }
}

} // namespace fplm
