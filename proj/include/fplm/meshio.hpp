#pragma once

// Readers and writers for OFF, TetGen .node/.ele, mesh-json and coordinate CSV,
// plus a deterministic SVG wireframe renderer for 2D embeddings.

#include "fplm/errors.hpp"
#include "fplm/simplicial.hpp"
#include "fplm/validity.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace fplm::io {

// ---------------------------------------------------------------------------
// Number formatting and tokenising

/// Shortest round-trip decimal form of `v` ('.' separator, locale independent).
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int precision)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    std::string out(buf, res.ptr);
    // No negative zero in output.
    if (out[0] == '-' && out.find_first_not_of("-0.") == std::string::npos)
        out.erase(0, 1);
    return out;
}

namespace detail {

inline bool parse_double(std::string_view tok, double& out)
{
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

inline bool parse_long(std::string_view tok, long& out)
{
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

/// Lines split into whitespace tokens, skipping blank lines and '#' comments.
class LineReader
{
public:
    LineReader(std::string_view text, std::string source)
        : text_(text)
        , source_(std::move(source))
    {}

    /// Next non-empty line's tokens; false at end of input.
    bool next(std::vector<std::string_view>& tokens)
    {
        while (pos_ < text_.size()) {
            std::size_t end = text_.find('\n', pos_);
            if (end == std::string_view::npos)
                end = text_.size();
            std::string_view line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            tokens.clear();
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && is_space(line[i]))
                    ++i;
                std::size_t j = i;
                while (j < line.size() && !is_space(line[j]))
                    ++j;
                if (j > i)
                    tokens.push_back(line.substr(i, j - i));
                i = j;
            }
            if (!tokens.empty())
                return true;
        }
        ++line_;
        return false;
    }

    long line() const { return line_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

    std::string_view text_;
    std::string source_;
    std::size_t pos_ = 0;
    long line_ = 0;
};

} // namespace detail

// ---------------------------------------------------------------------------
// OFF

/// Parse ASCII OFF; polygon faces are fan-triangulated. Ambient dimension 3, d = 2.
inline SimplicialMesh parse_off(std::string_view text, const std::string& source = "<off>")
{
    detail::LineReader in(text, source);
    std::vector<std::string_view> tok;
    if (!in.next(tok))
        in.fail("empty input; expected OFF header");
    if (tok[0] != "OFF")
        in.fail("expected 'OFF' header, found '" + std::string(tok[0]) + "'");
    std::vector<std::string_view> counts(tok.begin() + 1, tok.end());
    if (counts.empty()) {
        if (!in.next(tok))
            in.fail("missing counts line");
        counts = tok;
    }
    long nv = 0, nf = 0;
    if (counts.size() < 2 || !detail::parse_long(counts[0], nv) || !detail::parse_long(counts[1], nf) || nv < 0
        || nf < 0)
        in.fail("malformed counts line; expected 'V F E'");

    Eigen::MatrixXd vertices(nv, 3);
    for (long v = 0; v < nv; ++v) {
        if (!in.next(tok))
            in.fail("expected " + std::to_string(nv) + " vertices, found " + std::to_string(v));
        if (tok.size() < 3)
            in.fail("vertex line needs 3 coordinates");
        for (int c = 0; c < 3; ++c)
            if (!detail::parse_double(tok[c], vertices(v, c)))
                in.fail("bad coordinate '" + std::string(tok[c]) + "'");
    }
    std::vector<std::vector<int>> faces;
    faces.reserve(static_cast<std::size_t>(nf));
    for (long f = 0; f < nf; ++f) {
        if (!in.next(tok))
            in.fail("expected " + std::to_string(nf) + " faces, found " + std::to_string(f));
        long n = 0;
        if (!detail::parse_long(tok[0], n) || n < 3)
            in.fail("face needs a vertex count of at least 3");
        if (static_cast<long>(tok.size()) < n + 1)
            in.fail("face lists fewer than " + std::to_string(n) + " indices");
        std::vector<int> face;
        for (long k = 1; k <= n; ++k) {
            long idx = 0;
            if (!detail::parse_long(tok[k], idx))
                in.fail("bad vertex index '" + std::string(tok[k]) + "'");
            if (idx < 0 || idx >= nv)
                in.fail("vertex index " + std::to_string(idx) + " out of range [0, " + std::to_string(nv) + ")");
            face.push_back(static_cast<int>(idx));
        }
        std::vector<int> sorted = face;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            in.fail("face repeats a vertex");
        faces.push_back(std::move(face));
    }
    return triangulate_polygon_faces(faces, vertices);
}

/// OFF text for a triangle mesh in 3D (lower ambient dimensions are zero-padded).
inline std::string write_off(const SimplicialMesh& mesh)
{
    if (mesh.intrinsic_dim() != 2 || mesh.ambient_dim() > 3)
        throw ConfigError("OFF holds triangle meshes with ambient dimension <= 3");
    std::string out = "OFF\n" + std::to_string(mesh.num_vertices()) + " " + std::to_string(mesh.num_simplices())
                    + " 0\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        for (int c = 0; c < 3; ++c) {
            out += c < mesh.ambient_dim() ? format_double(mesh.vertices(v, c)) : "0";
            out += c < 2 ? " " : "\n";
        }
    }
    for (int s = 0; s < mesh.num_simplices(); ++s)
        out += "3 " + std::to_string(mesh.simplices(s, 0)) + " " + std::to_string(mesh.simplices(s, 1)) + " "
             + std::to_string(mesh.simplices(s, 2)) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// TetGen

/// Parse TetGen .node and .ele text. The index base (0 or 1) comes from the
/// first node index and is applied to every element reference.
inline SimplicialMesh parse_tetgen(std::string_view node_text, std::string_view ele_text,
                                   const std::string& node_source = "<node>",
                                   const std::string& ele_source = "<ele>")
{
    detail::LineReader nodes(node_text, node_source);
    std::vector<std::string_view> tok;
    long count = 0, dim = 0, attrs = 0, markers = 0;
    if (!nodes.next(tok))
        nodes.fail("empty .node file");
    if (tok.size() < 2 || !detail::parse_long(tok[0], count) || !detail::parse_long(tok[1], dim) || count < 0)
        nodes.fail("malformed .node header");
    if (tok.size() > 2 && !detail::parse_long(tok[2], attrs))
        nodes.fail("malformed attribute count");
    if (tok.size() > 3 && !detail::parse_long(tok[3], markers))
        nodes.fail("malformed boundary-marker flag");
    if (dim != 3)
        nodes.fail("dimension must be 3, got " + std::to_string(dim));

    SimplicialMesh mesh;
    mesh.vertices.resize(count, 3);
    long base = 0;
    for (long k = 0; k < count; ++k) {
        if (!nodes.next(tok))
            nodes.fail("expected " + std::to_string(count) + " nodes, found " + std::to_string(k));
        if (tok.size() < 4)
            nodes.fail("node line needs an index and 3 coordinates");
        long idx = 0;
        if (!detail::parse_long(tok[0], idx))
            nodes.fail("bad node index '" + std::string(tok[0]) + "'");
        if (k == 0) {
            if (idx != 0 && idx != 1)
                nodes.fail("first node index must be 0 or 1, got " + std::to_string(idx));
            base = idx;
        }
        if (idx != base + k)
            nodes.fail("node index " + std::to_string(idx) + " out of sequence (expected "
                       + std::to_string(base + k) + ")");
        for (int c = 0; c < 3; ++c)
            if (!detail::parse_double(tok[c + 1], mesh.vertices(k, c)))
                nodes.fail("bad coordinate '" + std::string(tok[c + 1]) + "'");
    }

    detail::LineReader eles(ele_text, ele_source);
    long tets = 0, per = 0;
    if (!eles.next(tok))
        eles.fail("empty .ele file");
    if (tok.size() < 2 || !detail::parse_long(tok[0], tets) || !detail::parse_long(tok[1], per) || tets < 0)
        eles.fail("malformed .ele header");
    if (per != 4)
        eles.fail("nodes per tetrahedron must be 4, got " + std::to_string(per));
    mesh.simplices.resize(tets, 4);
    for (long t = 0; t < tets; ++t) {
        if (!eles.next(tok))
            eles.fail("expected " + std::to_string(tets) + " tetrahedra, found " + std::to_string(t));
        if (tok.size() < 5)
            eles.fail("element line needs an index and 4 node references");
        for (int c = 0; c < 4; ++c) {
            long ref = 0;
            if (!detail::parse_long(tok[c + 1], ref))
                eles.fail("bad node reference '" + std::string(tok[c + 1]) + "'");
            if (ref - base < 0 || ref - base >= count)
                eles.fail("dangling node reference " + std::to_string(ref) + " (" + std::to_string(count)
                          + " nodes, base " + std::to_string(base) + ")");
            mesh.simplices(t, c) = static_cast<int>(ref - base);
        }
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// mesh-json

inline nlohmann::json mesh_to_json(const SimplicialMesh& mesh)
{
    nlohmann::json j;
    j["ambient_dim"] = mesh.ambient_dim();
    j["intrinsic_dim"] = mesh.intrinsic_dim();
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < mesh.ambient_dim(); ++c)
            row.push_back(mesh.vertices(v, c));
        verts.push_back(std::move(row));
    }
    auto& simp = j["simplices"] = nlohmann::json::array();
    for (int s = 0; s < mesh.num_simplices(); ++s) {
        auto row = nlohmann::json::array();
        for (int c = 0; c <= mesh.intrinsic_dim(); ++c)
            row.push_back(mesh.simplices(s, c));
        simp.push_back(std::move(row));
    }
    return j;
}

inline std::string write_mesh_json(const SimplicialMesh& mesh)
{
    return mesh_to_json(mesh).dump() + "\n";
}

inline SimplicialMesh parse_mesh_json(std::string_view text, const std::string& source = "<mesh-json>")
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 0, std::string("invalid JSON: ") + e.what());
    }
    auto fail = [&](const std::string& what) -> void { throw ParseError(source, 0, what); };
    if (!j.is_object())
        fail("top-level value must be an object");
    for (const char* key : {"ambient_dim", "intrinsic_dim", "vertices", "simplices"})
        if (!j.contains(key))
            fail(std::string("missing key '") + key + "'");
    if (!j["ambient_dim"].is_number_integer() || !j["intrinsic_dim"].is_number_integer())
        fail("dimensions must be integers");
    const int l = j["ambient_dim"].get<int>();
    const int d = j["intrinsic_dim"].get<int>();
    if (l < 1 || d < 1)
        fail("dimensions must be positive");
    const auto& verts = j["vertices"];
    const auto& simp = j["simplices"];
    if (!verts.is_array() || !simp.is_array())
        fail("vertices and simplices must be arrays");
    SimplicialMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), l);
    for (std::size_t v = 0; v < verts.size(); ++v) {
        if (!verts[v].is_array() || static_cast<int>(verts[v].size()) != l)
            fail("vertex " + std::to_string(v) + " must have " + std::to_string(l) + " coordinates");
        for (int c = 0; c < l; ++c) {
            if (!verts[v][c].is_number())
                fail("vertex " + std::to_string(v) + " has a non-numeric coordinate");
            mesh.vertices(static_cast<Eigen::Index>(v), c) = verts[v][c].get<double>();
        }
    }
    mesh.simplices.resize(static_cast<Eigen::Index>(simp.size()), d + 1);
    for (std::size_t s = 0; s < simp.size(); ++s) {
        if (!simp[s].is_array() || static_cast<int>(simp[s].size()) != d + 1)
            fail("simplex " + std::to_string(s) + " must have " + std::to_string(d + 1) + " indices");
        for (int c = 0; c <= d; ++c) {
            if (!simp[s][c].is_number_integer())
                fail("simplex " + std::to_string(s) + " has a non-integer index");
            const long idx = simp[s][c].get<long>();
            if (idx < 0 || idx >= static_cast<long>(verts.size()))
                fail("simplex " + std::to_string(s) + " references vertex " + std::to_string(idx)
                     + " out of range");
            mesh.simplices(static_cast<Eigen::Index>(s), c) = static_cast<int>(idx);
        }
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// Coordinate CSV

/// Header `id,<p>0,...,<p>{d-1}` then one row per vertex at full double precision.
inline std::string write_coordinates_csv(const Eigen::MatrixXd& coords, const std::string& prefix = "y")
{
    std::string out = "id";
    for (Eigen::Index c = 0; c < coords.cols(); ++c)
        out += "," + prefix + std::to_string(c);
    out += "\n";
    for (Eigen::Index v = 0; v < coords.rows(); ++v) {
        out += std::to_string(v);
        for (Eigen::Index c = 0; c < coords.cols(); ++c)
            out += "," + format_double(coords(v, c));
        out += "\n";
    }
    return out;
}

inline std::string write_embedding_csv(const Eigen::MatrixXd& coords)
{
    return write_coordinates_csv(coords, "y");
}

/// Parse coordinate CSV; rows must be numbered 0..N-1 in order.
inline Eigen::MatrixXd parse_embedding_csv(std::string_view text, const std::string& source = "<csv>")
{
    std::vector<std::vector<double>> rows;
    long line_no = 0;
    std::size_t pos = 0;
    std::size_t columns = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (!header_seen) {
            if (cells.empty() || cells[0] != "id" || cells.size() < 2)
                throw ParseError(source, line_no, "expected header 'id,y0,...'");
            columns = cells.size();
            header_seen = true;
            continue;
        }
        if (cells.size() != columns)
            throw ParseError(source, line_no, "expected " + std::to_string(columns) + " fields, found "
                                                  + std::to_string(cells.size()));
        long id = 0;
        if (!detail::parse_long(cells[0], id) || id != static_cast<long>(rows.size()))
            throw ParseError(source, line_no, "row id must be " + std::to_string(rows.size()));
        std::vector<double> row(columns - 1);
        for (std::size_t c = 1; c < columns; ++c)
            if (!detail::parse_double(cells[c], row[c - 1]))
                throw ParseError(source, line_no, "bad number '" + std::string(cells[c]) + "'");
        rows.push_back(std::move(row));
    }
    if (!header_seen)
        throw ParseError(source, line_no + 1, "empty CSV");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns - 1));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c + 1 < columns; ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return out;
}

// ---------------------------------------------------------------------------
// SVG

struct SvgOptions
{
    double size = 800.0;
    double margin = 20.0;
    double stroke_width = 0.6;
    bool highlight_boundary = false;
    bool mark_crossings = false;
};

/// Wireframe of a 2D embedding: one <line> per mesh edge in sorted edge order,
/// boundary edges styled separately when requested, and a <circle> at each
/// crossing when requested.
inline std::string render_svg(const SimplicialMesh& mesh, const Eigen::MatrixXd& coords, const SvgOptions& opt = {})
{
    if (coords.cols() != 2)
        throw ConfigError("SVG rendering requires 2D coordinates");
    if (coords.rows() != mesh.num_vertices())
        throw ConfigError("embedding row count differs from mesh vertex count");
    const auto edges = skeleton_edges(mesh);

    Eigen::RowVector2d lo(0.0, 0.0), hi(1.0, 1.0);
    if (coords.rows() > 0) {
        lo = coords.colwise().minCoeff();
        hi = coords.colwise().maxCoeff();
    }
    const double span = std::max((hi - lo).maxCoeff(), 1e-300);
    const double scale = (opt.size - 2.0 * opt.margin) / span;
    auto sx = [&](double x) { return format_fixed(opt.margin + (x - lo.x()) * scale, 3); };
    auto sy = [&](double y) { return format_fixed(opt.size - opt.margin - (y - lo.y()) * scale, 3); };

    std::vector<char> on_boundary;
    if (opt.highlight_boundary && mesh.intrinsic_dim() == 2) {
        const BoundaryComplex boundary = detect_boundary(mesh);
        on_boundary.assign(edges.size(), 0);
        for (const auto& f : boundary.faces) {
            const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{f[0], f[1]});
            if (it != edges.end() && *it == std::pair{f[0], f[1]})
                on_boundary[static_cast<std::size_t>(it - edges.begin())] = 1;
        }
    }

    std::string out;
    const std::string sz = format_fixed(opt.size, 0);
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + sz + "\" height=\"" + sz + "\" viewBox=\"0 0 "
         + sz + " " + sz + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<g stroke=\"#1f3b73\" stroke-width=\"" + format_double(opt.stroke_width) + "\" stroke-linecap=\"round\">\n";
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [i, j] = edges[k];
        out += "<line x1=\"" + sx(coords(i, 0)) + "\" y1=\"" + sy(coords(i, 1)) + "\" x2=\"" + sx(coords(j, 0))
             + "\" y2=\"" + sy(coords(j, 1)) + "\"";
        if (!on_boundary.empty() && on_boundary[k])
            out += " stroke=\"#c0392b\" stroke-width=\"" + format_double(2.0 * opt.stroke_width) + "\"";
        out += "/>\n";
    }
    out += "</g>\n";
    if (opt.mark_crossings) {
        const auto crossings = count_crossings(edges, coords);
        out += "<g fill=\"none\" stroke=\"#e67e22\" stroke-width=\"1.5\">\n";
        for (const auto& [a, b] : crossings.pairs) {
            // Marker at the midpoint of the closest approach; exact for proper crossings.
            const Eigen::Vector2d p0 = coords.row(edges[a].first).transpose();
            const Eigen::Vector2d p1 = coords.row(edges[a].second).transpose();
            const Eigen::Vector2d q0 = coords.row(edges[b].first).transpose();
            const Eigen::Vector2d q1 = coords.row(edges[b].second).transpose();
            const Eigen::Vector2d r = p1 - p0, s = q1 - q0;
            const double denom = r.x() * s.y() - r.y() * s.x();
            Eigen::Vector2d at = 0.25 * (p0 + p1 + q0 + q1);
            if (denom != 0.0) {
                const Eigen::Vector2d qp = q0 - p0;
                const double t = (qp.x() * s.y() - qp.y() * s.x()) / denom;
                at = p0 + std::clamp(t, 0.0, 1.0) * r;
            }
            out += "<circle cx=\"" + sx(at.x()) + "\" cy=\"" + sy(at.y()) + "\" r=\"4\"/>\n";
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

/// Load by extension: .json (mesh-json), .off, .node or .ele (TetGen pair with the sibling file).
inline SimplicialMesh load_mesh(const std::filesystem::path& path)
{
    const std::string ext = path.extension().string();
    if (ext == ".json")
        return parse_mesh_json(read_file(path), path.string());
    if (ext == ".off")
        return parse_off(read_file(path), path.string());
    if (ext == ".node" || ext == ".ele") {
        std::filesystem::path node = path, ele = path;
        node.replace_extension(".node");
        ele.replace_extension(".ele");
        return parse_tetgen(read_file(node), read_file(ele), node.string(), ele.string());
    }
    throw IoError("unrecognised mesh format '" + ext + "' (expected .json, .off, .node or .ele)");
}

} // namespace fplm::io
