// fplm: generate meshes, embed them, audit embeddings and render them.
//
// Exit codes: 0 success / certified, 2 usage or input error, 3 validity
// violation, 4 solver failure.

#include "fplm/all.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;
constexpr int kExitSolver = 4;

class Stopwatch
{
public:
    double lap_ms()
    {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// "out/mesh.json" + ".latent.csv" -> "out/mesh.latent.csv"
fs::path sibling(const fs::path& path, const std::string& suffix)
{
    fs::path out = path;
    out.replace_extension();
    out += suffix;
    return out;
}

int resolve_threads(int flag)
{
    if (flag > 0)
        return flag;
    if (const char* env = std::getenv("FPLM_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0)
                return v;
        } catch (const std::exception&) {
        }
        throw fplm::ConfigError(std::string("FPLM_THREADS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

json solve_config_json(const fplm::SolveConfig& c)
{
    return {{"method", fplm::to_string(c.method)},
            {"rel_tol", c.rel_tol},
            {"max_iter", c.max_iter ? json(*c.max_iter) : json("10*unknowns")},
            {"auto_threshold", c.auto_threshold},
            {"threads", c.threads}};
}

json fixed_json(const fplm::FixedPointSet& f)
{
    return {{"kind", fplm::to_string(f.kind)}, {"indices", f.indices}};
}

// ---------------------------------------------------------------------------

struct GenerateArgs
{
    std::string kind;
    std::string resolution;
    std::uint64_t seed = 0;
    std::string triangulation;
    std::string out;
    std::string latent;
    std::string manifest;
};

int cmd_generate(const GenerateArgs& a)
{
    Stopwatch clock;
    fplm::GeneratorSpec spec;
    spec.kind = fplm::parse_generator_kind(a.kind);
    const fplm::Triangulation tri =
        a.triangulation.empty() ? fplm::default_triangulation(spec.kind) : fplm::parse_triangulation(a.triangulation);
    spec.triangulation = tri;
    spec.resolution =
        a.resolution.empty() ? fplm::default_resolution(spec.kind, tri) : fplm::parse_resolution(a.resolution);
    spec.seed = a.seed;

    const fplm::GeneratedMesh gen = fplm::generate(spec);
    const double t_generate = clock.lap_ms();

    const fs::path out = a.out;
    const fs::path latent = a.latent.empty() ? sibling(out, ".latent.csv") : fs::path(a.latent);
    const fs::path manifest = a.manifest.empty() ? sibling(out, ".manifest.json") : fs::path(a.manifest);
    fplm::io::write_file(out, fplm::io::write_mesh_json(gen.mesh));
    fplm::io::write_file(latent, fplm::io::write_coordinates_csv(gen.latent, "u"));
    const double t_write = clock.lap_ms();

    const auto boundary = fplm::detect_boundary(gen.mesh);
    const auto dividing = fplm::detect_dividing_simplices(gen.mesh, boundary);
    std::vector<int> res = spec.resolution;
    json m = {{"command", "generate"},
              {"version", fplm::kVersion},
              {"config",
               {{"kind", fplm::to_string(spec.kind)},
                {"resolution", res},
                {"seed", spec.seed},
                {"triangulation", fplm::to_string(tri)}}},
              {"result",
               {{"num_vertices", gen.mesh.num_vertices()},
                {"num_simplices", gen.mesh.num_simplices()},
                {"intrinsic_dim", gen.mesh.intrinsic_dim()},
                {"ambient_dim", gen.mesh.ambient_dim()},
                {"boundary_vertices", boundary.vertices.size()},
                {"dividing_faces", dividing.size()}}},
              {"timings_ms", {{"generate", t_generate}, {"write", t_write}}},
              {"outputs", {out.string(), latent.string(), manifest.string()}}};
    fplm::io::write_file(manifest, m.dump(2) + "\n");

    std::cout << fplm::to_string(spec.kind) << ": " << gen.mesh.num_vertices() << " vertices, "
              << gen.mesh.num_simplices() << " simplices (d = " << gen.mesh.intrinsic_dim() << "), "
              << boundary.vertices.size() << " boundary vertices, " << dividing.size() << " dividing faces\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EmbedArgs
{
    std::string mesh;
    double gamma = fplm::kDefaultGamma;
    std::string seed_strategy = "most-interior";
    std::uint64_t seed = 0;
    std::string solver = "auto";
    double rel_tol = 1e-10;
    long max_iter = 0;
    int threads = 0;
    bool clockwise = false;
    std::string out;
    std::string manifest;
};

int cmd_embed(const EmbedArgs& a)
{
    Stopwatch clock;
    fplm::FplmOptions options;
    options.gamma = a.gamma;
    options.seed = fplm::parse_seed_strategy(a.seed_strategy, a.seed);
    options.solver.method = fplm::parse_solve_method(a.solver);
    options.solver.rel_tol = a.rel_tol;
    if (a.max_iter > 0)
        options.solver.max_iter = a.max_iter;
    options.solver.threads = resolve_threads(a.threads);
    options.counterclockwise = !a.clockwise;
    options.solver.validate();

    const fplm::SimplicialMesh mesh = fplm::io::load_mesh(a.mesh);
    const double t_load = clock.lap_ms();
    const fplm::Embedding emb = fplm::run_fplm(mesh, options);
    const double t_fplm = clock.lap_ms();

    const fs::path out = a.out;
    const fs::path manifest = a.manifest.empty() ? sibling(out, ".embed.json") : fs::path(a.manifest);
    fplm::io::write_file(out, fplm::io::write_embedding_csv(emb.coords));
    const double t_write = clock.lap_ms();

    const fplm::WeightedGraph graph = fplm::build_weights(mesh, options.gamma);
    const auto free = emb.final_free();
    const double convex_residual = fplm::max_convex_combination_residual(graph, free, emb.coords);
    const double foc_residual = fplm::max_first_order_residual(graph, free, emb.coords);

    json solves = json::array();
    for (const auto& r : emb.solves)
        solves.push_back({{"method", fplm::to_string(r.method)},
                          {"iterations", r.iterations},
                          {"relative_residual", r.relative_residual}});
    json result = {{"rounds_run", emb.rounds_run},
                   {"branch", fplm::to_string(emb.branch)},
                   {"seed_simplex", emb.seed_simplex},
                   {"num_vertices", mesh.num_vertices()},
                   {"num_simplices", mesh.num_simplices()},
                   {"intrinsic_dim", mesh.intrinsic_dim()},
                   {"fixed_round1", fixed_json(emb.fixed_round1)},
                   {"fixed_round2", emb.fixed_round2 ? fixed_json(*emb.fixed_round2) : json(nullptr)},
                   {"fixed_final", fixed_json(emb.final_fixed())},
                   {"max_convex_residual", convex_residual},
                   {"max_first_order_residual", foc_residual},
                   {"solves", solves}};
    json m = {{"command", "embed"},
              {"version", fplm::kVersion},
              {"config",
               {{"mesh", a.mesh},
                {"gamma", options.gamma},
                {"seed_strategy", fplm::to_string(options.seed)},
                {"seed", a.seed},
                {"solver", solve_config_json(options.solver)},
                {"polygon_orientation", options.counterclockwise ? "counterclockwise" : "clockwise"},
                {"vol_tol", options.vol_tol}}},
              {"result", result},
              {"timings_ms", {{"load", t_load}, {"fplm", t_fplm}, {"write", t_write}}},
              {"outputs", {out.string(), manifest.string()}}};
    fplm::io::write_file(manifest, m.dump(2) + "\n");

    std::cout << "branch: " << fplm::to_string(emb.branch) << "\n"
              << "rounds_run: " << emb.rounds_run << "\n"
              << "max_convex_residual: " << convex_residual << "\n"
              << "max_first_order_residual: " << foc_residual << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ValidateArgs
{
    std::string mesh;
    std::string embedding;
    std::string partition;
    std::string out;
    double orientation_tol = fplm::kDefaultOrientationTolerance;
};

int cmd_validate(const ValidateArgs& a)
{
    const fplm::SimplicialMesh mesh = fplm::io::load_mesh(a.mesh);
    const Eigen::MatrixXd coords = fplm::io::parse_embedding_csv(fplm::io::read_file(a.embedding), a.embedding);

    std::optional<fplm::AuditPartition> partition;
    if (!a.partition.empty()) {
        const json m = json::parse(fplm::io::read_file(a.partition));
        fplm::AuditPartition p;
        p.graph = fplm::build_weights(mesh, m.at("config").at("gamma").get<double>());
        const json& fixed = m.at("result").at("fixed_final");
        p.fixed.indices = fixed.at("indices").get<std::vector<int>>();
        p.fixed.kind = fplm::parse_fixed_kind(fixed.at("kind").get<std::string>());
        p.fixed.targets.resize(static_cast<Eigen::Index>(p.fixed.indices.size()), coords.cols());
        for (std::size_t k = 0; k < p.fixed.indices.size(); ++k) {
            const int v = p.fixed.indices[k];
            if (v < 0 || v >= coords.rows())
                throw fplm::ConfigError("partition references vertex " + std::to_string(v) + " outside the embedding");
            p.fixed.targets.row(static_cast<Eigen::Index>(k)) = coords.row(v);
        }
        partition = std::move(p);
    }

    fplm::AuditOptions opts;
    opts.orientation_tol = a.orientation_tol;
    const fplm::ValidityReport report = fplm::audit(mesh, coords, partition, opts);
    std::cout << fplm::to_text(report);
    if (!a.out.empty()) {
        fplm::io::write_file(a.out, fplm::to_json(report).dump(2) + "\n");
        fplm::io::write_file(sibling(a.out, ".txt"), fplm::to_text(report));
    }
    return report.certified() ? kExitOk : kExitViolation;
}

// ---------------------------------------------------------------------------

struct RenderArgs
{
    std::string mesh;
    std::string embedding;
    std::string out;
    bool highlight_boundary = false;
    bool mark_crossings = false;
    double size = 800.0;
};

int cmd_render(const RenderArgs& a)
{
    const fplm::SimplicialMesh mesh = fplm::io::load_mesh(a.mesh);
    const Eigen::MatrixXd coords = fplm::io::parse_embedding_csv(fplm::io::read_file(a.embedding), a.embedding);
    fplm::io::SvgOptions opts;
    opts.highlight_boundary = a.highlight_boundary;
    opts.mark_crossings = a.mark_crossings;
    opts.size = a.size;
    fplm::io::write_file(a.out, fplm::io::render_svg(mesh, coords, opts));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fixed-point Laplacian mapping: injective embeddings of simplicial meshes"};
    app.set_version_flag("--version", std::string("fplm ") + fplm::kVersion);
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic manifold mesh (mesh-json + latent CSV)");
    generate->add_option("--kind", gen.kind,
                         "swiss-roll | paraboloid | monkey-saddle | twin-peaks | sphere | ball3 | grid-disk")
        ->required();
    generate->add_option("--resolution", gen.resolution, "NxM for surfaces, level for sphere, LEVELxSHELLS or cells for ball3");
    generate->add_option("--seed", gen.seed, "RNG seed for random latent sampling");
    generate->add_option("--triangulation", gen.triangulation, "grid | delaunay for surfaces, shells | cube for ball3");
    generate->add_option("--out", gen.out, "Output mesh-json path")->required();
    generate->add_option("--latent", gen.latent, "Latent CSV path (default <out>.latent.csv)");
    generate->add_option("--manifest", gen.manifest, "Manifest path (default <out>.manifest.json)");

    EmbedArgs emb;
    auto* embed = app.add_subcommand("embed", "Run two-round FPLM on a mesh");
    embed->add_option("--mesh", emb.mesh, "Mesh file (.json, .off, .node/.ele)")->required();
    embed->add_option("--gamma", emb.gamma, "RBF parameter")->capture_default_str();
    embed->add_option("--seed-strategy", emb.seed_strategy, "most-interior | random | index:K")->capture_default_str();
    embed->add_option("--seed", emb.seed, "RNG seed for --seed-strategy random");
    embed->add_option("--solver", emb.solver, "direct | iterative | auto")->capture_default_str();
    embed->add_option("--rel-tol", emb.rel_tol, "Relative residual tolerance")->capture_default_str();
    embed->add_option("--max-iter", emb.max_iter, "Iteration cap for the iterative solver (default 10*unknowns)");
    embed->add_option("--threads", emb.threads, "Worker thread cap (fallback: FPLM_THREADS, then 1)");
    embed->add_flag("--clockwise", emb.clockwise, "Place the regular-polygon boundary clockwise");
    embed->add_option("--out", emb.out, "Output embedding CSV")->required();
    embed->add_option("--manifest", emb.manifest, "Manifest path (default <out>.embed.json)");

    ValidateArgs val;
    auto* validate = app.add_subcommand("validate", "Certify an embedding (exit 0 injective, 3 violated)");
    validate->add_option("--mesh", val.mesh, "Mesh file")->required();
    validate->add_option("--embedding", val.embedding, "Embedding CSV")->required();
    validate->add_option("--partition", val.partition, "Embed manifest supplying gamma and the fixed set");
    validate->add_option("--out", val.out, "Report JSON path (text report written alongside as .txt)");
    validate->add_option("--orientation-tol", val.orientation_tol, "Near-zero volume tolerance")->capture_default_str();

    RenderArgs ren;
    auto* render = app.add_subcommand("render", "Render a 2D embedding as an SVG wireframe");
    render->add_option("--mesh", ren.mesh, "Mesh file")->required();
    render->add_option("--embedding", ren.embedding, "Embedding CSV")->required();
    render->add_option("--out", ren.out, "Output SVG path")->required();
    render->add_flag("--highlight-boundary", ren.highlight_boundary, "Draw boundary edges in a separate style");
    render->add_flag("--mark-crossings", ren.mark_crossings, "Circle every edge crossing");
    render->add_option("--size", ren.size, "Canvas size in pixels")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        if (active == generate)
            return cmd_generate(gen);
        if (active == embed)
            return cmd_embed(emb);
        if (active == validate)
            return cmd_validate(val);
        if (active == render)
            return cmd_render(ren);
    } catch (const fplm::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const fplm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << active->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
