#include "fplm/fplm.hpp"
#include "fplm/generators.hpp"
#include "fplm/validity.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <queue>

using oracle::make_mesh;

namespace {

fplm::SimplicialMesh hub_triangle()
{
    const double h = std::sqrt(3.0) / 2.0;
    return make_mesh({{0, 0}, {1, 0}, {0.5, h}, {0.5, h / 3.0}}, {{0, 1, 3}, {1, 2, 3}, {2, 0, 3}});
}

fplm::SimplicialMesh surface(fplm::GeneratorKind kind, int n = 12)
{
    fplm::GeneratorSpec spec;
    spec.kind = kind;
    spec.resolution = {n, n};
    return fplm::generate(spec).mesh;
}

std::vector<int> free_of(int n, const std::vector<int>& fixed)
{
    std::vector<char> f(static_cast<std::size_t>(n), 0);
    for (int v : fixed)
        f[v] = 1;
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (!f[v])
            out.push_back(v);
    return out;
}

} // namespace

TEST(RegularSimplex, CanonicalPlacements)
{
    const Eigen::MatrixXd s1 = fplm::regular_simplex(1);
    EXPECT_EQ(s1(0, 0), -1.0);
    EXPECT_EQ(s1(1, 0), 1.0);

    const Eigen::MatrixXd s2 = fplm::regular_simplex(2);
    const double deg = std::numbers::pi / 180.0;
    for (int k = 0; k < 3; ++k) {
        const double angle = (90.0 + 120.0 * k) * deg;
        EXPECT_NEAR(s2(k, 0), std::cos(angle), 1e-15);
        EXPECT_NEAR(s2(k, 1), std::sin(angle), 1e-15);
    }
}

TEST(RegularSimplex, UnitCircumradiusAndEqualEdges)
{
    for (int d = 1; d <= 6; ++d) {
        const Eigen::MatrixXd s = fplm::regular_simplex(d);
        ASSERT_EQ(s.rows(), d + 1);
        ASSERT_EQ(s.cols(), d);
        EXPECT_LE(s.colwise().mean().norm(), 1e-14) << d;
        const double edge = (s.row(0) - s.row(1)).norm();
        for (int i = 0; i <= d; ++i) {
            EXPECT_NEAR(s.row(i).norm(), 1.0, 1e-14) << d;
            for (int j = i + 1; j <= d; ++j)
                EXPECT_NEAR((s.row(i) - s.row(j)).norm(), edge, 1e-14) << d;
        }
    }
}

TEST(SelectSeed, IndexAndSingleTriangle)
{
    const auto grid = surface(fplm::GeneratorKind::GridDisk, 5);
    EXPECT_EQ(fplm::select_seed_simplex(grid, fplm::SeedStrategy::index(0)), 0);
    EXPECT_EQ(fplm::select_seed_simplex(grid, fplm::SeedStrategy::index(7)), 7);
    EXPECT_THROW(fplm::select_seed_simplex(grid, fplm::SeedStrategy::index(9999)), fplm::ConfigError);

    const auto tri = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    for (auto s : {fplm::SeedStrategy::index(0), fplm::SeedStrategy::random(42), fplm::SeedStrategy::most_interior()})
        EXPECT_EQ(fplm::select_seed_simplex(tri, s), 0);
}

TEST(SelectSeed, RandomIsReproducible)
{
    const auto grid = surface(fplm::GeneratorKind::GridDisk, 8);
    for (std::uint64_t seed : {0u, 1u, 99u})
        EXPECT_EQ(fplm::select_seed_simplex(grid, fplm::SeedStrategy::random(seed)),
                  fplm::select_seed_simplex(grid, fplm::SeedStrategy::random(seed)));
}

TEST(SelectSeed, MostInteriorMatchesBruteForceBfs)
{
    const auto m = surface(fplm::GeneratorKind::GridDisk, 4);
    // Independent BFS from every boundary vertex over an adjacency matrix.
    const int n = m.num_vertices();
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    std::map<std::pair<int, int>, int> inc;
    for (Eigen::Index s = 0; s < m.num_simplices(); ++s)
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const int i = m.simplices(s, a), j = m.simplices(s, b);
                adj[i][j] = adj[j][i] = 1;
                ++inc[std::minmax(i, j)];
            }
    std::vector<int> dist(n, 1 << 20);
    std::queue<int> q;
    for (const auto& [e, c] : inc)
        if (c == 1)
            for (int v : {e.first, e.second})
                if (dist[v] != 0) {
                    dist[v] = 0;
                    q.push(v);
                }
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w = 0; w < n; ++w)
            if (adj[v][w] && dist[w] > dist[v] + 1) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
    }
    int best = -1, best_score = -1;
    for (Eigen::Index s = 0; s < m.num_simplices(); ++s) {
        const int score = std::min({dist[m.simplices(s, 0)], dist[m.simplices(s, 1)], dist[m.simplices(s, 2)]});
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(s);
        }
    }
    // The 4x4 grid has four interior vertices; the chosen triangle uses only them.
    EXPECT_EQ(best_score, 1);
    EXPECT_EQ(fplm::select_seed_simplex(m, fplm::SeedStrategy::most_interior()), best);
}

TEST(SeedStrategyParsing, RoundTrip)
{
    EXPECT_EQ(fplm::to_string(fplm::parse_seed_strategy("most-interior", 0)), "most-interior");
    EXPECT_EQ(fplm::parse_seed_strategy("random", 5).value, 5u);
    EXPECT_EQ(fplm::to_string(fplm::parse_seed_strategy("index:12", 0)), "index:12");
    EXPECT_THROW(fplm::parse_seed_strategy("index:x", 0), fplm::ConfigError);
    EXPECT_THROW(fplm::parse_seed_strategy("central", 0), fplm::ConfigError);
}

TEST(MakeC1, UsesStoredVertexOrder)
{
    const auto m = hub_triangle();
    const auto c1 = fplm::make_c1(m, 1);
    EXPECT_EQ(c1.kind, fplm::FixedKind::SelectedSimplex);
    EXPECT_EQ(c1.indices, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(c1.targets, fplm::regular_simplex(2));
}

TEST(MakeRegularPolygon, Examples)
{
    auto square = make_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
    const auto p4 = fplm::make_regular_polygon(square, fplm::detect_boundary(square));
    ASSERT_EQ(p4.targets.rows(), 4);
    const double expect4[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(p4.targets(k, 0), expect4[k][0], 1e-15);
        EXPECT_NEAR(p4.targets(k, 1), expect4[k][1], 1e-15);
    }

    auto tri = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const auto p3 = fplm::make_regular_polygon(tri, fplm::detect_boundary(tri));
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(p3.targets.row(k).norm(), 1.0, 1e-15);
    EXPECT_NEAR((p3.targets.row(0) - p3.targets.row(1)).norm(), std::sqrt(3.0), 1e-14);

    // A hand-built cycle order is preserved: k-th cycle vertex goes to angle 60k degrees.
    fplm::BoundaryComplex b;
    b.cycles = {{5, 2, 8, 0, 3, 1}};
    auto hex = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const auto p6 = fplm::make_regular_polygon(hex, b);
    EXPECT_EQ(p6.indices, b.cycles[0]);
    for (int k = 0; k < 6; ++k) {
        const double a = std::numbers::pi / 3.0 * k;
        EXPECT_NEAR(p6.targets(k, 0), std::cos(a), 1e-15);
        EXPECT_NEAR(p6.targets(k, 1), std::sin(a), 1e-15);
    }
    const auto cw = fplm::make_regular_polygon(hex, b, false);
    EXPECT_NEAR(cw.targets(1, 1), -std::sin(std::numbers::pi / 3.0), 1e-15);
}

TEST(MakeRegularPolygon, Errors)
{
    auto tet = make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}});
    EXPECT_THROW(fplm::make_regular_polygon(tet, fplm::detect_boundary(tet)), fplm::ConfigError);
    fplm::BoundaryComplex two;
    two.cycles = {{0, 1, 2}, {3, 4, 5}};
    auto tri = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    EXPECT_THROW(fplm::make_regular_polygon(tri, two), fplm::MeshError);
}

TEST(RunFplm, SingleTriangleReturnsTargets)
{
    auto tri = make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const auto e = fplm::run_fplm(tri);
    EXPECT_EQ(e.rounds_run, 1);
    EXPECT_EQ(e.branch, fplm::Branch::OneRound);
    EXPECT_EQ(e.coords, fplm::regular_simplex(2));
}

TEST(RunFplm, HubLandsAtCentroid)
{
    const auto m = hub_triangle();
    const auto g = fplm::build_weights(m);
    fplm::FixedPointSet outer;
    outer.indices = {0, 1, 2};
    outer.targets = fplm::regular_simplex(2);
    const Eigen::MatrixXd y = fplm::solve_fixed_point(g, outer, {});
    // The hub is equidistant from all corners, so its weights are equal.
    EXPECT_NEAR(y(3, 0), 0.0, 1e-15);
    EXPECT_NEAR(y(3, 1), 0.0, 1e-15);

    const auto e = fplm::run_fplm(m);
    EXPECT_EQ(e.rounds_run, 2);
    EXPECT_EQ(e.branch, fplm::Branch::TwoRound);
    // Final hub is the weighted average of the round-1 boundary images.
    const Eigen::RowVectorXd avg = (e.coords.row(0) + e.coords.row(1) + e.coords.row(2)) / 3.0;
    EXPECT_LE((e.coords.row(3) - avg).norm(), 1e-14);
}

TEST(RunFplm, ClosedIcosphereRunsOneRound)
{
    fplm::GeneratorSpec spec;
    spec.kind = fplm::GeneratorKind::Sphere;
    spec.resolution = {2};
    const auto m = fplm::generate(spec).mesh;
    const auto e = fplm::run_fplm(m);
    EXPECT_EQ(e.rounds_run, 1);
    EXPECT_FALSE(e.fixed_round2.has_value());
    EXPECT_LT(fplm::check_hull_containment(e.fixed_round1, e.coords, e.final_free()), 0.0);
}

TEST(RunFplm, TwoRoundInvariantsOnSurfaces)
{
    for (auto kind : {fplm::GeneratorKind::SwissRoll, fplm::GeneratorKind::Paraboloid,
                      fplm::GeneratorKind::MonkeySaddle, fplm::GeneratorKind::TwinPeaks,
                      fplm::GeneratorKind::GridDisk}) {
        SCOPED_TRACE(fplm::to_string(kind));
        const auto m = surface(kind, 10);
        const auto e = fplm::run_fplm(m);
        ASSERT_EQ(e.rounds_run, 2);
        ASSERT_TRUE(e.fixed_round2.has_value());
        const auto& c2 = *e.fixed_round2;
        const auto boundary = fplm::detect_boundary(m);
        EXPECT_EQ(c2.indices, boundary.vertices);

        // Round-2 boundary rows are bit-identical to round 1.
        for (int v : c2.indices)
            EXPECT_EQ(e.coords.row(v), e.round1_coords.row(v));

        // Seed vertices are free in round 2.
        for (int v : e.fixed_round1.indices)
            EXPECT_FALSE(std::binary_search(c2.indices.begin(), c2.indices.end(), v));

        // Hull containment after each round.
        const double d1 = fplm::bounding_box_diameter(e.fixed_round1.targets);
        EXPECT_LE(fplm::check_hull_containment(e.fixed_round1, e.round1_coords,
                                               free_of(m.num_vertices(), e.fixed_round1.indices)),
                  1e-9 * d1);
        const double d2 = fplm::bounding_box_diameter(c2.targets);
        EXPECT_LE(fplm::check_hull_containment(c2, e.coords, e.final_free()), 1e-9 * d2);

        // Round-1 boundary image is convex.
        EXPECT_TRUE(fplm::check_boundary_convexity(boundary.cycles[0], e.round1_coords).convex);

        // Convex-combination identity at the final free vertices.
        const auto g = fplm::build_weights(m);
        EXPECT_LE(fplm::max_convex_combination_residual(g, e.final_free(), e.coords),
                  1e-8 * fplm::bounding_box_diameter(e.coords));
    }
}

TEST(RunFplm, Deterministic)
{
    const auto m = surface(fplm::GeneratorKind::TwinPeaks, 9);
    fplm::FplmOptions o;
    o.seed = fplm::SeedStrategy::random(3);
    const auto a = fplm::run_fplm(m, o), b = fplm::run_fplm(m, o);
    EXPECT_EQ(a.coords, b.coords);
    EXPECT_EQ(a.seed_simplex, b.seed_simplex);
}

TEST(RunFplm, DividingEdgeTakesPolygonBranch)
{
    auto m = oracle::planar_grid(5);
    ASSERT_FALSE(fplm::is_strongly_connected(m));
    const auto e = fplm::run_fplm(m);
    EXPECT_EQ(e.branch, fplm::Branch::RegularPolygon);
    EXPECT_EQ(e.rounds_run, 1);
    EXPECT_EQ(std::string(fplm::to_string(e.branch)), "p-gon");
    EXPECT_EQ(e.fixed_round1.kind, fplm::FixedKind::RegularPolygon);
    EXPECT_EQ(e.fixed_round1.indices.size(), 16u);

    const auto ccw = fplm::orientation_histogram(m, e.coords, 1e-12);
    EXPECT_EQ(ccw.positive, m.num_simplices());

    fplm::FplmOptions o;
    o.counterclockwise = false;
    const auto flipped = fplm::orientation_histogram(m, fplm::run_fplm(m, o).coords, 1e-12);
    EXPECT_EQ(flipped.negative, m.num_simplices());
}

TEST(RunFplm, PathIsOneDimensional)
{
    auto path = make_mesh({{0, 0}, {1, 0.5}, {2, 0}, {3, 1}}, {{0, 1}, {1, 2}, {2, 3}});
    const auto e = fplm::run_fplm(path);
    ASSERT_EQ(e.coords.cols(), 1);
    EXPECT_EQ(e.rounds_run, 2);
    // Interior vertices are strictly between the endpoints and monotone.
    const double a = e.coords(0, 0), b = e.coords(1, 0), c = e.coords(2, 0), d = e.coords(3, 0);
    EXPECT_TRUE((a < b && b < c && c < d) || (a > b && b > c && c > d));
}

TEST(RunFplm, Errors)
{
    auto two_tets = make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}},
                              {{0, 1, 2, 3}, {1, 2, 3, 4}});
    EXPECT_THROW(fplm::run_fplm(two_tets), fplm::MeshError);

    auto annulus = make_mesh({{0, 0}, {3, 0}, {3, 3}, {0, 3}, {1, 1}, {2, 1}, {2, 2}, {1, 2}},
                             {{0, 1, 5}, {0, 5, 4}, {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}});
    EXPECT_THROW(fplm::run_fplm(annulus), fplm::MeshError);

    auto degenerate = make_mesh({{0, 0}, {1, 1}, {2, 2}}, {{0, 1, 2}});
    EXPECT_THROW(fplm::run_fplm(degenerate), fplm::MeshError);

    fplm::FplmOptions bad;
    bad.gamma = -1.0;
    EXPECT_THROW(fplm::run_fplm(hub_triangle(), bad), fplm::ConfigError);
}

TEST(RunFplm, DefaultShellBallSingleSignForSeveralSeeds)
{
    fplm::GeneratorSpec spec;
    spec.kind = fplm::GeneratorKind::Ball3;
    const auto m = fplm::generate(spec).mesh;
    for (auto s : {fplm::SeedStrategy::most_interior(), fplm::SeedStrategy::random(1), fplm::SeedStrategy::index(5)}) {
        fplm::FplmOptions o;
        o.seed = s;
        const auto e = fplm::run_fplm(m, o);
        EXPECT_EQ(e.rounds_run, 2);
        EXPECT_TRUE(fplm::orientation_histogram(m, e.coords, 1e-12).single_sign()) << fplm::to_string(s);
    }
}
