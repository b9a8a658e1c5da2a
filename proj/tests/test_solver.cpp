#include "fplm/generators.hpp"
#include "fplm/laplacian.hpp"
#include "fplm/solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

fplm::SolveConfig with(fplm::SolveMethod m, double tol = 1e-12)
{
    fplm::SolveConfig c;
    c.method = m;
    c.rel_tol = tol;
    return c;
}

Eigen::SparseMatrix<double> sparse(const Eigen::MatrixXd& d)
{
    return d.sparseView();
}

// Free block of a random mesh with a few random fixed vertices.
std::pair<fplm::LaplacianSystem, Eigen::MatrixXd> random_system(std::uint64_t seed, int side)
{
    fplm::GeneratorSpec spec;
    spec.kind = fplm::GeneratorKind::MonkeySaddle;
    spec.triangulation = fplm::Triangulation::Delaunay;
    spec.seed = seed;
    spec.resolution = {side, side};
    const auto mesh = fplm::generate(spec).mesh;
    const auto g = fplm::build_weights(mesh);
    std::mt19937_64 rng(seed);
    std::vector<int> fixed;
    std::uniform_int_distribution<int> pick(0, g.n - 1);
    while (fixed.size() < 4) {
        const int v = pick(rng);
        if (std::find(fixed.begin(), fixed.end(), v) == fixed.end())
            fixed.push_back(v);
    }
    auto sys = fplm::assemble_system(g, fixed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd c(4, 2);
    for (int i = 0; i < 4; ++i)
        c.row(i) << unit(rng), unit(rng);
    Eigen::MatrixXd rhs = sys.fixed_rhs(c);
    return {std::move(sys), rhs};
}

} // namespace

TEST(SolveSpd, OneByOne)
{
    const auto a = sparse((Eigen::MatrixXd(1, 1) << 2).finished());
    const Eigen::MatrixXd b = (Eigen::MatrixXd(1, 1) << 1).finished();
    for (auto m : {fplm::SolveMethod::Direct, fplm::SolveMethod::Iterative})
        EXPECT_NEAR(fplm::solve_spd(a, b, with(m))(0, 0), 0.5, 1e-15);
}

TEST(SolveSpd, PathInterpolation)
{
    fplm::WeightedGraph g;
    g.n = 4;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
    const auto sys = fplm::assemble_system(g, {0, 3});
    const Eigen::MatrixXd c = (Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished();
    for (auto m : {fplm::SolveMethod::Direct, fplm::SolveMethod::Iterative}) {
        const Eigen::MatrixXd y = fplm::solve_spd(sys, sys.fixed_rhs(c), with(m));
        EXPECT_NEAR(y(0, 0), 1.0 / 3.0, 1e-12);
        EXPECT_NEAR(y(1, 0), 2.0 / 3.0, 1e-12);
    }
}

TEST(SolveSpd, Random20x20MatchesGaussianElimination)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> w(0.1, 1.0);
    // Dense random weighted graph on 21 vertices with vertex 20 fixed.
    fplm::WeightedGraph g;
    g.n = 21;
    for (int i = 0; i < 21; ++i)
        for (int j = i + 1; j < 21; ++j)
            if (w(rng) < 0.5 || j == i + 1)
                g.edges.push_back({i, j, w(rng)});
    const auto sys = fplm::assemble_system(g, {20});
    const Eigen::MatrixXd ly = Eigen::MatrixXd(sys.free_block());
    ASSERT_EQ(ly.rows(), 20);
    Eigen::MatrixXd rhs(20, 2);
    for (int i = 0; i < 20; ++i)
        rhs.row(i) << w(rng), -w(rng);
    const Eigen::MatrixXd expect = oracle::dense_solve(ly, rhs);
    for (auto m : {fplm::SolveMethod::Direct, fplm::SolveMethod::Iterative}) {
        const Eigen::MatrixXd got = fplm::solve_spd(sys, rhs, with(m));
        EXPECT_LE((got - expect).norm(), 1e-8 * expect.norm()) << fplm::to_string(m);
    }
}

TEST(SolveSpd, ResidualContract)
{
    auto [sys, rhs] = random_system(9, 12);
    for (auto m : {fplm::SolveMethod::Direct, fplm::SolveMethod::Iterative}) {
        fplm::SolveReport report;
        fplm::SolveConfig cfg = with(m, 1e-10);
        const Eigen::MatrixXd y = fplm::solve_spd(sys, rhs, cfg, &report);
        EXPECT_LE((sys.free_block() * y - rhs).norm(), 1e-10 * rhs.norm());
        EXPECT_EQ(report.method, m);
        EXPECT_LE(report.relative_residual, 1e-10);
        if (m == fplm::SolveMethod::Iterative)
            EXPECT_EQ(report.iterations.size(), 2u);
    }
}

TEST(SolveSpd, DirectAndIterativeAgree)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto [sys, rhs] = random_system(seed, 15 + 3 * static_cast<int>(seed));
        const Eigen::MatrixXd d = fplm::solve_spd(sys, rhs, with(fplm::SolveMethod::Direct));
        const Eigen::MatrixXd i = fplm::solve_spd(sys, rhs, with(fplm::SolveMethod::Iterative));
        EXPECT_LE((d - i).norm(), 1e-8 * d.norm()) << "seed " << seed;
    }
}

TEST(SolveSpd, LinearityColumnByColumn)
{
    auto [sys, rhs] = random_system(21, 14);
    for (auto m : {fplm::SolveMethod::Direct, fplm::SolveMethod::Iterative}) {
        const Eigen::MatrixXd block = fplm::solve_spd(sys, rhs, with(m));
        for (int c = 0; c < rhs.cols(); ++c) {
            const Eigen::MatrixXd col = fplm::solve_spd(sys, rhs.col(c), with(m));
            EXPECT_LE((col - block.col(c)).norm(), 1e-10 * std::max(1.0, col.norm()));
        }
        // Superposition of right-hand sides.
        const Eigen::MatrixXd sum = fplm::solve_spd(sys, rhs.col(0) + 2.0 * rhs.col(1), with(m));
        EXPECT_LE((sum - (block.col(0) + 2.0 * block.col(1))).norm(), 1e-9 * std::max(1.0, sum.norm()));
    }
}

TEST(SolveSpd, ThreadCountDoesNotChangeResult)
{
    auto [sys, rhs] = random_system(4, 16);
    Eigen::MatrixXd wide(rhs.rows(), 6);
    wide << rhs, 2.0 * rhs, -rhs;
    auto cfg = with(fplm::SolveMethod::Iterative, 1e-10);
    const Eigen::MatrixXd one = fplm::solve_spd(sys, wide, cfg);
    cfg.threads = 4;
    const Eigen::MatrixXd four = fplm::solve_spd(sys, wide, cfg);
    EXPECT_EQ(one, four);
}

TEST(SolveSpd, Deterministic)
{
    auto [sys, rhs] = random_system(8, 13);
    for (auto m : {fplm::SolveMethod::Direct, fplm::SolveMethod::Iterative})
        EXPECT_EQ(fplm::solve_spd(sys, rhs, with(m)), fplm::solve_spd(sys, rhs, with(m)));
}

TEST(SolveSpd, AutoPicksByThreshold)
{
    auto [sys, rhs] = random_system(2, 10);
    fplm::SolveConfig cfg;
    fplm::SolveReport report;
    fplm::solve_spd(sys, rhs, cfg, &report);
    EXPECT_EQ(report.method, fplm::SolveMethod::Direct);
    cfg.auto_threshold = 5;
    fplm::solve_spd(sys, rhs, cfg, &report);
    EXPECT_EQ(report.method, fplm::SolveMethod::Iterative);
}

TEST(SolveSpd, NonConvergenceReportsResidual)
{
    auto [sys, rhs] = random_system(6, 15);
    auto cfg = with(fplm::SolveMethod::Iterative, 1e-12);
    cfg.max_iter = 2;
    try {
        fplm::solve_spd(sys, rhs, cfg);
        FAIL() << "expected SolverError";
    } catch (const fplm::SolverError& e) {
        EXPECT_EQ(e.kind(), fplm::SolverError::Kind::NotConverged);
        EXPECT_GT(e.residual(), 1e-12);
    }
}

TEST(SolveSpd, IndefiniteMatrixReportsPivot)
{
    Eigen::MatrixXd a(3, 3);
    a << 2, 0, 0, 0, -1, 0, 0, 0, 3;
    const Eigen::MatrixXd b = Eigen::MatrixXd::Ones(3, 1);
    try {
        fplm::solve_spd(sparse(a), b, with(fplm::SolveMethod::Direct));
        FAIL() << "expected SolverError";
    } catch (const fplm::SolverError& e) {
        EXPECT_EQ(e.kind(), fplm::SolverError::Kind::NotPositiveDefinite);
        EXPECT_EQ(e.pivot(), 1);
    }
}

TEST(SolveConfig, Validation)
{
    fplm::SolveConfig c;
    EXPECT_NO_THROW(c.validate());
    c.rel_tol = 0.0;
    EXPECT_THROW(c.validate(), fplm::ConfigError);
    c.rel_tol = 1.0;
    EXPECT_THROW(c.validate(), fplm::ConfigError);
    c.rel_tol = 1e-8;
    c.max_iter = 0;
    EXPECT_THROW(c.validate(), fplm::ConfigError);
    EXPECT_EQ(fplm::parse_solve_method("iterative"), fplm::SolveMethod::Iterative);
    EXPECT_THROW(fplm::parse_solve_method("cholmod"), fplm::ConfigError);
}
