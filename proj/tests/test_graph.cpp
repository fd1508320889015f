#include <doctest.h>

#include <sstream>

#include "cgt/graph.hpp"
#include "cgt/rng.hpp"
#include "oracles.hpp"

using namespace cgt;

namespace {

GraphSpec ring(int n) {
    GraphSpec s;
    s.kind = GraphKind::directed_ring;
    s.n_agents = n;
    return s;
}

GraphSpec random_spec(int n, std::uint64_t seed, double density = 0.5) {
    GraphSpec s;
    s.kind = GraphKind::random_strongly_connected;
    s.n_agents = n;
    s.seed = seed;
    s.density = density;
    return s;
}

void check_invariants(const MixingPair& mp) {
    const int n = mp.n_agents;
    CHECK((mp.R.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((mp.C.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((mp.R.array() >= 0.0).all());
    CHECK((mp.C.array() >= 0.0).all());
    CHECK((mp.R.diagonal().array() > 0.0).all());
    CHECK((mp.C.diagonal().array() > 0.0).all());
    CHECK((mp.u.transpose() * mp.R - mp.u.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * n);
    CHECK((mp.C * mp.v - mp.v).cwiseAbs().maxCoeff() <= 1e-10 * n);
    CHECK(mp.u.sum() == doctest::Approx(n).epsilon(1e-10));
    CHECK(mp.v.sum() == doctest::Approx(n).epsilon(1e-10));
    CHECK(mp.u.dot(mp.v) > 0.0);
    CHECK((mp.v.array() > 0.0).all());
    CHECK(mp.rho_R < 1.0);
    CHECK(mp.rho_C < 1.0);
}

} // namespace

TEST_CASE("directed ring N=3 has the uniform-weight pattern") {
    const MixingPair mp = build_mixing_pair(ring(3));
    Eigen::MatrixXd expected(3, 3);
    expected << 0.5, 0.5, 0.0, //
        0.0, 0.5, 0.5,         //
        0.5, 0.0, 0.5;
    CHECK((mp.R - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mp.C - expected).cwiseAbs().maxCoeff() == 0.0);
    check_invariants(mp);
}

TEST_CASE("explicit two-agent complete graph normalizes to half weights") {
    GraphSpec s;
    s.kind = GraphKind::explicit_edges;
    s.n_agents = 2;
    s.edges = {{1, 1, 1}, {2, 2, 1}, {1, 2, 1}, {2, 1, 1}};
    const MixingPair mp = build_mixing_pair(s);
    Eigen::MatrixXd expected(2, 2);
    expected << 0.5, 0.5, 0.5, 0.5;
    CHECK((mp.R - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mp.C - expected).cwiseAbs().maxCoeff() == 0.0);
    check_invariants(mp);
}

TEST_CASE("explicit graph without cross edges is rejected") {
    GraphSpec s;
    s.kind = GraphKind::explicit_edges;
    s.n_agents = 2;
    s.edges = {{1, 1, 1}, {2, 2, 1}};
    CHECK_THROWS_AS(build_mixing_pair(s), ConnectivityError);
}

TEST_CASE("weight errors: negative weight and missing self-loop") {
    GraphSpec s;
    s.kind = GraphKind::explicit_edges;
    s.n_agents = 2;
    s.edges = {{1, 1, 1}, {2, 2, 1}, {1, 2, -0.5}, {2, 1, 1}};
    CHECK_THROWS_AS(build_mixing_pair(s), WeightError);
    s.edges = {{1, 1, 1}, {1, 2, 1}, {2, 1, 1}}; // node 2 has no self-loop
    CHECK_THROWS_AS(build_mixing_pair(s), WeightError);
}

TEST_CASE("doubly stochastic matrices give uniform eigenvectors") {
    Eigen::MatrixXd R(2, 2);
    R << 0.5, 0.5, 0.5, 0.5;
    const auto [u, v] = compute_eigenvectors(R, R);
    CHECK((u - Eigen::VectorXd::Ones(2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((v - Eigen::VectorXd::Ones(2)).cwiseAbs().maxCoeff() <= 1e-12);

    // 3-node symmetric circulant with half self-weight.
    Eigen::MatrixXd C(3, 3);
    C << 0.5, 0.25, 0.25, //
        0.25, 0.5, 0.25,  //
        0.25, 0.25, 0.5;
    const auto [u3, v3] = compute_eigenvectors(C, C);
    CHECK((u3 - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((v3 - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("random digraph eigenvectors match the dense oracle") {
    const MixingPair mp = build_mixing_pair(random_spec(5, 7));
    CHECK((mp.u.transpose() * mp.R - mp.u.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::VectorXd u_dense = oracle::left_perron_dense(mp.R);
    CHECK((mp.u - u_dense).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("deflated spectral radius: rank-1 annihilation") {
    Eigen::MatrixXd M(2, 2);
    M << 0.5, 0.5, 0.5, 0.5;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    CHECK(spectral_radius_deflated(M, ones, ones) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("deflated spectral radius: identity minus half the ones matrix") {
    // Diagnostic-only input (violates the mixing assumptions): eigenvalues of
    // I - (1/2) 1 1^T are {0, 1}, so the radius is 1.
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    const double rho = spectral_radius_deflated(M, ones, ones);
    const double dense = oracle::spectral_radius_dense(M - 0.5 * ones * ones.transpose());
    CHECK(rho == doctest::Approx(dense).epsilon(1e-9));
    CHECK(rho == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("directed ring radius has a complex dominant pair") {
    const MixingPair mp = build_mixing_pair(ring(3));
    CHECK(mp.rho_R < 1.0);
    const double dense = oracle::spectral_radius_dense(
        mp.R - (Eigen::VectorXd::Ones(3) * mp.u.transpose()) / 3.0);
    CHECK(mp.rho_R == doctest::Approx(dense).epsilon(1e-8));
    CHECK(mp.rho_R == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("validation report flags each failed condition") {
    Eigen::MatrixXd good(2, 2);
    good << 0.5, 0.5, 0.5, 0.5;
    CHECK(validate_assumption4(good, good).all_passed());

    Eigen::MatrixXd zero_diag(2, 2);
    zero_diag << 0.0, 1.0, 1.0, 0.0;
    const ValidationReport rep = validate_assumption4(zero_diag, good);
    CHECK_FALSE(rep.all_passed());
    bool diag_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "positive diagonals") diag_failed = !c.passed;
    CHECK(diag_failed);

    const Eigen::MatrixXd disconnected = Eigen::MatrixXd::Identity(2, 2);
    const ValidationReport rep2 = validate_assumption4(good, disconnected);
    bool conn_failed = false;
    for (const auto& c : rep2.checks)
        if (c.name == "G_{C^T} strongly connected") conn_failed = !c.passed;
    CHECK(conn_failed);
}

TEST_CASE("fuzz: every validated random pair is contractive and oracle-consistent") {
    auto rng = cgt::rng::make(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(cgt::rng::uniform_below(rng, 19));
        const double density = 0.15 + 0.7 * cgt::rng::uniform01(rng);
        const MixingPair mp = build_mixing_pair(random_spec(n, rng(), density));
        CHECK(validate_assumption4(mp.R, mp.C).all_passed());
        check_invariants(mp);

        const Eigen::MatrixXd defR =
            mp.R - (Eigen::VectorXd::Ones(n) * mp.u.transpose()) / static_cast<double>(n);
        CHECK(mp.rho_R == doctest::Approx(oracle::spectral_radius_dense(defR)).epsilon(1e-6));
        const Eigen::MatrixXd defC =
            mp.C - (mp.v * Eigen::RowVectorXd::Ones(n)) / static_cast<double>(n);
        CHECK(mp.rho_C == doctest::Approx(oracle::spectral_radius_dense(defC)).epsilon(1e-6));
    }
}

TEST_CASE("identical specs build byte-identical pairs") {
    const MixingPair a = build_mixing_pair(random_spec(7, 123, 0.4));
    const MixingPair b = build_mixing_pair(random_spec(7, 123, 0.4));
    CHECK(a.to_text() == b.to_text());
}

TEST_CASE("text serialization round-trips exactly") {
    const MixingPair mp = build_mixing_pair(random_spec(6, 42, 0.5));
    std::istringstream in(mp.to_text());
    const MixingPair back = MixingPair::from_text(in);
    CHECK(back.n_agents == mp.n_agents);
    CHECK((back.R - mp.R).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.C - mp.C).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.to_text() == mp.to_text());
}

TEST_CASE("fixed-point property used by the averaged dynamics") {
    const MixingPair mp = build_mixing_pair(random_spec(9, 5, 0.3));
    const int n = mp.n_agents;
    CHECK(((mp.u / n).transpose() * mp.R - (mp.u / n).transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((mp.C * (mp.v / n) - mp.v / n).cwiseAbs().maxCoeff() <= 1e-10);
}
