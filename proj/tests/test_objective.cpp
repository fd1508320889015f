#include <doctest.h>

#include <cmath>
#include <memory>

#include "cgt/objective.hpp"
#include "cgt/rng.hpp"
#include "oracles.hpp"

using namespace cgt;

namespace {

std::shared_ptr<Shard> toy_shard() {
    auto shard = std::make_shared<Shard>();
    shard->dim = 4;
    SparseSample a, b, c;
    a.label = 1.0;
    a.features = {{1, 0.5}, {3, -1.2}};
    b.label = 0.0;
    b.features = {{2, 2.0}, {4, 0.3}};
    c.label = 1.0;
    c.features = {{1, -0.7}, {2, 0.4}, {4, 1.5}};
    shard->samples = {a, b, c};
    return shard;
}

Eigen::VectorXd gauss(int d, rng::Engine& rng) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; i += 2) {
        const auto [a, b] = rng::normal_pair(rng);
        z(i) = a;
        if (i + 1 < d) z(i + 1) = b;
    }
    return z;
}

} // namespace

TEST_CASE("power norm value and gradient at a unit point") {
    const LocalObjective obj = LocalObjective::power_norm(2, 1.0, 4.0);
    const auto [value, grad] = obj.eval((Eigen::VectorXd(2) << 1.0, 0.0).finished());
    CHECK(value == doctest::Approx(1.0));
    CHECK(grad(0) == doctest::Approx(4.0));
    CHECK(grad(1) == 0.0);
    // gradient of ||theta||^p is defined as zero at the origin
    CHECK(obj.gradient(Eigen::VectorXd::Zero(2)).norm() == 0.0);
}

TEST_CASE("logistic gradient at zero is (sigmoid(0) - y) h") {
    auto shard = std::make_shared<Shard>();
    shard->dim = 3;
    SparseSample s;
    s.label = 1.0;
    s.features = {{1, 2.0}, {3, -1.0}};
    shard->samples = {s};
    const LocalObjective obj = LocalObjective::logistic_lq(shard, 0.0, 2.0);
    const auto [value, grad] = obj.eval(Eigen::VectorXd::Zero(3));
    CHECK(value == doctest::Approx(std::log(2.0)));
    CHECK(grad(0) == doctest::Approx((0.5 - 1.0) * 2.0));
    CHECK(grad(1) == 0.0);
    CHECK(grad(2) == doctest::Approx((0.5 - 1.0) * -1.0));
}

TEST_CASE("logistic_lq gradient matches central finite differences") {
    const LocalObjective obj = LocalObjective::logistic_lq(toy_shard(), 0.01, 4.0);
    auto rng = rng::make(11);
    for (int t = 0; t < 20; ++t)
        CHECK(oracle::fd_gradient_error(obj, gauss(4, rng)) < 1e-5);
}

TEST_CASE("every objective kind passes the finite-difference check") {
    auto rng = rng::make(12);
    std::vector<LocalObjective> objs;
    objs.push_back(LocalObjective::logistic_lq(toy_shard(), 5e-4, 4.0));
    objs.push_back(LocalObjective::logistic_lq(toy_shard(), 1e-3, 5.0, LossVariant::label0_flipped));
    Eigen::MatrixXd Q(4, 4);
    Q.setZero();
    Q.diagonal() << 1.0, 2.0, 0.5, 3.0;
    objs.push_back(LocalObjective::quadratic(Q, (Eigen::VectorXd(4) << 1, -1, 0, 2).finished()));
    objs.push_back(LocalObjective::power_norm(4, 0.7, 6.0));
    objs.push_back(LocalObjective::composite({objs[2], objs[3]}));
    for (const LocalObjective& obj : objs)
        for (int t = 0; t < 10; ++t)
            CHECK(oracle::fd_gradient_error(obj, 2.0 * gauss(4, rng)) < 1e-5);
}

TEST_CASE("stable sigmoid survives |z| up to 1e4") {
    auto shard = std::make_shared<Shard>();
    shard->dim = 1;
    SparseSample s;
    s.label = 1.0;
    s.features = {{1, 1.0}};
    shard->samples = {s};
    const LocalObjective obj = LocalObjective::logistic_lq(shard, 0.0, 2.0);
    for (const double z : {1e4, -1e4, 703.0, -703.0}) {
        const auto [value, grad] = obj.eval((Eigen::VectorXd(1) << z).finished());
        CHECK(std::isfinite(value));
        CHECK(std::isfinite(grad(0)));
    }
}

TEST_CASE("saturated evaluation stays finite at extreme inputs") {
    const LocalObjective obj = LocalObjective::power_norm(2, 1.0, 6.0);
    const auto [value, grad] = obj.eval((Eigen::VectorXd(2) << 1e300, -1e300).finished());
    CHECK(std::isfinite(value));
    CHECK(grad.allFinite());
}

TEST_CASE("eval input validation") {
    const LocalObjective obj = LocalObjective::power_norm(3, 1.0, 4.0);
    CHECK_THROWS_AS(obj.eval(Eigen::VectorXd::Zero(2)), DimensionMismatch);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
    bad(1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(obj.eval(bad), NonFiniteInput);
}

TEST_CASE("ab_constants") {
    SUBCASE("c = 1 simplifies to A = 2") {
        const auto [A, B] = ab_constants(1.0);
        CHECK(A == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(B == doctest::Approx(1.7182818284590452).epsilon(1e-15));
    }
    SUBCASE("series limit near zero") {
        const auto [A, B] = ab_constants(1e-10);
        CHECK(A == 1.0);
        CHECK(B == 1.0);
    }
    SUBCASE("c = 2 against the high-precision oracle") {
        const auto [A, B] = ab_constants(2.0);
        CHECK(A == doctest::Approx(5.1945280494653251).epsilon(1e-15));
        CHECK(B == doctest::Approx(3.1945280494653251).epsilon(1e-15));
    }
    SUBCASE("A and B are >= 1 and strictly increasing on a grid") {
        double prevA = 1.0, prevB = 1.0;
        for (double c = 0.1; c <= 5.0 + 1e-12; c += 0.1) {
            const auto [A, B] = ab_constants(c);
            CHECK(A >= 1.0);
            CHECK(B >= 1.0);
            CHECK(A > prevA);
            CHECK(B > prevB);
            prevA = A;
            prevB = B;
        }
    }
    SUBCASE("rejects nonpositive c") { CHECK_THROWS_AS(ab_constants(0.0), NonPositiveC); }
}

TEST_CASE("combine_global_smoothness") {
    CHECK(combine_global_smoothness({{3.0, 2.0}}, 1.0, 1.0) == std::pair{5.0, 2.0});
    CHECK(combine_global_smoothness({{1.0, 0.5}, {3.0, 1.5}}, 2.0, 2.0) == std::pair{4.0, 2.0});
    // classical smoothness recovered as all L1 go to zero
    const auto [L0, L1] = combine_global_smoothness({{2.0, 1e-15}, {4.0, 1e-15}}, 3.0, 5.0);
    CHECK(L0 == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(L1 <= 1e-14);
    CHECK_THROWS_AS(combine_global_smoothness({}, 1.0, 1.0), EmptyInput);
}

TEST_CASE("combine_global_smoothness is monotone in each argument") {
    const auto base = combine_global_smoothness({{1.0, 0.5}, {2.0, 1.0}}, 1.5, 1.0);
    CHECK(combine_global_smoothness({{1.5, 0.5}, {2.0, 1.0}}, 1.5, 1.0).first > base.first);
    CHECK(combine_global_smoothness({{1.0, 0.5}, {2.0, 1.0}}, 1.5, 2.0).first > base.first);
    CHECK(combine_global_smoothness({{1.0, 0.9}, {2.0, 1.0}}, 1.5, 1.0).second > base.second);
    CHECK(combine_global_smoothness({{1.0, 0.5}, {2.0, 1.0}}, 2.5, 1.0).second > base.second);
}

TEST_CASE("probe_smoothness on a constant-Hessian quadratic") {
    Eigen::MatrixXd Q = 3.0 * Eigen::MatrixXd::Identity(4, 4);
    const LocalObjective obj = LocalObjective::quadratic(Q, Eigen::VectorXd::Zero(4));
    const SmoothnessEstimate est = probe_smoothness(obj, Eigen::VectorXd::Ones(4), 1.0, 128, 3);
    CHECK(est.L0_hat == doctest::Approx(3.0).epsilon(0.05));
    CHECK(est.L1_hat * 12.0 <= 0.05 * est.L0_hat); // slope negligible at scale g <= 12
    CHECK(est.max_residual <= 1e-12);
}

TEST_CASE("probe_smoothness sees gradient-dependent curvature of power norms") {
    const LocalObjective obj = LocalObjective::power_norm(3, 1.0, 4.0);
    Eigen::VectorXd anchor(3);
    anchor << 3.0, 0.0, 0.0;
    const SmoothnessEstimate est = probe_smoothness(obj, anchor, 0.5, 128, 5);
    CHECK(est.L1_hat > 0.0);
    CHECK(est.max_residual <= 1e-9);
    // Exact Hessian norm is 12 lambda t^2 against gradient norm 4 lambda t^3:
    // the envelope at the anchor scale must cover that ratio.
    const double t = 3.0;
    CHECK(est.L0_hat + est.L1_hat * 4.0 * t * t * t >= 0.8 * 12.0 * t * t);
}

TEST_CASE("probe_smoothness on a linear objective returns the zero envelope") {
    const LocalObjective obj = LocalObjective::quadratic(
        Eigen::MatrixXd::Zero(3, 3), (Eigen::VectorXd(3) << 1.0, -2.0, 0.5).finished());
    const SmoothnessEstimate est = probe_smoothness(obj, Eigen::VectorXd::Zero(3), 1.0, 64, 7);
    CHECK(est.degenerate); // all gradient norms equal: L1 unidentifiable
    CHECK(est.L0_hat == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(est.L1_hat == 0.0);
}

TEST_CASE("probe_dissimilarity") {
    auto rng = rng::make(17);
    std::vector<Eigen::VectorXd> points;
    for (int t = 0; t < 12; ++t) points.push_back(2.0 * gauss(3, rng));

    SUBCASE("identical objectives have unit ell and a machine-epsilon floor") {
        const LocalObjective q = LocalObjective::quadratic(
            Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3));
        const DissimilarityEstimate est = probe_dissimilarity({q, q, q}, points);
        CHECK(est.ell_hat == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(est.b_hat > 0.0);
        CHECK(est.b_hat < 1e-10);
    }
    SUBCASE("curvature mismatch: grad f1 = 2 theta, grad f2 = 4 theta") {
        const LocalObjective f1 = LocalObjective::quadratic(
            2.0 * Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3));
        const LocalObjective f2 = LocalObjective::quadratic(
            4.0 * Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3));
        const DissimilarityEstimate est = probe_dissimilarity({f1, f2}, points);
        CHECK(est.ell_hat == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
        CHECK(est.b_hat < 1e-8);
    }
    SUBCASE("shifted quadratics: flat deviation envelope") {
        // grad f_i = theta - c_i with sum c_i = 0
        std::vector<Eigen::VectorXd> centers = {
            (Eigen::VectorXd(3) << 1.0, 0.0, -0.5).finished(),
            (Eigen::VectorXd(3) << -1.0, 0.5, 0.0).finished(),
            (Eigen::VectorXd(3) << 0.0, -0.5, 0.5).finished()};
        std::vector<LocalObjective> objs;
        double max_dev = 0.0;
        for (const Eigen::VectorXd& c : centers) {
            objs.push_back(
                LocalObjective::quadratic(Eigen::MatrixXd::Identity(3, 3), -c));
            max_dev = std::max(max_dev, c.norm());
        }
        const DissimilarityEstimate est = probe_dissimilarity(objs, points);
        CHECK(est.ell_hat == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(est.b_hat == doctest::Approx(max_dev).epsilon(1e-9));
    }
}

TEST_CASE("envelope validity holds for every probe output") {
    auto rng = rng::make(23);
    for (int trial = 0; trial < 10; ++trial) {
        const double lambda = 0.1 + rng::uniform01(rng);
        const double p = 4.0 + 2.0 * rng::uniform01(rng);
        const LocalObjective obj = LocalObjective::power_norm(4, lambda, p);
        const SmoothnessEstimate est =
            probe_smoothness(obj, gauss(4, rng), 0.5 + rng::uniform01(rng), 64, rng());
        CHECK(est.max_residual <= 1e-9 * (1.0 + est.L0_hat));
        CHECK(est.L0_hat >= 0.0);
        CHECK(est.L1_hat >= 0.0);
    }
}

TEST_CASE("suboptimality gap check") {
    SUBCASE("quadratic equality case is tight") {
        const LocalObjective obj = LocalObjective::quadratic(
            Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1));
        const GapReport rep = suboptimality_gap_check(
            obj, 1.0, 0.0,
            {(Eigen::VectorXd(1) << 2.0).finished(), Eigen::VectorXd::Zero(1)});
        CHECK(rep.max_violation_rel <= 1e-9); // ||grad||^2 = 4 = 2 L (f - fmin)
        CHECK(rep.n_points == 2);
    }
    SUBCASE("probed envelope of a power norm produces no violations") {
        const LocalObjective obj = LocalObjective::power_norm(3, 1.0, 4.0);
        Eigen::VectorXd anchor(3);
        anchor << 2.0, 0.0, 0.0;
        const SmoothnessEstimate est = probe_smoothness(obj, anchor, 0.5, 128, 29);
        auto rng = rng::make(31);
        std::vector<Eigen::VectorXd> points;
        for (int t = 0; t < 50; ++t)
            points.push_back(anchor + 0.4 * gauss(3, rng) / std::sqrt(3.0));
        const GapReport rep = suboptimality_gap_check(obj, est.L0_hat, est.L1_hat, points);
        CHECK(rep.max_violation_rel <= 1e-9);
    }
    SUBCASE("data-driven objectives have no closed-form minimum") {
        const LocalObjective obj = LocalObjective::logistic_lq(toy_shard(), 0.0, 2.0);
        CHECK_THROWS_AS(suboptimality_gap_check(obj, 1.0, 0.0, {}), UnknownMinimum);
    }
}

TEST_CASE("minibatch evaluation averages the selected samples") {
    const LocalObjective obj = LocalObjective::logistic_lq(toy_shard(), 0.0, 2.0);
    auto rng = rng::make(37);
    const Eigen::VectorXd theta = gauss(4, rng);
    const std::vector<long> batch = {0, 2};
    const auto [bv, bg] = obj.eval_batch(theta, batch);

    auto single = [&](long idx) {
        auto shard = std::make_shared<Shard>();
        shard->dim = 4;
        shard->samples = {toy_shard()->samples[static_cast<size_t>(idx)]};
        return LocalObjective::logistic_lq(shard, 0.0, 2.0).eval(theta);
    };
    const auto [v0, g0] = single(0);
    const auto [v2, g2] = single(2);
    CHECK(bv == doctest::Approx(0.5 * (v0 + v2)).epsilon(1e-14));
    CHECK((bg - 0.5 * (g0 + g2)).norm() <= 1e-14);
}
