#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cgt/errors.hpp"

namespace cgt {

enum class GraphKind { directed_ring, random_strongly_connected, explicit_edges };

/// One directed communication link: `from` sends to `to`. Nodes are 1-based.
struct Edge {
    int from = 0;
    int to = 0;
    double weight = 1.0;
};

struct GraphSpec {
    GraphKind kind = GraphKind::directed_ring;
    int n_agents = 0;
    double density = 0.5; ///< random_strongly_connected only, in (0, 1]
    std::uint64_t seed = 0;
    std::vector<Edge> edges; ///< explicit_edges only
};

/// Row-stochastic pull matrix R, column-stochastic push matrix C, their
/// eigenvalue-1 eigenvectors u (left, of R) and v (right, of C) normalized to
/// sum N, and the spectral radii of the deflated matrices R - (1/N)1u^T and
/// C - (1/N)v1^T. Immutable after construction.
struct MixingPair {
    int n_agents = 0;
    Eigen::MatrixXd R;
    Eigen::MatrixXd C;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    double rho_R = 0.0;
    double rho_C = 0.0;

    /// Text serialization: `N=<int>`, N rows of R, blank line, N rows of C,
    /// entries printed with 17 significant digits (round-trip exact).
    std::string to_text() const;
    static MixingPair from_text(std::istream& in);
};

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_passed() const;
    std::string summary() const;
};

MixingPair build_mixing_pair(const GraphSpec& spec);

/// Power iteration on R^T and C until the infinity-norm residual drops below
/// 1e-12 (at unit l1 scale) or 1e5 iterations; result rescaled so that
/// u^T 1 = N and 1^T v = N. Throws NoConvergence past the iteration cap.
std::pair<Eigen::VectorXd, Eigen::VectorXd>
compute_eigenvectors(const Eigen::MatrixXd& R, const Eigen::MatrixXd& C);

inline constexpr std::uint64_t kSpectralSeed = 0x5eed5eedULL;

/// Spectral radius of M - (1/N) a b^T by power iteration with a seeded random
/// start, relative tolerance 1e-10. Handles a complex dominant pair via a
/// two-step recurrence fit. Throws NoConvergence past 1e5 iterations.
double spectral_radius_deflated(const Eigen::MatrixXd& M, const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b, std::uint64_t seed = kSpectralSeed);

/// Checks nonnegativity, stochasticity, positive diagonals, spanning tree of
/// the R-induced digraph and strong connectivity of the C^T-induced digraph.
/// Never throws; failures are carried in the report.
ValidationReport validate_assumption4(const Eigen::MatrixXd& R, const Eigen::MatrixXd& C);

} // namespace cgt
