#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "cgt/data.hpp"
#include "cgt/errors.hpp"

namespace cgt {

enum class ObjectiveKind { logistic_lq, quadratic, power_norm, custom_composite };

/// Sign convention of the label-0 cross-entropy term. `standard` is the usual
/// binary cross-entropy log(1+e^z) - y z with z = theta^T h. `label0_flipped`
/// flips the sign of the label-0 term; that variant is unbounded below and is
/// kept only for comparison runs.
enum class LossVariant { standard, label0_flipped };

struct SmoothnessMeta {
    double L0 = 0.0;
    double L1 = 0.0;
};

/// One agent's differentiable objective. Evaluation is pure and reentrant;
/// data shards are shared immutably. Values and gradients saturate at
/// +-DBL_MAX instead of overflowing to inf.
class LocalObjective {
public:
    int dim() const { return dim_; }
    ObjectiveKind kind() const { return kind_; }

    /// Value and gradient at theta. Throws DimensionMismatch / NonFiniteInput.
    std::pair<double, Eigen::VectorXd> eval(const Eigen::VectorXd& theta) const;
    double value(const Eigen::VectorXd& theta) const { return eval(theta).first; }
    Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const { return eval(theta).second; }

    /// Same on a sample subset (data-driven kinds average over the given
    /// indices; synthetic kinds ignore them).
    std::pair<double, Eigen::VectorXd> eval_batch(const Eigen::VectorXd& theta,
                                                  std::span<const long> indices) const;

    /// Shard size for data-driven objectives, 0 otherwise.
    long n_samples() const;

    /// Exact infimum when it is known in closed form (synthetic kinds only).
    std::optional<double> known_minimum() const;

    std::optional<SmoothnessMeta> smoothness_meta;

    static LocalObjective logistic_lq(std::shared_ptr<const Shard> shard, double lambda, double p,
                                      LossVariant variant = LossVariant::standard);
    static LocalObjective quadratic(Eigen::MatrixXd Q, Eigen::VectorXd b, double c = 0.0);
    static LocalObjective power_norm(int dim, double lambda, double p);
    static LocalObjective composite(std::vector<LocalObjective> parts);

private:
    struct Logistic {
        std::shared_ptr<const Shard> shard;
        double lambda;
        double p;
        LossVariant variant;
    };
    struct Quadratic {
        Eigen::MatrixXd Q;
        Eigen::VectorXd b;
        double c;
    };
    struct PowerNorm {
        double lambda;
        double p;
    };
    struct Composite {
        std::vector<LocalObjective> parts;
    };

    LocalObjective() = default;

    ObjectiveKind kind_ = ObjectiveKind::quadratic;
    int dim_ = 0;
    std::variant<Logistic, Quadratic, PowerNorm, Composite> impl_;
};

struct SmoothnessEstimate {
    double L0_hat = 0.0;
    double L1_hat = 0.0;
    int n_samples = 0;
    double max_residual = 0.0; ///< max over samples of r - (L0 + L1 g); <= 0
    bool degenerate = false;   ///< all gradient norms equal, L1 unidentifiable
};

struct DissimilarityEstimate {
    double ell_hat = 1.0;
    double b_hat = 0.0;
    int n_samples = 0;
};

struct GapReport {
    double max_violation = 0.0;     ///< max of lhs - rhs over points
    double max_violation_rel = 0.0; ///< relative to 1 + |rhs|
    int worst_index = -1;
    int n_points = 0;
};

/// Minimal affine upper envelope y <= a + m x over a point cloud with
/// a, m >= 0: among feasible envelopes, minimizes a + m * mean(x), ties going
/// to the smaller slope. Solved exactly on the upper convex hull.
std::pair<double, double>
fit_affine_upper_envelope(std::span<const std::pair<double, double>> points);

/// Global (L0, L1) from per-agent constants:
/// L0 = (1/N) sum(L0_i + L1_i b), L1 = (ell/N) sum(L1_i).
std::pair<double, double>
combine_global_smoothness(const std::vector<std::pair<double, double>>& locals, double ell,
                          double b);

/// A = 1 + e^c - (e^c - 1)/c and B = (e^c - 1)/c; series limit (1, 1) below
/// c = 1e-8. Throws NonPositiveC.
std::pair<double, double> ab_constants(double c);

/// Samples gradient-difference ratios near `anchor` and along a short descent
/// trajectory, then fits the affine upper envelope r <= L0 + L1 * ||grad||.
/// Deterministic given the seed.
SmoothnessEstimate probe_smoothness(const LocalObjective& obj, const Eigen::VectorXd& anchor,
                                    double radius, int n_samples, std::uint64_t seed);

/// Fits dev <= (ell - 1) ||grad F|| + b over all (agent, point) pairs.
DissimilarityEstimate probe_dissimilarity(const std::vector<LocalObjective>& objs,
                                          const std::vector<Eigen::VectorXd>& sample_points);

/// Evaluates ||grad f||^2 <= 2 (L0 + 2 L1 ||grad f||)(f - f_min) at each
/// point. Throws UnknownMinimum when the objective has no closed-form
/// infimum.
GapReport suboptimality_gap_check(const LocalObjective& obj, double L0, double L1,
                                  const std::vector<Eigen::VectorXd>& points);

} // namespace cgt
