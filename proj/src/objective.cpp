#include "cgt/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgt/rng.hpp"

namespace cgt {

namespace {

constexpr double kHuge = std::numeric_limits<double>::max();

double saturate(double x) {
    if (std::isinf(x)) return std::copysign(kHuge, x);
    return x;
}

void saturate_inplace(Eigen::VectorXd& g) {
    for (int i = 0; i < g.size(); ++i) g(i) = saturate(g(i));
}

/// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

/// Branch form of the sigmoid; no overflow for any finite z.
double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double sparse_dot(const Eigen::VectorXd& theta, const SparseSample& s) {
    double z = 0.0;
    for (const auto& [idx, val] : s.features) z += theta(idx - 1) * val;
    return z;
}

/// lambda * t^p with saturation; dv = d/dt factor lambda * p * t^(p-2) used
/// for the gradient lambda * p * t^(p-2) * theta.
std::pair<double, double> power_terms(double lambda, double p, double t) {
    if (lambda == 0.0) return {0.0, 0.0};
    const double value = saturate(lambda * std::pow(t, p));
    const double slope = t == 0.0 ? 0.0 : saturate(lambda * p * std::pow(t, p - 2.0));
    return {value, slope};
}

} // namespace

LocalObjective LocalObjective::logistic_lq(std::shared_ptr<const Shard> shard, double lambda,
                                           double p, LossVariant variant) {
    if (!shard || shard->samples.empty()) throw EmptyInput("logistic_lq: empty shard");
    if (lambda < 0.0) throw Error("logistic_lq: lambda must be >= 0");
    if (lambda > 0.0 && p < 2.0) throw Error("logistic_lq: p must be >= 2");
    LocalObjective obj;
    obj.kind_ = ObjectiveKind::logistic_lq;
    obj.dim_ = shard->dim;
    obj.impl_ = Logistic{std::move(shard), lambda, p, variant};
    return obj;
}

LocalObjective LocalObjective::quadratic(Eigen::MatrixXd Q, Eigen::VectorXd b, double c) {
    if (Q.rows() != Q.cols() || Q.rows() != b.size())
        throw DimensionMismatch("quadratic: Q and b sizes disagree");
    LocalObjective obj;
    obj.kind_ = ObjectiveKind::quadratic;
    obj.dim_ = static_cast<int>(b.size());
    Eigen::MatrixXd sym = 0.5 * (Q + Q.transpose());
    obj.impl_ = Quadratic{std::move(sym), std::move(b), c};
    return obj;
}

LocalObjective LocalObjective::power_norm(int dim, double lambda, double p) {
    if (dim < 1) throw DimensionMismatch("power_norm: dim must be >= 1");
    if (lambda < 0.0) throw Error("power_norm: lambda must be >= 0");
    if (p < 2.0) throw Error("power_norm: p must be >= 2");
    LocalObjective obj;
    obj.kind_ = ObjectiveKind::power_norm;
    obj.dim_ = dim;
    obj.impl_ = PowerNorm{lambda, p};
    return obj;
}

LocalObjective LocalObjective::composite(std::vector<LocalObjective> parts) {
    if (parts.empty()) throw EmptyInput("composite: no parts");
    for (const LocalObjective& part : parts)
        if (part.dim() != parts.front().dim())
            throw DimensionMismatch("composite: parts disagree on dimension");
    LocalObjective obj;
    obj.kind_ = ObjectiveKind::custom_composite;
    obj.dim_ = parts.front().dim();
    obj.impl_ = Composite{std::move(parts)};
    return obj;
}

std::pair<double, Eigen::VectorXd> LocalObjective::eval(const Eigen::VectorXd& theta) const {
    return eval_batch(theta, {});
}

std::pair<double, Eigen::VectorXd>
LocalObjective::eval_batch(const Eigen::VectorXd& theta, std::span<const long> indices) const {
    if (theta.size() != dim_) throw DimensionMismatch("eval: theta has wrong dimension");
    if (!theta.allFinite()) throw NonFiniteInput("eval: theta has non-finite entries");

    double value = 0.0;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim_);

    if (const auto* lg = std::get_if<Logistic>(&impl_)) {
        const auto& samples = lg->shard->samples;
        const long count = indices.empty() ? static_cast<long>(samples.size())
                                           : static_cast<long>(indices.size());
        const double inv = 1.0 / static_cast<double>(count);
        for (long t = 0; t < count; ++t) {
            const SparseSample& s = samples[static_cast<size_t>(indices.empty() ? t : indices[t])];
            const double z = sparse_dot(theta, s);
            double loss, dz;
            if (lg->variant == LossVariant::standard) {
                loss = softplus(z) - s.label * z;
                dz = sigmoid(z) - s.label;
            } else {
                const double sp = softplus(z);
                loss = s.label * sp + (1.0 - s.label) * (z - sp);
                dz = sigmoid(z) * (2.0 * s.label - 1.0) + (1.0 - s.label);
            }
            value += inv * loss;
            for (const auto& [idx, val] : s.features) grad(idx - 1) += inv * dz * val;
        }
        const auto [rv, rs] = power_terms(lg->lambda, lg->p, theta.norm());
        value = saturate(value + rv);
        grad += rs * theta;
    } else if (const auto* q = std::get_if<Quadratic>(&impl_)) {
        const Eigen::VectorXd Qt = q->Q * theta;
        value = saturate(0.5 * theta.dot(Qt) + q->b.dot(theta) + q->c);
        grad = Qt + q->b;
    } else if (const auto* pn = std::get_if<PowerNorm>(&impl_)) {
        const auto [rv, rs] = power_terms(pn->lambda, pn->p, theta.norm());
        value = rv;
        grad = rs * theta;
    } else {
        for (const LocalObjective& part : std::get<Composite>(impl_).parts) {
            auto [pv, pg] = part.eval_batch(theta, indices);
            value = saturate(value + pv);
            grad += pg;
        }
    }
    saturate_inplace(grad);
    return {value, std::move(grad)};
}

long LocalObjective::n_samples() const {
    if (const auto* lg = std::get_if<Logistic>(&impl_))
        return static_cast<long>(lg->shard->samples.size());
    if (const auto* comp = std::get_if<Composite>(&impl_))
        for (const LocalObjective& part : comp->parts)
            if (long n = part.n_samples(); n > 0) return n;
    return 0;
}

std::optional<double> LocalObjective::known_minimum() const {
    if (const auto* q = std::get_if<Quadratic>(&impl_)) {
        if (q->Q.isZero(0.0) && q->b.isZero(0.0)) return q->c;
        const Eigen::LLT<Eigen::MatrixXd> llt(q->Q);
        if (llt.info() != Eigen::Success) return std::nullopt;
        return q->c - 0.5 * q->b.dot(llt.solve(q->b));
    }
    if (std::holds_alternative<PowerNorm>(impl_)) return 0.0;
    return std::nullopt;
}

std::pair<double, double>
combine_global_smoothness(const std::vector<std::pair<double, double>>& locals, double ell,
                          double b) {
    if (locals.empty()) throw EmptyInput("combine_global_smoothness: no local constants");
    if (ell < 1.0) throw Error("combine_global_smoothness: ell must be >= 1");
    if (b < 0.0) throw Error("combine_global_smoothness: b must be >= 0");
    double sum0 = 0.0, sum1 = 0.0;
    for (const auto& [l0, l1] : locals) {
        if (l0 < 0.0 || l1 < 0.0)
            throw Error("combine_global_smoothness: local constants must be >= 0");
        sum0 += l0 + l1 * b;
        sum1 += l1;
    }
    const double n = static_cast<double>(locals.size());
    return {sum0 / n, ell * sum1 / n};
}

std::pair<double, double> ab_constants(double c) {
    if (c <= 0.0) throw NonPositiveC("ab_constants: c must be > 0");
    if (c < 1e-8) return {1.0, 1.0};
    const double B = std::expm1(c) / c;
    return {1.0 + std::exp(c) - B, B};
}

std::pair<double, double>
fit_affine_upper_envelope(std::span<const std::pair<double, double>> points) {
    if (points.empty()) throw EmptyInput("fit_affine_upper_envelope: no points");

    double mean_x = 0.0;
    for (const auto& [x, y] : points) mean_x += x;
    mean_x /= static_cast<double>(points.size());

    // Upper convex hull (concave majorant) by Andrew's monotone chain,
    // after collapsing equal-x points to their maximum y.
    std::vector<std::pair<double, double>> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> uniq;
    for (const auto& p : pts) {
        if (!uniq.empty() && uniq.back().first == p.first)
            uniq.back().second = std::max(uniq.back().second, p.second);
        else
            uniq.push_back(p);
    }
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : uniq) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double cross =
                (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
            if (cross >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    std::vector<double> slopes{0.0};
    for (std::size_t i = 1; i < hull.size(); ++i) {
        const double m =
            (hull[i].second - hull[i - 1].second) / (hull[i].first - hull[i - 1].first);
        if (m > 0.0 && std::isfinite(m)) slopes.push_back(m);
    }
    // Candidate with zero intercept: smallest slope whose origin line covers
    // every point.
    double through_origin = 0.0;
    bool origin_feasible = true;
    for (const auto& [x, y] : pts) {
        if (y <= 0.0) continue;
        if (x <= 0.0) {
            origin_feasible = false;
            break;
        }
        through_origin = std::max(through_origin, y / x);
    }
    if (origin_feasible && std::isfinite(through_origin)) slopes.push_back(through_origin);

    double best_a = 0.0, best_m = 0.0, best_obj = std::numeric_limits<double>::infinity();
    for (const double m : slopes) {
        double a = 0.0;
        for (const auto& [x, y] : pts) a = std::max(a, y - m * x);
        const double obj = a + m * mean_x;
        if (obj < best_obj - 1e-15 * (1.0 + std::abs(best_obj)) ||
            (obj <= best_obj + 1e-15 * (1.0 + std::abs(best_obj)) && m < best_m)) {
            best_obj = obj;
            best_a = a;
            best_m = m;
        }
    }
    return {best_a, best_m};
}

SmoothnessEstimate probe_smoothness(const LocalObjective& obj, const Eigen::VectorXd& anchor,
                                    double radius, int n_samples, std::uint64_t seed) {
    if (radius <= 0.0) throw Error("probe_smoothness: radius must be > 0");
    if (n_samples < 2) throw Error("probe_smoothness: need at least 2 samples");
    if (anchor.size() != obj.dim()) throw DimensionMismatch("probe_smoothness: anchor dimension");

    const int d = obj.dim();
    auto rng = rng::make(rng::derive(seed, 0x70726f6265ULL)); // "probe"
    const auto gauss_vec = [&rng, d]() {
        Eigen::VectorXd z(d);
        for (int i = 0; i < d; i += 2) {
            const auto [a, b] = rng::normal_pair(rng);
            z(i) = a;
            if (i + 1 < d) z(i + 1) = b;
        }
        return z;
    };

    std::vector<Eigen::VectorXd> centers;
    centers.reserve(static_cast<size_t>(n_samples));
    const int n_near = n_samples / 2;
    for (int j = 0; j < n_near; ++j)
        centers.push_back(anchor + (radius / std::sqrt(static_cast<double>(d))) * gauss_vec());
    // Short normalized descent from the anchor.
    Eigen::VectorXd walker = anchor;
    const int n_traj = n_samples - n_near;
    const double eta = radius / std::max(1, n_traj);
    for (int j = 0; j < n_traj; ++j) {
        centers.push_back(walker);
        const Eigen::VectorXd g = obj.gradient(walker);
        walker -= (eta / (1.0 + g.norm())) * g;
    }

    std::vector<std::pair<double, double>> points;
    points.reserve(centers.size());
    for (const Eigen::VectorXd& c : centers) {
        const double h = 1e-3 * radius;
        Eigen::VectorXd dir = gauss_vec();
        const double dn = dir.norm();
        if (dn == 0.0) continue;
        dir *= h / dn;
        const Eigen::VectorXd g0 = obj.gradient(c);
        const Eigen::VectorXd g1 = obj.gradient(c + dir);
        const double ratio = (g1 - g0).norm() / h;
        if (!std::isfinite(ratio) || !std::isfinite(g0.norm())) continue;
        points.emplace_back(g0.norm(), ratio);
    }
    if (points.size() < 2) throw Error("probe_smoothness: too few usable samples");

    SmoothnessEstimate est;
    est.n_samples = static_cast<int>(points.size());

    double min_g = points.front().first, max_g = min_g;
    for (const auto& [g, r] : points) {
        min_g = std::min(min_g, g);
        max_g = std::max(max_g, g);
    }
    if (max_g - min_g <= 1e-12 * (1.0 + max_g)) {
        est.degenerate = true;
        est.L1_hat = 0.0;
        est.L0_hat = 0.0;
        for (const auto& [g, r] : points) est.L0_hat = std::max(est.L0_hat, r);
    } else {
        std::tie(est.L0_hat, est.L1_hat) = fit_affine_upper_envelope(points);
    }
    est.max_residual = -std::numeric_limits<double>::infinity();
    for (const auto& [g, r] : points)
        est.max_residual = std::max(est.max_residual, r - (est.L0_hat + est.L1_hat * g));
    return est;
}

DissimilarityEstimate probe_dissimilarity(const std::vector<LocalObjective>& objs,
                                          const std::vector<Eigen::VectorXd>& sample_points) {
    if (objs.empty()) throw EmptyInput("probe_dissimilarity: no objectives");
    if (sample_points.empty()) throw EmptyInput("probe_dissimilarity: no sample points");
    const int d = objs.front().dim();
    for (const LocalObjective& o : objs)
        if (o.dim() != d) throw DimensionMismatch("probe_dissimilarity: objective dimensions");

    std::vector<std::pair<double, double>> points;
    points.reserve(objs.size() * sample_points.size());
    double scale = 0.0;
    for (const Eigen::VectorXd& theta : sample_points) {
        if (theta.size() != d) throw DimensionMismatch("probe_dissimilarity: point dimension");
        std::vector<Eigen::VectorXd> grads;
        grads.reserve(objs.size());
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
        for (const LocalObjective& o : objs) {
            grads.push_back(o.gradient(theta));
            mean += grads.back();
        }
        mean /= static_cast<double>(objs.size());
        const double gf = mean.norm();
        for (const Eigen::VectorXd& g : grads) {
            const double dev = (g - mean).norm();
            points.emplace_back(gf, dev);
            scale = std::max({scale, gf, dev});
        }
    }

    const auto [b_fit, slope] = fit_affine_upper_envelope(points);
    DissimilarityEstimate est;
    est.n_samples = static_cast<int>(sample_points.size());
    est.ell_hat = 1.0 + slope;
    est.b_hat = std::max(b_fit, 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale));
    return est;
}

GapReport suboptimality_gap_check(const LocalObjective& obj, double L0, double L1,
                                  const std::vector<Eigen::VectorXd>& points) {
    const std::optional<double> fmin = obj.known_minimum();
    if (!fmin) throw UnknownMinimum("suboptimality_gap_check: objective has no closed-form infimum");
    GapReport report;
    report.n_points = static_cast<int>(points.size());
    report.max_violation = -std::numeric_limits<double>::infinity();
    report.max_violation_rel = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < report.n_points; ++i) {
        const auto [value, grad] = obj.eval(points[static_cast<size_t>(i)]);
        const double gn = grad.norm();
        const double rhs = 2.0 * (L0 + 2.0 * L1 * gn) * (value - *fmin);
        const double violation = gn * gn - rhs;
        const double rel = violation / (1.0 + std::abs(rhs));
        if (rel > report.max_violation_rel) {
            report.max_violation_rel = rel;
            report.max_violation = violation;
            report.worst_index = i;
        }
    }
    return report;
}

} // namespace cgt
