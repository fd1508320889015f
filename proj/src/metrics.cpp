#include "cgt/metrics.hpp"

#include <cstdio>
#include <ostream>

#include "cgt/parallel.hpp"

namespace cgt {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

Eigen::VectorXd averaged_iterate(const Eigen::MatrixXd& x, const Eigen::VectorXd& u) {
    if (u.size() != x.rows()) throw DimensionMismatch("averaged_iterate: u length");
    return (x.transpose() * u) / static_cast<double>(x.rows());
}

double consensus_error(const Eigen::MatrixXd& x, const Eigen::VectorXd& u) {
    const Eigen::VectorXd xbar = averaged_iterate(x, u);
    return (x - Eigen::VectorXd::Ones(x.rows()) * xbar.transpose()).squaredNorm();
}

double tracking_error(const Eigen::MatrixXd& y, const Eigen::VectorXd& v) {
    if (v.size() != y.rows()) throw DimensionMismatch("tracking_error: v length");
    const Eigen::VectorXd ybar = y.colwise().sum() / static_cast<double>(y.rows());
    return (y - v * ybar.transpose()).squaredNorm();
}

TrajectoryRecord record_step(const NetworkState& state, const MixingPair& mix,
                             const std::vector<LocalObjective>& objs, const AlgoConfig& cfg) {
    const int n = mix.n_agents;
    TrajectoryRecord rec;
    rec.k = state.k;

    const Eigen::VectorXd xbar = averaged_iterate(state.x, mix.u);

    // F and grad F at xbar, always full-batch; evaluated per agent (possibly
    // in parallel) and combined in fixed agent order.
    std::vector<double> values(static_cast<size_t>(n));
    Eigen::MatrixXd grads(n, state.x.cols());
    std::vector<double> local_values(static_cast<size_t>(n));
    for_each_agent(cfg.threads, n, [&](int i) {
        const auto [v, g] = objs[static_cast<size_t>(i)].eval(xbar);
        values[static_cast<size_t>(i)] = v;
        grads.row(i) = g;
        local_values[static_cast<size_t>(i)] =
            objs[static_cast<size_t>(i)].value(state.x.row(i).transpose());
    });
    double loss = 0.0, local_loss = 0.0;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(state.x.cols());
    for (int i = 0; i < n; ++i) {
        loss += values[static_cast<size_t>(i)];
        local_loss += local_values[static_cast<size_t>(i)];
        grad += grads.row(i).transpose();
    }
    const double invn = 1.0 / static_cast<double>(n);
    rec.loss_avg = loss * invn;
    rec.loss_local_mean = local_loss * invn;
    rec.grad_norm_avg = (grad * invn).norm();

    rec.consensus_err_sq = consensus_error(state.x, mix.u);
    rec.tracking_err_sq = tracking_error(state.y, mix.v);
    rec.max_local_step = local_step_norms(state, objs, cfg).maxCoeff();
    rec.min_grad_so_far = rec.grad_norm_avg;
    return rec;
}

double tracking_conservation_gap(const NetworkState& state,
                                 const std::vector<LocalObjective>& objs, int threads) {
    const int n = static_cast<int>(objs.size());
    Eigen::MatrixXd grads(n, state.x.cols());
    for_each_agent(threads, n, [&](int i) {
        grads.row(i) = objs[static_cast<size_t>(i)].gradient(state.x.row(i).transpose());
    });
    const Eigen::VectorXd column_sum_y = state.y.colwise().sum();
    const Eigen::VectorXd grad_sum = grads.colwise().sum();
    return (column_sum_y - grad_sum).norm();
}

std::string CsvWriter::header() const {
    std::string h = "k,loss_avg,grad_norm_avg,consensus_err_sq,tracking_err_sq,max_local_step,"
                    "min_grad_so_far";
    if (with_local_loss_) h += ",loss_local_mean";
    return h;
}

std::string CsvWriter::format_row(const TrajectoryRecord& rec) const {
    std::string row = std::to_string(rec.k);
    for (const double v : {rec.loss_avg, rec.grad_norm_avg, rec.consensus_err_sq,
                           rec.tracking_err_sq, rec.max_local_step, rec.min_grad_so_far}) {
        row += ',';
        row += fmt17(v);
    }
    if (with_local_loss_) {
        row += ',';
        row += fmt17(rec.loss_local_mean);
    }
    return row;
}

void CsvWriter::write_header(std::ostream& out) const { out << header() << '\n'; }

void CsvWriter::write_row(std::ostream& out, const TrajectoryRecord& rec) const {
    out << format_row(rec) << '\n';
}

} // namespace cgt
