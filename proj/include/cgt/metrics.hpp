#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgt/algo.hpp"

namespace cgt {

/// One per-iteration metrics row. Loss and gradient are always evaluated
/// full-batch at the averaged iterate, also in minibatch training mode.
struct TrajectoryRecord {
    long k = 0;
    double loss_avg = 0.0;          ///< F(xbar)
    double grad_norm_avg = 0.0;     ///< ||grad F(xbar)||
    double consensus_err_sq = 0.0;  ///< ||x - 1 xbar^T||_F^2
    double tracking_err_sq = 0.0;   ///< ||y - v ybar^T||_F^2
    double max_local_step = 0.0;    ///< max_i ||alpha_i^k y_i^k||
    double min_grad_so_far = 0.0;
    double loss_local_mean = 0.0;   ///< (1/N) sum_i f_i(x_i); optional column
};

/// xbar = (1/N) u^T x.
Eigen::VectorXd averaged_iterate(const Eigen::MatrixXd& x, const Eigen::VectorXd& u);

/// Squared Frobenius norm of x - 1 xbar^T.
double consensus_error(const Eigen::MatrixXd& x, const Eigen::VectorXd& u);

/// Squared Frobenius norm of y - v ybar^T with ybar = (1/N) 1^T y.
double tracking_error(const Eigen::MatrixXd& y, const Eigen::VectorXd& v);

/// Computes every TrajectoryRecord field for the current state;
/// min_grad_so_far is set to the current grad_norm_avg (the caller folds the
/// running minimum).
TrajectoryRecord record_step(const NetworkState& state, const MixingPair& mix,
                             const std::vector<LocalObjective>& objs, const AlgoConfig& cfg);

/// ||1^T y - sum_i grad f_i(x_i)|| for the full-batch conservation check.
double tracking_conservation_gap(const NetworkState& state,
                                 const std::vector<LocalObjective>& objs, int threads = 1);

/// CSV sink with the pinned header, 17-significant-digit floats and LF line
/// endings; output is byte-stable for identical configs.
class CsvWriter {
public:
    explicit CsvWriter(bool with_local_loss = false) : with_local_loss_(with_local_loss) {}

    std::string header() const;
    std::string format_row(const TrajectoryRecord& rec) const;

    void write_header(std::ostream& out) const;
    void write_row(std::ostream& out, const TrajectoryRecord& rec) const;

private:
    bool with_local_loss_;
};

} // namespace cgt
