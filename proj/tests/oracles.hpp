#pragma once

// Test-only oracles, independent of the library's computation paths:
// dense eigendecomposition for spectra and Perron vectors, central finite
// differences for gradients, and brute-force loops for matrix reductions.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "cgt/objective.hpp"

namespace oracle {

/// Spectral radius from the full dense spectrum (QR algorithm).
inline double spectral_radius_dense(const Eigen::MatrixXd& M) {
    const Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Left eigenvector of R at the eigenvalue closest to 1, rescaled to sum N.
inline Eigen::VectorXd left_perron_dense(const Eigen::MatrixXd& R) {
    const Eigen::EigenSolver<Eigen::MatrixXd> es(R.transpose());
    int best = 0;
    double best_dist = std::abs(es.eigenvalues()(0) - std::complex<double>(1.0, 0.0));
    for (int i = 1; i < es.eigenvalues().size(); ++i) {
        const double dist = std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    Eigen::VectorXd u = es.eigenvectors().col(best).real();
    if (u.sum() < 0.0) u = -u;
    return u * (static_cast<double>(R.rows()) / u.sum());
}

/// Central finite-difference gradient with step h = 1e-5 (1 + ||theta||).
inline Eigen::VectorXd fd_gradient(const cgt::LocalObjective& obj, const Eigen::VectorXd& theta) {
    const double h = 1e-5 * (1.0 + theta.norm());
    Eigen::VectorXd g(theta.size());
    for (int i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd hi = theta, lo = theta;
        hi(i) += h;
        lo(i) -= h;
        g(i) = (obj.value(hi) - obj.value(lo)) / (2.0 * h);
    }
    return g;
}

/// Max relative gradient error against the finite-difference oracle.
inline double fd_gradient_error(const cgt::LocalObjective& obj, const Eigen::VectorXd& theta) {
    const Eigen::VectorXd g = obj.gradient(theta);
    const Eigen::VectorXd fd = fd_gradient(obj, theta);
    return (g - fd).norm() / (1.0 + fd.norm());
}

} // namespace oracle
