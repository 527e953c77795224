#pragma once

#include <Eigen/Dense>

namespace qcnf {

// Chebyshev-Lobatto collocation on [a, b]: nodes in increasing order,
// spectral differentiation, barycentric interpolation and cumulative
// integration measured from a base point.
class ChebGrid {
public:
    ChebGrid() = default;
    ChebGrid(double a, double b, int n, double base);

    int size() const { return n_; }
    double lo() const { return a_; }
    double hi() const { return b_; }
    double base() const { return base_; }
    const Eigen::VectorXd& nodes() const { return x_; }

    // d/dx acting on nodal values.
    const Eigen::MatrixXd& diff() const { return D_; }
    // (Q f)_i = integral from base() to x_i of the interpolant of f.
    const Eigen::MatrixXd& cumint() const { return Q_; }

    // Row of interpolation weights: f(x) = row(x) . f_nodes.
    Eigen::RowVectorXd interp_row(double x) const;

private:
    double a_ = 0.0, b_ = 1.0, base_ = 0.5;
    int n_ = 0;
    Eigen::VectorXd x_, t_, bw_;
    Eigen::MatrixXd D_, Q_;
};

} // namespace qcnf
