#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "vaclab/errors.hpp"
#include "vaclab/field.hpp"
#include "vaclab/grid.hpp"

namespace vaclab {

// Dirichlet Laplacian eigenfunctions e_k(x) = sqrt(2) sin(k pi x) on I,
// the Galerkin basis. Mode index k starts at 1.
struct SineBasis {
    GridPtr grid;
    int n_modes = 0;
    Eigen::MatrixXd values;        // (n_points, n_modes) e_k at nodes
    Eigen::MatrixXd deriv_values;  // (n_points, n_modes) e_k'
    double orthonormality_defect = 0.0;

    double eigenvalue(int k) const { return k * M_PI * k * M_PI; }

    static double eval(int k, double x) { return std::sqrt(2.0) * std::sin(k * M_PI * x); }
    static double eval_deriv(int k, double x) {
        return std::sqrt(2.0) * k * M_PI * std::cos(k * M_PI * x);
    }

    ScalarField mode_field(int k) const {
        return field_from(grid, [k](const Taylor& t) {
            return std::sqrt(2.0) * sin(static_cast<double>(k) * M_PI * t);
        }, 20);
    }

    // Synthesis of a coefficient vector at the nodes.
    Eigen::ArrayXd synth(const Eigen::VectorXd& coeffs) const {
        return (values * coeffs).array();
    }
    Eigen::ArrayXd synth_deriv(const Eigen::VectorXd& coeffs) const {
        return (deriv_values * coeffs).array();
    }
    // e_k'(0) = sqrt(2) k pi; series derivative trace at the left endpoint.
    double deriv_trace_left(const Eigen::VectorXd& coeffs) const {
        double s = 0.0;
        for (int k = 1; k <= n_modes; ++k) s += coeffs(k - 1) * std::sqrt(2.0) * k * M_PI;
        return s;
    }

    // Plain-L2 analysis against the grid quadrature.
    Eigen::VectorXd analyze(const Eigen::ArrayXd& nodal) const {
        return values.transpose() * (nodal * grid->quad_weights).matrix();
    }
};

inline SineBasis build_sine_basis(int n_modes, GridPtr grid) {
    require(n_modes >= 1, ErrorCode::precondition, "n_modes must be >= 1");
    require(n_modes <= grid->max_sine_modes, ErrorCode::quadrature_degree_insufficient,
            "grid quadrature cannot resolve the requested mode count");
    SineBasis b;
    b.grid = grid;
    b.n_modes = n_modes;
    b.values.resize(grid->n_points(), n_modes);
    b.deriv_values.resize(grid->n_points(), n_modes);
    for (int k = 1; k <= n_modes; ++k)
        for (long j = 0; j < grid->nodes.size(); ++j) {
            b.values(j, k - 1) = SineBasis::eval(k, grid->nodes(j));
            b.deriv_values(j, k - 1) = SineBasis::eval_deriv(k, grid->nodes(j));
        }
    Eigen::MatrixXd gram =
        b.values.transpose() * grid->quad_weights.matrix().asDiagonal() * b.values;
    b.orthonormality_defect =
        (gram - Eigen::MatrixXd::Identity(n_modes, n_modes)).cwiseAbs().maxCoeff();
    require(b.orthonormality_defect <= 1e-10, ErrorCode::quadrature_degree_insufficient,
            "sine basis orthonormality defect exceeds 1e-10");
    return b;
}

}  // namespace vaclab
