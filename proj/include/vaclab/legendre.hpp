#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "vaclab/grid.hpp"

namespace vaclab {

// Orthonormal shifted Legendre basis phi_l(x) = sqrt(2l+1) P_l(2x-1) on (0,1).
// Used for nodal <-> modal transforms, spectral differentiation and
// antiderivatives of smooth fields sampled on a Grid.
namespace legendre {

inline Eigen::MatrixXd vandermonde(const Eigen::ArrayXd& x, int degree) {
    Eigen::MatrixXd V(x.size(), degree + 1);
    for (long j = 0; j < x.size(); ++j) {
        double t = 2.0 * x(j) - 1.0;
        double p0 = 1.0, p1 = t;
        V(j, 0) = 1.0;
        if (degree >= 1) V(j, 1) = std::sqrt(3.0) * t;
        for (int l = 2; l <= degree; ++l) {
            double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
            p0 = p1;
            p1 = p2;
            V(j, l) = std::sqrt(2.0 * l + 1.0) * p2;
        }
    }
    return V;
}

// Modal projection matrix: c = P * v with c_l = sum_j w_j phi_l(x_j) v_j.
// Exact for fields of polynomial degree <= degree when 2*degree fits the
// grid's declared quadrature degree.
inline Eigen::MatrixXd projection(const Grid& g, int degree) {
    Eigen::MatrixXd V = vandermonde(g.nodes, degree);
    return V.transpose() * g.quad_weights.matrix().asDiagonal();
}

// Modal differentiation: phi_l' = sum_{m<l, l-m odd} 2 sqrt((2l+1)(2m+1)) phi_m.
inline Eigen::MatrixXd diff_modal(int degree) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(degree + 1, degree + 1);
    for (int l = 1; l <= degree; ++l)
        for (int m = l - 1; m >= 0; m -= 2)
            D(m, l) = 2.0 * std::sqrt((2.0 * l + 1.0) * (2.0 * m + 1.0));
    return D;
}

// Modal antiderivative with value 0 at x = 0.
// On [-1,1]: int P_l = (P_{l+1} - P_{l-1}) / (2l+1); the x -> 2x-1 map
// contributes a factor 1/2.
inline Eigen::VectorXd antiderivative_modal(const Eigen::VectorXd& c) {
    int n = static_cast<int>(c.size());  // degree n-1 input, degree n output
    // work in unnormalized P_l(2x-1) coefficients
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    for (int l = 0; l < n; ++l) {
        double u = c(l) * std::sqrt(2.0 * l + 1.0);
        if (l == 0) {
            // int_0^x P_0 = x = (P_1 + P_0)/2
            b(0) += 0.5 * u;
            b(1) += 0.5 * u;
        } else {
            // int_0^x P_l(2x'-1) dx' = (P_{l+1} - P_{l-1}) / (2(2l+1))
            double f = 0.5 * u / (2.0 * l + 1.0);
            b(l + 1) += f;
            b(l - 1) -= f;
        }
    }
    Eigen::VectorXd a(n + 1);
    for (int l = 0; l <= n; ++l) a(l) = b(l) / std::sqrt(2.0 * l + 1.0);
    return a;
}

inline double eval(const Eigen::VectorXd& c, double x) {
    double t = 2.0 * x - 1.0;
    double p0 = 1.0, p1 = t, s = c(0);
    if (c.size() > 1) s += c(1) * std::sqrt(3.0) * t;
    for (int l = 2; l < c.size(); ++l) {
        double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
        s += c(l) * std::sqrt(2.0 * l + 1.0) * p2;
    }
    return s;
}

// Dense nodal differentiation matrix of the stated projection degree.
inline Eigen::MatrixXd diff_matrix(const Grid& g, int degree, int order = 1) {
    Eigen::MatrixXd V = vandermonde(g.nodes, degree);
    Eigen::MatrixXd P = projection(g, degree);
    Eigen::MatrixXd D = diff_modal(degree);
    Eigen::MatrixXd M = P;
    for (int k = 0; k < order; ++k) M = D * M;
    return V * M;
}

}  // namespace legendre
}  // namespace vaclab
