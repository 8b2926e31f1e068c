#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "vaclab/errors.hpp"
#include "vaclab/field.hpp"
#include "vaclab/grid.hpp"
#include "vaclab/sine_basis.hpp"

namespace vaclab {

inline double l2_inner(const ScalarField& f, const ScalarField& g) {
    return f.grid().integrate(f.values() * g.values());
}

inline double l2_norm(const ScalarField& f) { return std::sqrt(l2_inner(f, f)); }

// Sine coefficients of a nodal array against e_k = sqrt(2) sin(k pi x).
inline Eigen::VectorXd sine_coefficients(const Grid& g, const Eigen::ArrayXd& nodal, int k_max) {
    Eigen::VectorXd c(k_max);
    for (int k = 1; k <= k_max; ++k) {
        double s = 0.0;
        for (long j = 0; j < g.nodes.size(); ++j)
            s += g.quad_weights(j) * nodal(j) * SineBasis::eval(k, g.nodes(j));
        c(k - 1) = s;
    }
    return c;
}

namespace detail {

// Fractional-norm realization: spectral multiplier (1 + k^2 pi^2)^s on the
// sine coefficients of the endpoint-vanishing part, plus a closed-form norm
// of the linear interpolant of the endpoint values.
inline double fractional_norm_sq(const ScalarField& f, double s, int k_max) {
    double f0 = f.at_left(), f1 = f.at_right();
    Eigen::ArrayXd lifted =
        f.values() - (f0 + (f1 - f0) * f.grid().nodes);
    Eigen::VectorXd c = sine_coefficients(f.grid(), lifted, k_max);
    double total = 0.0;
    for (int k = 1; k <= k_max; ++k)
        total += std::pow(1.0 + k * M_PI * k * M_PI, s) * c(k - 1) * c(k - 1);
    // ||a + b x||_0^2 and H^1 norm of the lift in closed form
    double L0 = (f0 * f0 + f0 * f1 + f1 * f1) / 3.0;
    double H1 = L0 + (f1 - f0) * (f1 - f0);
    double lift_sq;
    if (s <= 0.0) lift_sq = L0;
    else if (s >= 1.0) lift_sq = H1;
    else lift_sq = (L0 > 0.0) ? std::pow(L0, 1.0 - s) * std::pow(H1, s) : 0.0;
    return total + lift_sq;
}

}  // namespace detail

// The H^s norm: integer s by derivatives and quadrature, fractional s through
// the multiplier realization on a lifted sine expansion.
inline double sobolev_norm(const ScalarField& f, double s, int k_max = 0) {
    require(s >= 0.0, ErrorCode::precondition, "norm order must be nonnegative");
    const Grid& g = f.grid();
    if (k_max <= 0) k_max = std::min(128, g.max_sine_modes);
    double si;
    if (std::modf(s, &si) == 0.0) {
        int m = static_cast<int>(si);
        require(m <= f.max_deriv(), ErrorCode::insufficient_smoothness,
                "requested derivative order exceeds field capability");
        double total = 0.0;
        for (int a = 0; a <= m; ++a) {
            Eigen::ArrayXd d = f.deriv_values(a);
            total += g.integrate(d * d);
        }
        return std::sqrt(total);
    }
    return std::sqrt(detail::fractional_norm_sq(f, s, k_max));
}

// (int weight^p (f^2 + f'^2))^{1/2}
inline double weighted_norm(const ScalarField& f, const ScalarField& weight, double power) {
    require((weight.values() > 0.0).all(), ErrorCode::nonpositive_weight_at_node,
            "weight must be positive at all grid nodes");
    Eigen::ArrayXd w = weight.values().pow(power);
    Eigen::ArrayXd d = f.deriv_values(1);
    return std::sqrt(f.grid().integrate(w * (f.values() * f.values() + d * d)));
}

// u/d with d(x) = min(x, 1-x). Returned as an analytic field when u is
// analytic (piecewise closure split at x = 1/2, matching the cutoff structure
// used with the distance function), nodal otherwise. Near an endpoint the
// direct quotient loses ~eps/d^3 digits in second derivatives, so the closure
// switches to dividing the endpoint Taylor series of u (the removable
// singularity made explicit), which is cancellation-free.
inline ScalarField hardy_quotient(const ScalarField& u, double h10_tol = 1e-8) {
    require(std::abs(u.at_left()) < h10_tol && std::abs(u.at_right()) < h10_tol,
            ErrorCode::not_in_h10, "field does not vanish at the endpoints");
    const double thresh = 1e-3;
    if (u.is_analytic()) {
        AnalyticFn a = u.analytic();
        AnalyticFn q = afn([a, thresh](const Taylor& t) -> Taylor {
            double x = t.value();
            bool left = x <= 0.5;
            double d = left ? x : 1.0 - x;
            if (d >= thresh) return left ? a.fn(t) / t : a.fn(t) / (1.0 - t);
            // u(x) = sum_j s_j w^j about the endpoint, w = x - x0; with
            // u(x0) = 0, u/d = sign * sum_{j>=1} s_j w^{j-1}, summed by Horner
            double x0 = left ? 0.0 : 1.0;
            int M = t.order() + 10;
            Taylor s = a.fn(Taylor::variable(x0, M));
            Taylor w = t - x0;
            Taylor acc = Taylor::constant(s[M], t.order());
            for (int j = M - 1; j >= 1; --j) acc = acc * w + s[j];
            return left ? acc : -acc;
        });
        return ScalarField::from_function(u.grid_ptr(), q, std::max(0, u.max_deriv() - 1));
    }
    Eigen::ArrayXd q(u.values().size());
    for (long j = 0; j < q.size(); ++j) {
        double x = u.grid().nodes(j);
        double d = dist_to_boundary(x);
        if (d < thresh)
            q(j) = (x <= 0.5 ? 1.0 : -1.0) * u.deriv_at(x <= 0.5 ? 0.5 * x : 0.5 * (1.0 + x), 1);
        else
            q(j) = u.values()(j) / d;
    }
    return ScalarField::from_values(u.grid_ptr(), q, u.spectral_degree());
}

// ||u/d||_{s-1} / ||u||_s, the quantity bounded by the Hardy constant.
inline double check_hardy_ratio(const ScalarField& u, int s) {
    require(s >= 1, ErrorCode::precondition, "s must be a positive integer");
    ScalarField q = hardy_quotient(u);
    return sobolev_norm(q, s - 1) / sobolev_norm(u, s);
}

// ||f||^2_{1-p/2} / int d^p (f^2 + f'^2); 0 for the zero field by convention.
inline double check_embedding(const ScalarField& f, int p) {
    require(p == 1 || p == 2, ErrorCode::precondition, "p must be 1 or 2");
    const Grid& g = f.grid();
    Eigen::ArrayXd d = g.nodes.min(1.0 - g.nodes);
    Eigen::ArrayXd df = f.deriv_values(1);
    double denom = g.integrate(d.pow(p) * (f.values() * f.values() + df * df));
    if (denom == 0.0) return 0.0;
    double s = 1.0 - 0.5 * p;
    double num = (p == 2) ? g.integrate(f.values() * f.values())
                          : detail::fractional_norm_sq(f, s, std::min(128, g.max_sine_modes));
    return num / denom;
}

}  // namespace vaclab
