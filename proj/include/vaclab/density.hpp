#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "vaclab/errors.hpp"
#include "vaclab/field.hpp"
#include "vaclab/grid.hpp"

namespace vaclab {

enum class ProfileKind { quadratic, power_adjusted, user_sampled };

// Initial density with validated physical-vacuum structure: rho0 > 0 inside,
// rho0^{gamma-1} vanishing linearly at both endpoints.
struct DensityProfile {
    GridPtr grid;
    ProfileKind kind = ProfileKind::quadratic;
    double gamma = 2.0;
    double amplitude = 1.0;  // the A of A*x(1-x)

    ScalarField rho0;    // density
    ScalarField sigma;   // rho0^{gamma-1}, the degenerate sound-speed profile
    Eigen::ArrayXd rho0_nodal, drho0_nodal;    // rho0 and rho0'
    Eigen::ArrayXd sigma_nodal, dsigma_nodal;  // sigma and sigma'

    double vacuum_slope_alpha = 0.0;  // largest admissible alpha for the near-boundary slope bound
    double interior_floor = 0.0;      // C_alpha on {d >= alpha}
    double slope_left = 0.0, slope_right = 0.0;  // |sigma'| at the endpoints

    ScalarField drho0() const { return rho0.derivative_field(1); }
    ScalarField d2rho0() const { return rho0.derivative_field(2); }
    ScalarField d3rho0() const { return rho0.derivative_field(3); }
};

namespace detail {

inline void validate_vacuum(DensityProfile& p) {
    const Grid& g = *p.grid;
    // rho0 > 0 at interior nodes
    for (long j = 0; j < g.nodes.size(); ++j)
        if (!(p.rho0_nodal(j) > 0.0)) {
            std::ostringstream os;
            os << "vacuum condition violated: rho0 <= 0 at node x = " << g.nodes(j);
            fail(ErrorCode::vacuum_condition_violated, os.str());
        }
    // sigma ~ dist near each endpoint: the ratio sigma/d must stabilize to a
    // positive one-sided slope across the two innermost nodes. This rejects
    // both sigma ~ d^p with p > 1 (degenerate slope) and p < 1 (blowup).
    long n = g.nodes.size();
    double rl0 = p.sigma_nodal(0) / g.nodes(0);
    double rl1 = p.sigma_nodal(1) / g.nodes(1);
    double rr0 = p.sigma_nodal(n - 1) / (1.0 - g.nodes(n - 1));
    double rr1 = p.sigma_nodal(n - 2) / (1.0 - g.nodes(n - 2));
    auto bad = [](double r0, double r1) {
        return !(r0 > 1e-8) || !(r1 > 0.0) || std::abs(r0 / r1 - 1.0) > 0.2;
    };
    if (bad(rl0, rl1) || bad(rr0, rr1)) {
        std::ostringstream os;
        os << "vacuum condition violated: rho0^{gamma-1} is not comparable to dist at "
           << (bad(rl0, rl1) ? "x = 0" : "x = 1") << " (sigma/d = "
           << (bad(rl0, rl1) ? rl0 : rr0) << ")";
        fail(ErrorCode::vacuum_condition_violated, os.str());
    }
    // two-point extrapolation of sigma/d to the endpoint removes the O(d)
    // bias of the innermost-node ratio (exact for polynomial sigma/d)
    double x0 = g.nodes(0), x1 = g.nodes(1);
    p.slope_left = rl0 + (rl0 - rl1) * x0 / (x1 - x0);
    double d0 = 1.0 - g.nodes(n - 1), d1 = 1.0 - g.nodes(n - 2);
    p.slope_right = rr0 + (rr0 - rr1) * d0 / (d1 - d0);
    // Largest alpha with |sigma'| >= half the boundary slope on {d <= alpha};
    // the unit constant of the slope bound is absorbed into the profile scale.
    double slope_min = 0.5 * std::min(p.slope_left, p.slope_right);
    double alpha = 0.5;
    for (long j = 0; j < g.nodes.size(); ++j) {
        double d = dist_to_boundary(g.nodes(j));
        if (std::abs(p.dsigma_nodal(j)) < slope_min) alpha = std::min(alpha, d);
    }
    p.vacuum_slope_alpha = alpha;
    double floor = std::numeric_limits<double>::infinity();
    for (long j = 0; j < g.nodes.size(); ++j)
        if (dist_to_boundary(g.nodes(j)) >= alpha) floor = std::min(floor, p.sigma_nodal(j));
    p.interior_floor = std::isfinite(floor) ? floor : 0.0;
    require(p.interior_floor > 0.0, ErrorCode::vacuum_condition_violated,
            "interior floor C_alpha is not positive");
}

}  // namespace detail

inline DensityProfile make_density_from_field(GridPtr grid, ScalarField rho0, double gamma,
                                              ProfileKind kind = ProfileKind::user_sampled,
                                              double amplitude = 1.0) {
    require(gamma > 1.0, ErrorCode::gamma_out_of_range, "gamma must exceed 1");
    DensityProfile p;
    p.grid = grid;
    p.kind = kind;
    p.gamma = gamma;
    p.amplitude = amplitude;
    p.rho0 = rho0;
    if (rho0.is_analytic()) {
        AnalyticFn rf = rho0.analytic();
        double gm = gamma;
        p.sigma = ScalarField::from_function(grid, afn([rf, gm](const Taylor& t) {
            return gm == 2.0 ? rf.fn(t) : pow(rf.fn(t), gm - 1.0);
        }), rho0.max_deriv());
    } else {
        p.sigma = ScalarField::from_values(grid, rho0.values().pow(gamma - 1.0));
    }
    p.rho0_nodal = p.rho0.values();
    p.drho0_nodal = p.rho0.deriv_values(1);
    p.sigma_nodal = p.sigma.values();
    p.dsigma_nodal = p.sigma.deriv_values(1);
    detail::validate_vacuum(p);
    return p;
}

// The shipped analytic profiles: quadratic A x(1-x), and the power-adjusted
// (x(1-x))^{1/(gamma-1)} whose sigma is exactly x(1-x).
inline DensityProfile make_density(ProfileKind kind, double gamma, GridPtr grid, double A = 1.0) {
    require(gamma > 1.0, ErrorCode::gamma_out_of_range, "gamma must exceed 1");
    ScalarField rho;
    switch (kind) {
        case ProfileKind::quadratic:
            rho = field_from(grid, [A](const Taylor& t) { return A * (t * (1.0 - t)); }, 20);
            break;
        case ProfileKind::power_adjusted: {
            double e = 1.0 / (gamma - 1.0);
            rho = field_from(grid, [A, e](const Taylor& t) {
                return pow(A * (t * (1.0 - t)), e);
            }, 12);
            break;
        }
        case ProfileKind::user_sampled:
            fail(ErrorCode::precondition, "user-sampled profiles go through make_density_from_field");
    }
    return make_density_from_field(grid, rho, gamma, kind, A);
}

}  // namespace vaclab
