#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "vaclab/density.hpp"
#include "vaclab/errors.hpp"
#include "vaclab/field.hpp"
#include "vaclab/jets.hpp"
#include "vaclab/legendre.hpp"

namespace vaclab {

// Validated (u0, rho0) pair with the initial time-derivative stack
// d_t^k v|_{t=0} computed from the evolution law.
struct InitialData {
    ScalarField u0;
    DensityProfile density;
    std::vector<ScalarField> time_derivs;  // k = 0 .. k_max
    double kappa_used = 0.0;

    const ScalarField& dt_v(int k) const {
        require(k < static_cast<int>(time_derivs.size()), ErrorCode::missing_derivative_stack,
                "time-derivative stack not populated to requested depth");
        return time_derivs[static_cast<size_t>(k)];
    }
};

// d_t^k v|_{t=0} for k = 0..k_max by recursive time differentiation of the
// evolution law at eta = identity. The degenerate kappa term is evaluated in
// the expanded form kappa (rho0 v'' + 2 rho0' v'), so no division by rho0
// occurs anywhere.
inline std::vector<ScalarField> initial_time_derivatives(const ScalarField& u0,
                                                         const DensityProfile& density,
                                                         double kappa, int k_max,
                                                         int jet_degree = 48) {
    require(k_max <= 5, ErrorCode::precondition, "jets beyond k = 5 are out of scope");
    require(u0.max_deriv() >= 2 * k_max, ErrorCode::insufficient_smoothness,
            "u0 lacks the spatial derivatives the recursion consumes");
    GridPtr g = u0.grid_ptr();
    int deg = std::min(jet_degree, g->declared_degree / 2);
    Eigen::MatrixXd D1 = legendre::diff_matrix(*g, deg);
    Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(g->n_points());
    Eigen::ArrayXd zeros = Eigen::ArrayXd::Zero(g->n_points());
    auto stack = time_derivative_stack(u0.values(), ones, zeros, density, kappa, k_max, D1);
    std::vector<ScalarField> out;
    out.push_back(u0);
    for (size_t k = 1; k < stack.size(); ++k)
        out.push_back(ScalarField::from_values(g, stack[k], deg));
    return out;
}

inline InitialData make_initial_data(ScalarField u0, DensityProfile density, double kappa,
                                     int k_max = 4) {
    InitialData d;
    d.u0 = u0;
    d.density = std::move(density);
    d.kappa_used = kappa;
    d.time_derivs = initial_time_derivatives(u0, d.density, kappa, k_max);
    return d;
}

namespace detail {

// Compactly supported polynomial bump (1-s^2)^4 on [-1,1], normalized.
inline double bump_kernel(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double u = 1.0 - s * s;
    double u4 = u * u * u * u;
    // int_{-1}^{1} (1-s^2)^4 ds = 256/315
    return u4 * 315.0 / 256.0;
}

// Convolution with the bump of width eps against a reflected extension:
// odd reflection preserves endpoint zeros exactly, even reflection preserves
// values. Derivatives of the mollification are mollifications of (extended)
// derivatives.
inline double mollified_deriv(const AnalyticFn& f, bool odd_extension, double eps, double x,
                              int m) {
    static const auto rule = [] {
        std::pair<std::vector<double>, std::vector<double>> p;
        gauss_legendre(8, p.first, p.second);
        return p;
    }();
    const auto& gx = rule.first;
    const auto& gw = rule.second;
    // m-th derivative of the reflected extension; each fold contributes a
    // (-1)^m chain-rule factor and, for odd extensions, an extra sign flip.
    std::function<double(double)> ext = [&](double y) -> double {
        if (y < 0.0 || y > 1.0) {
            double base = ext(y < 0.0 ? -y : 2.0 - y);
            double s = odd_extension ? -1.0 : 1.0;
            return s * ((m % 2) ? -base : base);
        }
        return f.deriv(y, m);
    };
    double total = 0.0;
    const int panels = 16;
    for (int p = 0; p < panels; ++p) {
        double a = x - eps + 2.0 * eps * p / panels;
        double b = a + 2.0 * eps / panels;
        for (size_t i = 0; i < gx.size(); ++i) {
            double y = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
            total += 0.5 * (b - a) * gw[i] * bump_kernel((x - y) / eps) / eps * ext(y);
        }
    }
    return total;
}

}  // namespace detail

// Smooth the pair (u0, rho0) by convolution with a compactly supported
// polynomial bump of width eps; rho0 by odd reflection (endpoint zeros are
// preserved exactly), u0 by even reflection. The vacuum conditions are
// re-validated on the smoothed profile.
inline InitialData mollify(const InitialData& data, double eps) {
    require(eps > 0.0 && eps < 0.25, ErrorCode::precondition,
            "mollifier width must lie in (0, 1/4) so reflections do not interact");
    GridPtr g = data.u0.grid_ptr();
    AnalyticFn uf = data.u0.analytic();
    AnalyticFn rf = data.density.rho0.analytic();
    auto smooth = [eps](AnalyticFn f, bool odd) {
        return afn([f, odd, eps](const Taylor& t) {
            int n = t.order();
            std::vector<double> c(static_cast<size_t>(n) + 1);
            double fact = 1.0;  // m!
            for (int m = 0; m <= n; ++m) {
                if (m >= 2) fact *= m;
                c[static_cast<size_t>(m)] = detail::mollified_deriv(f, odd, eps, t.value(), m) / fact;
            }
            return Taylor(std::move(c));
        });
    };
    ScalarField u0s = ScalarField::from_function(g, smooth(uf, false), 8);
    ScalarField rho0s = ScalarField::from_function(g, smooth(rf, true), 8);
    DensityProfile dens = make_density_from_field(g, rho0s, data.density.gamma,
                                                  ProfileKind::user_sampled,
                                                  data.density.amplitude);
    return make_initial_data(u0s, dens, data.kappa_used,
                             static_cast<int>(data.time_derivs.size()) - 1);
}

}  // namespace vaclab
