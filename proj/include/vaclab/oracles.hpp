#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "vaclab/errors.hpp"
#include "vaclab/grid.hpp"

namespace vaclab {

// Exact reference solution on the affine flow class eta = h(t) x + g(t) for
// rho0 = A x(1-x), u0 = beta x + delta, gamma = 2. Substitution into the
// momentum equation closes into the ODE pair
//   h'' = 4A/h^2 - 4 kappa A h',   g'' = -2A/h^2 + 2 kappa A h',
// integrated here with adaptive step-doubling RK4 to ~1e-12.
class AffineOracle {
public:
    AffineOracle(double A, double beta, double delta, double kappa)
        : A_(A), beta_(beta), delta_(delta), kappa_(kappa) {}

    struct State {
        double h, hp, g, gp;  // h, h', g, g'
    };

    State state_at(double t, double tol = 1e-12) const {
        State s{1.0, beta_, 0.0, delta_};
        if (t == 0.0) return s;
        require(t > 0.0, ErrorCode::precondition, "oracle integrates forward in time");
        double dt = std::min(1e-3, t);
        double time = 0.0;
        while (time < t - 1e-15) {
            double step = std::min(dt, t - time);
            State one = rk4_(s, step);
            State half = rk4_(rk4_(s, 0.5 * step), 0.5 * step);
            double err = std::abs(one.h - half.h) + std::abs(one.hp - half.hp) +
                         std::abs(one.g - half.g) + std::abs(one.gp - half.gp);
            if (err > tol && step > 1e-10) {
                dt = 0.5 * step;
                continue;
            }
            s = half;
            time += step;
            if (err < 0.01 * tol) dt = std::min(2.0 * step, 1e-2);
            require(s.h > 1e-8, ErrorCode::flow_collapse, "affine flow collapsed (h -> 0)");
        }
        return s;
    }

    // v(x, t) = h'(t) x + g'(t), eta_x = h(t)
    double v(double x, double t) const {
        State s = state_at(t);
        return s.hp * x + s.gp;
    }
    double eta_x(double t) const { return state_at(t).h; }

    // Taylor jets of h and g about time t, normalized as derivatives.
    // jet[k] = (d/dt)^k h (resp. g).
    void jets(double t, int order, std::vector<double>& hjet, std::vector<double>& gjet) const {
        State s = state_at(t);
        // power-series coefficients a_k = h^{(k)}/k!
        std::vector<double> h{s.h, s.hp}, g{s.g, s.gp};
        h.resize(static_cast<size_t>(order) + 1, 0.0);
        g.resize(static_cast<size_t>(order) + 1, 0.0);
        for (int k = 0; k + 2 <= order; ++k) {
            // r = h^{-2} series coefficient k from r * h * h = 1
            std::vector<double> r(static_cast<size_t>(k) + 1, 0.0);
            std::vector<double> h2(static_cast<size_t>(k) + 1, 0.0);
            for (int i = 0; i <= k; ++i)
                for (int j = 0; j + i <= k; ++j) h2[static_cast<size_t>(i + j)] += h[static_cast<size_t>(i)] * h[static_cast<size_t>(j)];
            for (int i = 0; i <= k; ++i) {
                double acc = (i == 0) ? 1.0 : 0.0;
                for (int j = 1; j <= i; ++j) acc -= h2[static_cast<size_t>(j)] * r[static_cast<size_t>(i - j)];
                r[static_cast<size_t>(i)] = acc / h2[0];
            }
            double hp_k = (k + 1) * h[static_cast<size_t>(k + 1)];  // (h')_k series coeff
            double hpp_k = 4.0 * A_ * r[static_cast<size_t>(k)] - 4.0 * kappa_ * A_ * hp_k;
            double gpp_k = -2.0 * A_ * r[static_cast<size_t>(k)] + 2.0 * kappa_ * A_ * hp_k;
            h[static_cast<size_t>(k + 2)] = hpp_k / ((k + 1) * (k + 2));
            g[static_cast<size_t>(k + 2)] = gpp_k / ((k + 1) * (k + 2));
        }
        hjet.assign(static_cast<size_t>(order) + 1, 0.0);
        gjet.assign(static_cast<size_t>(order) + 1, 0.0);
        double fact = 1.0;
        for (int k = 0; k <= order; ++k) {
            if (k >= 2) fact *= k;
            hjet[static_cast<size_t>(k)] = h[static_cast<size_t>(k)] * fact;
            gjet[static_cast<size_t>(k)] = g[static_cast<size_t>(k)] * fact;
        }
    }

    // kappa = 0 first integral (1/2) h'^2 + 4A/h.
    double first_integral(double t) const {
        State s = state_at(t);
        return 0.5 * s.hp * s.hp + 4.0 * A_ / s.h;
    }

    double A() const { return A_; }
    double kappa() const { return kappa_; }

private:
    State rk4_(const State& s, double dt) const {
        auto f = [this](const State& y) {
            State d;
            d.h = y.hp;
            d.g = y.gp;
            d.hp = 4.0 * A_ / (y.h * y.h) - 4.0 * kappa_ * A_ * y.hp;
            d.gp = -2.0 * A_ / (y.h * y.h) + 2.0 * kappa_ * A_ * y.hp;
            return d;
        };
        auto axpy = [](const State& y, double a, const State& d) {
            return State{y.h + a * d.h, y.hp + a * d.hp, y.g + a * d.g, y.gp + a * d.gp};
        };
        State k1 = f(s);
        State k2 = f(axpy(s, 0.5 * dt, k1));
        State k3 = f(axpy(s, 0.5 * dt, k2));
        State k4 = f(axpy(s, dt, k3));
        State r = s;
        r.h += dt / 6.0 * (k1.h + 2 * k2.h + 2 * k3.h + k4.h);
        r.hp += dt / 6.0 * (k1.hp + 2 * k2.hp + 2 * k3.hp + k4.hp);
        r.g += dt / 6.0 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g);
        r.gp += dt / 6.0 * (k1.gp + 2 * k2.gp + 2 * k3.gp + k4.gp);
        return r;
    }

    double A_, beta_, delta_, kappa_;
};

// Adaptive composite Gauss quadrature on (a, b): 10- vs 20-point panel
// comparison with recursive bisection; the returned error estimate is the
// accumulated panel defect.
struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

inline QuadratureResult adaptive_quadrature(const std::function<double(double)>& f, double a,
                                            double b, double tol = 1e-10, int max_depth = 40) {
    static const auto rules = [] {
        std::array<std::pair<std::vector<double>, std::vector<double>>, 2> r;
        gauss_legendre(10, r[0].first, r[0].second);
        gauss_legendre(20, r[1].first, r[1].second);
        return r;
    }();
    auto panel = [&](double lo, double hi, int which) {
        const auto& [x, w] = rules[static_cast<size_t>(which)];
        double s = 0.0;
        for (size_t i = 0; i < x.size(); ++i)
            s += 0.5 * (hi - lo) * w[i] * f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x[i]);
        return s;
    };
    std::function<QuadratureResult(double, double, double, int)> rec =
        [&](double lo, double hi, double t, int depth) -> QuadratureResult {
        double coarse = panel(lo, hi, 0);
        double fine = panel(lo, hi, 1);
        double err = std::abs(fine - coarse);
        // leaves at max depth are kept with their error estimate; the global
        // estimate is checked once at the top, so integrable endpoint
        // singularities (whose per-leaf error decays with the leaf size)
        // converge while non-integrable ones (scale-invariant leaf error) fail
        if (err <= t || err <= 1e-16 * std::abs(fine) || depth >= max_depth)
            return {fine, err};
        double mid = 0.5 * (lo + hi);
        QuadratureResult l = rec(lo, mid, 0.5 * t, depth + 1);
        QuadratureResult r = rec(mid, hi, 0.5 * t, depth + 1);
        return {l.value + r.value, l.error_estimate + r.error_estimate};
    };
    QuadratureResult total = rec(a, b, tol, 0);
    require(total.error_estimate <= 10.0 * tol, ErrorCode::quadrature_nonconvergence,
            "adaptive quadrature failed to converge");
    return total;
}

inline double quadrature_oracle(const std::function<double(double)>& f, double tol = 1e-10) {
    return adaptive_quadrature(f, 0.0, 1.0, tol).value;
}

}  // namespace vaclab
