#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "vaclab/galerkin.hpp"
#include "vaclab/initial_data.hpp"
#include "vaclab/mol.hpp"

namespace vaclab {

struct PicardOptions {
    int n_modes = 32;
    double dt = 1e-4;
    double final_time = 0.1;
    double tol = 1e-10;  // +inf returns the first iterate as converged
    int max_iters = 60;
    int max_halvings = 8;
};

struct PicardTrace {
    std::vector<double> residuals;  // one relative H2-type defect per sweep
    int iterations = 0;
    int halvings = 0;
    double final_time = 0.0;
    bool converged = false;
};

struct PicardResult {
    Trajectory trajectory;
    PicardTrace trace;
};

// Contraction construction for the gamma = 2 kappa-problem: freeze a velocity
// iterate vbar, form its flow map etabar by time integration, solve the linear
// degenerate parabolic problem for X = rho0 v' against etabar with the sine
// Galerkin system, reconstruct v, and repeat. The first iterate is the initial
// velocity held constant in time. Three consecutive defect growths trigger a
// halving of the time horizon and a restart.
inline PicardResult picard_solve(const InitialData& data, double kappa,
                                 const PicardOptions& opt) {
    const DensityProfile& rho = data.density;
    const Grid& g = *rho.grid;
    const long npts = g.n_points();
    GalerkinSystem sys = assemble_galerkin(rho, kappa, opt.n_modes);
    LinearXStepper stepper(sys, opt.dt);

    Eigen::ArrayXd u0 = data.u0.values();
    Eigen::ArrayXd u0x = data.u0.deriv_values(1);
    Eigen::ArrayXd u0xx = data.u0.deriv_values(2);
    double u0_left = data.u0.at_left();
    double u0x_left = data.u0.deriv_at(0.0, 1);

    auto h2_defect = [&](const Eigen::ArrayXd& a, const Eigen::ArrayXd& ax,
                         const Eigen::ArrayXd& axx, const Eigen::ArrayXd& b,
                         const Eigen::ArrayXd& bx, const Eigen::ArrayXd& bxx) {
        return std::sqrt(g.integrate((a - b).square() + (ax - bx).square() +
                                     (axx - bxx).square()));
    };

    PicardTrace trace;
    double T = opt.final_time;

    for (int halving = 0;; ++halving) {
        long N = std::lround(T / opt.dt);
        require(N >= 2, ErrorCode::no_convergence,
                "fixed-point horizon collapsed below two time steps");
        require(std::abs(N * opt.dt - T) < 1e-10, ErrorCode::precondition,
                "final_time must be a multiple of dt");

        std::vector<Eigen::ArrayXd> v(N + 1, u0), vx(N + 1, u0x), vxx(N + 1, u0xx);
        std::vector<double> vx_left(N + 1, u0x_left);
        std::vector<Eigen::VectorXd> lambda(N + 1);
        std::vector<double> f(N + 1, 0.0);

        double prev_res = std::numeric_limits<double>::infinity();
        int growth = 0;
        bool diverged = false;
        trace.residuals.clear();
        trace.converged = false;

        for (int iter = 1; iter <= opt.max_iters; ++iter) {
            // flow map of the frozen iterate, by cumulative trapezoid
            std::vector<Eigen::ArrayXd> etax(N + 1), etaxx(N + 1);
            std::vector<double> etax_left(N + 1);
            etax[0] = Eigen::ArrayXd::Ones(npts);
            etaxx[0] = Eigen::ArrayXd::Zero(npts);
            etax_left[0] = 1.0;
            for (long l = 0; l < N; ++l) {
                etax[l + 1] = etax[l] + 0.5 * opt.dt * (vx[l] + vx[l + 1]);
                etaxx[l + 1] = etaxx[l] + 0.5 * opt.dt * (vxx[l] + vxx[l + 1]);
                etax_left[l + 1] = etax_left[l] + 0.5 * opt.dt * (vx_left[l] + vx_left[l + 1]);
            }
            require(etax[N].minCoeff() >= 0.5 && etax[N].maxCoeff() <= 1.5,
                    ErrorCode::eta_range_violation, "frozen flow map left [1/2, 3/2]");

            // linear X solve against the frozen flow map
            lambda[0] = sys.initial_coefficients(u0x);
            Eigen::VectorXd F0 = sys.forcing(etax[0], etaxx[0]);
            for (long l = 0; l < N; ++l) {
                Eigen::VectorXd F1 = sys.forcing(etax[l + 1], etaxx[l + 1]);
                lambda[l + 1] = stepper.step(lambda[l], F0, F1);
                F0 = F1;
            }

            // boundary drift f:  f' = -2 rho0'(0)/etabar_x(0)^2 + 2 kappa X'(0)
            f[0] = u0_left;
            auto fprime = [&](long l) {
                return -2.0 * sys.slope_left / (etax_left[l] * etax_left[l]) +
                       kappa * sys.flux_trace_left(lambda[l]);
            };
            for (long l = 0; l < N; ++l)
                f[l + 1] = f[l] + 0.5 * opt.dt * (fprime(l) + fprime(l + 1));

            // reconstruct and measure the sweep defect
            double res = 0.0, scale = 0.0;
            for (long l = 0; l <= N; ++l) {
                ReconstructedVelocity r = reconstruct_velocity(sys, lambda[l], f[l]);
                res = std::max(res, h2_defect(r.v, r.vx, r.vxx, v[l], vx[l], vxx[l]));
                scale = std::max(scale, std::sqrt(g.integrate(
                                            r.v.square() + r.vx.square() + r.vxx.square())));
                v[l] = std::move(r.v);
                vx[l] = std::move(r.vx);
                vxx[l] = std::move(r.vxx);
                vx_left[l] = r.vx_left;
            }
            double rel = res / std::max(scale, 1e-30);
            trace.residuals.push_back(rel);
            trace.iterations = iter;

            if (rel <= opt.tol) {
                trace.converged = true;
                break;
            }
            growth = (rel >= prev_res && rel > 1e3 * opt.tol) ? growth + 1 : 0;
            prev_res = rel;
            if (growth >= 3) {
                diverged = true;
                break;
            }
        }

        if (diverged) {
            require(halving < opt.max_halvings, ErrorCode::no_convergence,
                    "fixed-point sweeps kept diverging after repeated horizon halvings");
            T *= 0.5;
            trace.halvings = halving + 1;
            continue;
        }
        require(trace.converged, ErrorCode::no_convergence,
                "fixed-point iteration did not reach tolerance");
        trace.final_time = T;

        // package the converged iterate with its own self-consistent flow map
        Trajectory traj;
        traj.grid = rho.grid;
        traj.dt = opt.dt;
        traj.kappa = kappa;
        traj.gamma = 2.0;
        traj.states.resize(static_cast<size_t>(N) + 1);
        Eigen::ArrayXd etax = Eigen::ArrayXd::Ones(npts);
        Eigen::ArrayXd etaxx = Eigen::ArrayXd::Zero(npts);
        for (long l = 0; l <= N; ++l) {
            if (l > 0) {
                etax += 0.5 * opt.dt * (vx[l - 1] + vx[l]);
                etaxx += 0.5 * opt.dt * (vxx[l - 1] + vxx[l]);
            }
            FlowState& s = traj.states[static_cast<size_t>(l)];
            s.t = l * opt.dt;
            s.v = v[l];
            s.vx = vx[l];
            s.vxx = vxx[l];
            s.eta_x = etax;
            s.eta_xx = etaxx;
            s.energy = detail::physical_energy(g, rho, 2.0, s.v, s.eta_x);
            double rate = detail::dissipation_rate(g, rho, kappa, s.vx);
            if (l == 0) {
                s.dissipated = 0.0;
            } else {
                double prev_rate =
                    detail::dissipation_rate(g, rho, kappa, traj.states[l - 1].vx);
                s.dissipated = traj.states[l - 1].dissipated + 0.5 * opt.dt * (prev_rate + rate);
            }
        }
        return {std::move(traj), std::move(trace)};
    }
}

}  // namespace vaclab
