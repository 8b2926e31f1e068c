#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "vaclab/errors.hpp"
#include "vaclab/initial_data.hpp"
#include "vaclab/legendre.hpp"

namespace vaclab {

// One time level of a flow trajectory, sampled at the grid nodes.
struct FlowState {
    double t = 0.0;
    Eigen::ArrayXd v, vx, vxx;
    Eigen::ArrayXd eta_x, eta_xx;
    double energy = 0.0;      // kinetic + internal
    double dissipated = 0.0;  // cumulative artificial-viscosity loss
};

struct Trajectory {
    GridPtr grid;
    double dt = 0.0;
    double kappa = 0.0;
    double gamma = 2.0;
    std::vector<FlowState> states;

    const FlowState& at_time(double t) const {
        require(!states.empty(), ErrorCode::precondition, "empty trajectory");
        double idx = t / dt;
        long i = std::lround(idx);
        require(std::abs(idx - static_cast<double>(i)) < 1e-8 && i >= 0 &&
                    i < static_cast<long>(states.size()),
                ErrorCode::precondition, "time is not a recorded level");
        return states[static_cast<size_t>(i)];
    }
    double final_time() const { return states.back().t; }
};

struct MolOptions {
    double dt = 1e-4;
    double final_time = 0.1;
    double corrector_tol = 1e-13;
    int max_corrector_iters = 60;
};

namespace detail {

// Pressure part of v_t in division-free form, valid for gamma in (1, 5]:
//   v_t = -(gamma/(gamma-1)) sigma' eta_x^{-gamma}
//         + gamma sigma eta_xx eta_x^{-gamma-1}    (sigma = rho0^{gamma-1})
inline Eigen::ArrayXd pressure_rhs(const DensityProfile& rho, double gamma,
                                   const Eigen::ArrayXd& eta_x, const Eigen::ArrayXd& eta_xx) {
    Eigen::ArrayXd wg = eta_x.pow(-gamma);
    return -(gamma / (gamma - 1.0)) * rho.dsigma_nodal * wg +
           gamma * rho.sigma_nodal * eta_xx * wg / eta_x;
}

inline double physical_energy(const Grid& g, const DensityProfile& rho, double gamma,
                              const Eigen::ArrayXd& v, const Eigen::ArrayXd& eta_x) {
    Eigen::ArrayXd kinetic = 0.5 * rho.rho0_nodal * v.square();
    Eigen::ArrayXd internal =
        rho.rho0_nodal.pow(gamma) * eta_x.pow(1.0 - gamma) / (gamma - 1.0);
    return g.integrate(kinetic + internal);
}

inline double dissipation_rate(const Grid& g, const DensityProfile& rho, double kappa,
                               const Eigen::ArrayXd& vx) {
    return kappa * g.integrate(rho.rho0_nodal.square() * vx.square());
}

}  // namespace detail

// Direct nodal method-of-lines integration of
//   v_t = pressure_rhs + kappa (rho0 v'' + 2 rho0' v'),
//   eta_x,t = v', eta_xx,t = v'',
// with the trapezoid rule. Each step is solved by a fixed-point corrector that
// treats the kappa operator implicitly through a prefactored LU; spatial
// derivatives are spectral (capped-degree Legendre differentiation).
inline Trajectory direct_mol_solve(const InitialData& data, double kappa, double gamma,
                                   const MolOptions& opt) {
    require(gamma > 1.0 && gamma <= 5.0, ErrorCode::gamma_out_of_range,
            "gamma must lie in (1, 5]");
    require(kappa >= 0.0, ErrorCode::precondition, "kappa must be nonnegative");
    const DensityProfile& rho = data.density;
    const Grid& g = *rho.grid;
    const long n = g.n_points();
    int degree = std::min(48, g.declared_degree / 2);
    Eigen::MatrixXd D1 = legendre::diff_matrix(g, degree, 1);
    Eigen::MatrixXd D2 = legendre::diff_matrix(g, degree, 2);
    Eigen::MatrixXd L = kappa * (rho.rho0_nodal.matrix().asDiagonal() * D2 +
                                 2.0 * rho.drho0_nodal.matrix().asDiagonal() * D1);
    Eigen::PartialPivLU<Eigen::MatrixXd> lhs(
        Eigen::MatrixXd::Identity(n, n) - 0.5 * opt.dt * L);

    Trajectory traj;
    traj.grid = rho.grid;
    traj.dt = opt.dt;
    traj.kappa = kappa;
    traj.gamma = gamma;

    FlowState s;
    s.t = 0.0;
    s.v = data.u0.values();
    s.vx = (D1 * s.v.matrix()).array();
    s.vxx = (D2 * s.v.matrix()).array();
    s.eta_x = Eigen::ArrayXd::Ones(n);
    s.eta_xx = Eigen::ArrayXd::Zero(n);
    s.energy = detail::physical_energy(g, rho, gamma, s.v, s.eta_x);
    s.dissipated = 0.0;
    traj.states.push_back(s);

    long n_steps = std::lround(opt.final_time / opt.dt);
    require(n_steps >= 1 && std::abs(n_steps * opt.dt - opt.final_time) < 1e-10,
            ErrorCode::precondition, "final_time must be a multiple of dt");

    for (long step = 0; step < n_steps; ++step) {
        const FlowState& s0 = traj.states.back();
        Eigen::ArrayXd rhs0 =
            detail::pressure_rhs(rho, gamma, s0.eta_x, s0.eta_xx) + (L * s0.v.matrix()).array();
        Eigen::ArrayXd base = s0.v + 0.5 * opt.dt * rhs0;

        FlowState s1;
        s1.v = s0.v;
        s1.vx = s0.vx;
        s1.vxx = s0.vxx;
        double scale = std::max(1.0, s0.v.abs().maxCoeff());
        bool converged = false;
        for (int it = 0; it < opt.max_corrector_iters; ++it) {
            s1.eta_x = s0.eta_x + 0.5 * opt.dt * (s0.vx + s1.vx);
            s1.eta_xx = s0.eta_xx + 0.5 * opt.dt * (s0.vxx + s1.vxx);
            Eigen::ArrayXd p1 = detail::pressure_rhs(rho, gamma, s1.eta_x, s1.eta_xx);
            Eigen::ArrayXd vnew = lhs.solve((base + 0.5 * opt.dt * p1).matrix()).array();
            double delta = (vnew - s1.v).abs().maxCoeff();
            s1.v = vnew;
            s1.vx = (D1 * s1.v.matrix()).array();
            s1.vxx = (D2 * s1.v.matrix()).array();
            if (delta <= opt.corrector_tol * scale) {
                converged = true;
                break;
            }
        }
        require(converged, ErrorCode::no_convergence, "trapezoid corrector stalled");
        s1.eta_x = s0.eta_x + 0.5 * opt.dt * (s0.vx + s1.vx);
        s1.eta_xx = s0.eta_xx + 0.5 * opt.dt * (s0.vxx + s1.vxx);
        require(s1.eta_x.minCoeff() >= 0.5 && s1.eta_x.maxCoeff() <= 1.5,
                ErrorCode::eta_range_violation, "eta_x left the interval [1/2, 3/2]");
        s1.t = s0.t + opt.dt;
        s1.energy = detail::physical_energy(g, rho, gamma, s1.v, s1.eta_x);
        s1.dissipated = s0.dissipated +
                        0.5 * opt.dt * (detail::dissipation_rate(g, rho, kappa, s0.vx) +
                                        detail::dissipation_rate(g, rho, kappa, s1.vx));
        traj.states.push_back(std::move(s1));
    }
    return traj;
}

}  // namespace vaclab
