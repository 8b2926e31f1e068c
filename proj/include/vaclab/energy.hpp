#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vaclab/initial_data.hpp"
#include "vaclab/jets.hpp"
#include "vaclab/mol.hpp"
#include "vaclab/norms.hpp"

namespace vaclab {

// Higher-order energy of a state:
//   E(t) = sum_{s=0..4} ||dt^s v||^2_{2-s/2} + sum_{s=0..2} ||rho0 dt^{2s} v||^2_{3-s}
//        + ||sqrt(rho0) dt dx^2 v||^2_0 + ||sqrt(rho0) dt^3 dx v||^2_0
struct EnergySnapshot {
    double t = 0.0;
    std::map<std::string, double> components;
    double total = 0.0;
};

// Same structure with the distance weight d(x) = min(x, 1-x) in place of rho0
// and, for gamma < 2, the extra boundary-weighted sum over a = 0..a0.
struct GammaEnergySnapshot {
    double t = 0.0;
    double gamma = 2.0;
    int a0 = 0;
    std::map<std::string, double> components;
    double total = 0.0;
};

inline int gamma_stack_order(double gamma) {
    require(gamma > 1.0, ErrorCode::gamma_out_of_range, "gamma must exceed 1");
    return static_cast<int>(std::ceil(1.0 / (gamma - 1.0))) - 1;
}

namespace detail {

inline std::vector<Eigen::ArrayXd> state_stack(const FlowState& s, const DensityProfile& rho,
                                               double kappa, int k_max) {
    const Grid& g = *rho.grid;
    int degree = std::min(48, g.declared_degree / 2);
    Eigen::MatrixXd D1 = legendre::diff_matrix(g, degree, 1);
    return time_derivative_stack(s.v, s.eta_x, s.eta_xx, rho, kappa, k_max, D1);
}

inline double sq(double x) { return x * x; }

}  // namespace detail

inline EnergySnapshot energy_snapshot(const FlowState& state, const DensityProfile& rho,
                                      double kappa) {
    auto stack = detail::state_stack(state, rho, kappa, 4);
    require(static_cast<int>(stack.size()) >= 5, ErrorCode::missing_derivative_stack,
            "time-derivative stack must reach order 4");
    const Grid& g = *rho.grid;
    EnergySnapshot e;
    e.t = state.t;

    std::vector<ScalarField> f;
    for (const auto& w : stack) f.push_back(ScalarField::from_values(rho.grid, w));

    for (int s = 0; s <= 4; ++s) {
        double order = 2.0 - 0.5 * s;
        std::string key = "dt" + std::to_string(s) + "_v_sq_H" + std::to_string(order).substr(0, 3);
        e.components[key] = detail::sq(sobolev_norm(f[static_cast<size_t>(s)], order));
    }
    for (int s = 0; s <= 2; ++s) {
        ScalarField wf = ScalarField::from_values(
            rho.grid, rho.rho0_nodal * stack[static_cast<size_t>(2 * s)]);
        std::string key = "rho_dt" + std::to_string(2 * s) + "_v_sq_H" + std::to_string(3 - s);
        e.components[key] = detail::sq(sobolev_norm(wf, static_cast<double>(3 - s)));
    }
    {
        Eigen::ArrayXd a = f[1].deriv_values(2);
        e.components["sqrt_rho_dt1_dxx_v_sq_L2"] = g.integrate(rho.rho0_nodal * a * a);
        Eigen::ArrayXd b = f[3].deriv_values(1);
        e.components["sqrt_rho_dt3_dx_v_sq_L2"] = g.integrate(rho.rho0_nodal * b * b);
    }
    for (const auto& [k, v] : e.components) e.total += v;
    return e;
}

inline GammaEnergySnapshot energy_gamma(const FlowState& state, const DensityProfile& rho,
                                        double kappa) {
    const double gamma = rho.gamma;
    GammaEnergySnapshot e;
    e.t = state.t;
    e.gamma = gamma;
    e.a0 = gamma_stack_order(gamma);
    require(e.a0 <= 8, ErrorCode::stack_depth_insufficient,
            "gamma too close to 1 for the computable derivative stack");
    auto stack = detail::state_stack(state, rho, kappa, 4 + e.a0);
    require(static_cast<int>(stack.size()) >= 5 + e.a0, ErrorCode::missing_derivative_stack,
            "time-derivative stack must reach order 4 + a0");
    const Grid& g = *rho.grid;
    Eigen::ArrayXd d = g.nodes.min(1.0 - g.nodes);

    std::vector<ScalarField> f;
    for (const auto& w : stack) f.push_back(ScalarField::from_values(rho.grid, w));

    for (int s = 0; s <= 4; ++s) {
        double order = 2.0 - 0.5 * s;
        std::string key = "dt" + std::to_string(s) + "_v_sq_H" + std::to_string(order).substr(0, 3);
        e.components[key] = detail::sq(sobolev_norm(f[static_cast<size_t>(s)], order));
    }
    for (int s = 0; s <= 2; ++s) {
        ScalarField wf =
            ScalarField::from_values(rho.grid, d * stack[static_cast<size_t>(2 * s)]);
        std::string key = "d_dt" + std::to_string(2 * s) + "_v_sq_H" + std::to_string(3 - s);
        e.components[key] = detail::sq(sobolev_norm(wf, static_cast<double>(3 - s)));
    }
    {
        Eigen::ArrayXd a = f[1].deriv_values(2);
        e.components["sqrt_d_dt1_dxx_v_sq_L2"] = g.integrate(d * a * a);
        Eigen::ArrayXd b = f[3].deriv_values(1);
        e.components["sqrt_d_dt3_dx_v_sq_L2"] = g.integrate(d * b * b);
    }
    for (int a = 0; a <= e.a0; ++a) {
        double p = 1.0 + 1.0 / (gamma - 1.0) - a;
        Eigen::ArrayXd w = f[static_cast<size_t>(4 + e.a0 - a)].deriv_values(1);
        std::string key = "dweight_a" + std::to_string(a) + "_dt" +
                          std::to_string(4 + e.a0 - a) + "_vx_sq_L2";
        e.components[key] = g.integrate(d.pow(p) * w * w);
    }
    for (const auto& [k, v] : e.components) e.total += v;
    return e;
}

// Verdict on the a-priori bound sup E <= 2 M0 along a trajectory of snapshots.
struct BoundReport {
    double M0 = 0.0;
    double sup_E = 0.0;
    double ratio = 0.0;
    std::optional<double> first_violation_t;
    double T_good = 0.0;  // largest horizon with sup E <= 2 M0
    double c0 = 0.0, c1 = 0.0;  // least-squares fit E(t) ~ c0 + c1 t
    double max_jump = 0.0;      // max |E(t+dt) - E(t)|
};

inline BoundReport check_bound(const std::vector<EnergySnapshot>& traj, double M0) {
    require(!traj.empty() && traj.front().t == 0.0, ErrorCode::precondition,
            "trajectory must start at t = 0");
    require(M0 > 0.0, ErrorCode::precondition, "M0 must be positive");
    BoundReport r;
    r.M0 = M0;
    double s0 = 0, s1 = 0, s2 = 0, sy = 0, sty = 0;
    bool good = true;
    for (size_t i = 0; i < traj.size(); ++i) {
        double E = traj[i].total, t = traj[i].t;
        r.sup_E = std::max(r.sup_E, E);
        if (E > 2.0 * M0 && !r.first_violation_t) r.first_violation_t = t;
        if (E > 2.0 * M0) good = false;
        if (good) r.T_good = t;
        if (i > 0) r.max_jump = std::max(r.max_jump, std::abs(E - traj[i - 1].total));
        s0 += 1.0;
        s1 += t;
        s2 += t * t;
        sy += E;
        sty += t * E;
    }
    r.ratio = r.sup_E / M0;
    double det = s0 * s2 - s1 * s1;
    if (det > 0.0) {
        r.c0 = (s2 * sy - s1 * sty) / det;
        r.c1 = (s0 * sty - s1 * sy) / det;
    } else {
        r.c0 = sy / s0;
    }
    return r;
}

// M0 (P = identity) and N0, the polynomial of initial norms with P = identity
// applied to the sum of squares of
//   ||sqrt(rho0) dt^5 v'(0)||_0, ||dt^4 v(0)||_1, ||dt^3 v(0)||_2,
//   ||dt^2 v(0)||_2, ||dt v(0)||_2, ||u0||_2.
struct InitialNorms {
    double M0 = 0.0;
    double N0 = 0.0;
};

inline InitialNorms initial_norms(const InitialData& data) {
    require(static_cast<int>(data.time_derivs.size()) >= 6,
            ErrorCode::missing_derivative_stack, "initial jet must reach order 5");
    const DensityProfile& rho = data.density;
    const Grid& g = *rho.grid;
    FlowState s;
    s.t = 0.0;
    s.v = data.u0.values();
    s.eta_x = Eigen::ArrayXd::Ones(g.n_points());
    s.eta_xx = Eigen::ArrayXd::Zero(g.n_points());
    InitialNorms n;
    n.M0 = energy_snapshot(s, rho, data.kappa_used).total;

    Eigen::ArrayXd w5x = data.dt_v(5).deriv_values(1);
    n.N0 = g.integrate(rho.rho0_nodal * w5x * w5x);
    n.N0 += detail::sq(sobolev_norm(data.dt_v(4), 1.0));
    for (int k = 3; k >= 1; --k) n.N0 += detail::sq(sobolev_norm(data.dt_v(k), 2.0));
    n.N0 += detail::sq(sobolev_norm(data.u0, 2.0));
    return n;
}

// Damped-transport monitor along a trajectory: with f the kappa-flux field
//   f = 2 (rho0 dt^2 v'' + 2 rho0' dt^2 v')
// and g = f + kappa f_t measured from the run, the a-priori structure gives
//   sup_t ||f||_0 <= max(||f(0)||_0, sup_t ||g||_0) (1 + tol).
struct MonitorReport {
    double sup_f = 0.0;
    double f_initial = 0.0;
    double sup_g = 0.0;
    double slack = 0.0;  // sup_f / max(f_initial, sup_g)
    bool satisfied = false;
};

inline MonitorReport damped_transport_monitor(const Trajectory& traj, const DensityProfile& rho,
                                              double tol = 0.05) {
    require(traj.states.size() >= 3, ErrorCode::precondition,
            "monitor needs at least three time levels");
    const Grid& g = *rho.grid;
    std::vector<Eigen::ArrayXd> fs;
    fs.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        auto stack = detail::state_stack(s, rho, traj.kappa, 2);
        ScalarField w = ScalarField::from_values(rho.grid, stack[2]);
        fs.push_back(2.0 * (rho.rho0_nodal * w.deriv_values(2) +
                            2.0 * rho.drho0_nodal * w.deriv_values(1)));
    }
    MonitorReport r;
    r.f_initial = std::sqrt(g.integrate(fs.front().square()));
    for (size_t i = 0; i < fs.size(); ++i) {
        r.sup_f = std::max(r.sup_f, std::sqrt(g.integrate(fs[i].square())));
        // centered/one-sided difference for f_t
        Eigen::ArrayXd ft;
        if (i == 0)
            ft = (fs[1] - fs[0]) / traj.dt;
        else if (i + 1 == fs.size())
            ft = (fs[i] - fs[i - 1]) / traj.dt;
        else
            ft = (fs[i + 1] - fs[i - 1]) / (2.0 * traj.dt);
        Eigen::ArrayXd gg = fs[i] + traj.kappa * ft;
        r.sup_g = std::max(r.sup_g, std::sqrt(g.integrate(gg.square())));
    }
    double bound = std::max(r.f_initial, r.sup_g);
    r.slack = r.sup_f / std::max(bound, 1e-300);
    r.satisfied = r.sup_f <= bound * (1.0 + tol);
    return r;
}

}  // namespace vaclab
