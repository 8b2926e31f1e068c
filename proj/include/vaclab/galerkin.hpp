#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "vaclab/density.hpp"
#include "vaclab/errors.hpp"
#include "vaclab/legendre.hpp"
#include "vaclab/sine_basis.hpp"

namespace vaclab {

// Sine-Galerkin discretization of the linear degenerate parabolic problem for
// X = rho0 v':
//   X_t / rho0 - kappa [ (1/rho0)(rho0 X)' ]' = -G',   X = 0 on the boundary,
// with G = (2/eta_x)(rho0/eta_x)' built from a frozen flow map. Expanding
// X = sum_i lambda_i e_i and testing with e_k gives
//   M lambda' + kappa K lambda = F(t),
//   M_ki = int e_k e_i / rho0,
//   K_ki = int (e_i' + (rho0'/rho0) e_i) e_k',
//   F_k  = int G e_k'.
// M is symmetric positive definite; integrals use the grid quadrature, where
// both e_i/rho0 ratios are finite at interior nodes.
struct GalerkinSystem {
    SineBasis basis;
    double kappa = 0.0;
    Eigen::ArrayXd rho0, drho0;  // nodal density data
    double slope_left = 0.0;     // rho0'(0)
    Eigen::MatrixXd M, K;
    Eigen::LLT<Eigen::MatrixXd> M_chol;

    int n_modes() const { return basis.n_modes; }

    // Weak forcing vector from nodal flow-map derivatives.
    Eigen::VectorXd forcing(const Eigen::ArrayXd& eta_x, const Eigen::ArrayXd& eta_xx) const {
        Eigen::ArrayXd g = 2.0 * drho0 / eta_x.square() - 2.0 * rho0 * eta_xx / eta_x.cube();
        return basis.deriv_values.transpose() * (g * basis.grid->quad_weights).matrix();
    }

    // Coefficients of X0 = rho0 u0' in the weighted expansion:
    // M lambda0 = b, b_k = int e_k X0 / rho0 = int e_k u0'.
    Eigen::VectorXd initial_coefficients(const Eigen::ArrayXd& u0x) const {
        Eigen::VectorXd b =
            basis.values.transpose() * (u0x * basis.grid->quad_weights).matrix();
        return M_chol.solve(b);
    }

    // Trace of the full kappa flux at x = 0: (1/rho0)(rho0 X)'|_0 = 2 X'(0).
    double flux_trace_left(const Eigen::VectorXd& lambda) const {
        return 2.0 * basis.deriv_trace_left(lambda);
    }
};

inline GalerkinSystem assemble_galerkin(const DensityProfile& density, double kappa,
                                        int n_modes) {
    GalerkinSystem sys;
    sys.basis = build_sine_basis(n_modes, density.grid);
    sys.kappa = kappa;
    sys.rho0 = density.rho0_nodal;
    sys.drho0 = density.drho0_nodal;
    sys.slope_left = density.slope_left;
    const Eigen::ArrayXd& w = density.grid->quad_weights;
    const Eigen::MatrixXd& P = sys.basis.values;
    const Eigen::MatrixXd& D = sys.basis.deriv_values;
    sys.M = P.transpose() * (w / sys.rho0).matrix().asDiagonal() * P;
    sys.M = 0.5 * (sys.M + sys.M.transpose()).eval();
    sys.K = D.transpose() * w.matrix().asDiagonal() * D +
            D.transpose() * (w * sys.drho0 / sys.rho0).matrix().asDiagonal() * P;
    sys.M_chol.compute(sys.M);
    require(sys.M_chol.info() == Eigen::Success, ErrorCode::linear_solve_failure,
            "weighted mass matrix is not positive definite");
    return sys;
}

// Prefactored trapezoid stepper for M lambda' + kappa K lambda = F(t):
//   (M + kappa dt/2 K) lambda1 = (M - kappa dt/2 K) lambda0 + dt/2 (F0 + F1).
struct LinearXStepper {
    const GalerkinSystem* sys = nullptr;
    double dt = 0.0;
    Eigen::MatrixXd rhs_op;
    Eigen::PartialPivLU<Eigen::MatrixXd> lhs_lu;

    LinearXStepper(const GalerkinSystem& s, double step) : sys(&s), dt(step) {
        require(step > 0.0, ErrorCode::precondition, "time step must be positive");
        Eigen::MatrixXd lhs = s.M + 0.5 * s.kappa * dt * s.K;
        rhs_op = s.M - 0.5 * s.kappa * dt * s.K;
        lhs_lu.compute(lhs);
        require(std::abs(lhs_lu.determinant()) > 0.0, ErrorCode::linear_solve_failure,
                "singular trapezoid operator");
    }

    Eigen::VectorXd step(const Eigen::VectorXd& lambda0, const Eigen::VectorXd& F0,
                         const Eigen::VectorXd& F1) const {
        return lhs_lu.solve(rhs_op * lambda0 + 0.5 * dt * (F0 + F1));
    }
};

// Velocity reconstruction from X: v = f(t) + vcheck, vcheck(x) = int_0^x X/rho0.
// The antiderivative is taken spectrally from a Legendre projection of the
// finite interior ratio X/rho0.
struct ReconstructedVelocity {
    Eigen::ArrayXd v;    // nodal velocity
    Eigen::ArrayXd vx;   // nodal v' = X / rho0
    Eigen::ArrayXd vxx;  // nodal v'' = (X' - rho0' v') / rho0
    double vx_left = 0.0;
};

inline ReconstructedVelocity reconstruct_velocity(const GalerkinSystem& sys,
                                                  const Eigen::VectorXd& lambda, double f) {
    ReconstructedVelocity r;
    Eigen::ArrayXd X = sys.basis.synth(lambda);
    Eigen::ArrayXd Xx = sys.basis.synth_deriv(lambda);
    r.vx = X / sys.rho0;
    r.vxx = (Xx - sys.drho0 * r.vx) / sys.rho0;
    const Grid& g = *sys.basis.grid;
    int degree = std::min(48, g.declared_degree / 2);
    Eigen::MatrixXd P = legendre::projection(g, degree);
    Eigen::VectorXd c = P * r.vx.matrix();
    Eigen::VectorXd a = legendre::antiderivative_modal(c);
    Eigen::MatrixXd V = legendre::vandermonde(g.nodes, degree + 1);
    r.v = (V * a).array() + f;
    // v'(0) = lim X/rho0 = X'(0)/rho0'(0)
    r.vx_left = sys.basis.deriv_trace_left(lambda) / sys.slope_left;
    return r;
}

}  // namespace vaclab
