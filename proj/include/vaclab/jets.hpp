#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vaclab/density.hpp"
#include "vaclab/errors.hpp"
#include "vaclab/legendre.hpp"

namespace vaclab {

// Nodal-vector power series in time: coefficient j holds (d/dt)^j f / j! as
// an array over grid nodes. Only the handful of operations the evolution-law
// recursion needs.
struct VecSeries {
    std::vector<Eigen::ArrayXd> c;

    static VecSeries from_constant(const Eigen::ArrayXd& a, int order) {
        VecSeries s;
        s.c.assign(static_cast<size_t>(order) + 1, Eigen::ArrayXd::Zero(a.size()));
        s.c[0] = a;
        return s;
    }
    int order() const { return static_cast<int>(c.size()) - 1; }

    friend VecSeries operator*(const VecSeries& a, const VecSeries& b) {
        VecSeries r;
        int n = std::min(a.order(), b.order());
        r.c.assign(static_cast<size_t>(n) + 1, Eigen::ArrayXd::Zero(a.c[0].size()));
        for (int k = 0; k <= n; ++k)
            for (int j = 0; j <= k; ++j)
                r.c[static_cast<size_t>(k)] += a.c[static_cast<size_t>(j)] * b.c[static_cast<size_t>(k - j)];
        return r;
    }
    friend VecSeries operator+(const VecSeries& a, const VecSeries& b) {
        VecSeries r;
        int n = std::min(a.order(), b.order());
        r.c.resize(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k)
            r.c[static_cast<size_t>(k)] = a.c[static_cast<size_t>(k)] + b.c[static_cast<size_t>(k)];
        return r;
    }
    friend VecSeries operator-(const VecSeries& a, const VecSeries& b) {
        VecSeries r;
        int n = std::min(a.order(), b.order());
        r.c.resize(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k)
            r.c[static_cast<size_t>(k)] = a.c[static_cast<size_t>(k)] - b.c[static_cast<size_t>(k)];
        return r;
    }
    friend VecSeries operator*(double s, const VecSeries& a) {
        VecSeries r = a;
        for (auto& x : r.c) x *= s;
        return r;
    }
    // scale by a t-independent nodal array
    friend VecSeries operator*(const Eigen::ArrayXd& s, const VecSeries& a) {
        VecSeries r = a;
        for (auto& x : r.c) x *= s;
        return r;
    }

    // componentwise a^p (leading coefficient must be positive everywhere)
    VecSeries pow(double p) const {
        VecSeries w;
        int n = order();
        w.c.assign(static_cast<size_t>(n) + 1, Eigen::ArrayXd::Zero(c[0].size()));
        w.c[0] = c[0].pow(p);
        for (int k = 1; k <= n; ++k) {
            Eigen::ArrayXd s = Eigen::ArrayXd::Zero(c[0].size());
            for (int j = 1; j <= k; ++j)
                s += ((p + 1.0) * j / k - 1.0) * c[static_cast<size_t>(j)] * w.c[static_cast<size_t>(k - j)];
            w.c[static_cast<size_t>(k)] = s / c[0];
        }
        return w;
    }
};

// Recursive time differentiation of the evolution law
//   v_t = -(gamma/(gamma-1)) sigma' eta_x^{-gamma} + gamma sigma eta_xx eta_x^{-gamma-1}
//         + kappa (rho0 v_xx + 2 rho0' v_x),
// the division-free kappa-extension of the Lagrangian momentum equation.
// Returns [v, v_t, ..., d_t^{k_max} v] at the state (v, eta_x), using D1 for
// spatial derivatives. At gamma = 2, sigma = rho0 and the Euler part is the
// expanded pressure-gradient term.
inline std::vector<Eigen::ArrayXd> time_derivative_stack(
    const Eigen::ArrayXd& v, const Eigen::ArrayXd& eta_x, const Eigen::ArrayXd& eta_xx,
    const DensityProfile& rho, double kappa, int k_max, const Eigen::MatrixXd& D1) {
    require(k_max >= 0, ErrorCode::precondition, "k_max must be nonnegative");
    const double gamma = rho.gamma;
    const Eigen::ArrayXd& P0 = rho.rho0_nodal;
    const Eigen::ArrayXd& P1 = rho.drho0_nodal;
    const Eigen::ArrayXd& S0 = rho.sigma_nodal;
    const Eigen::ArrayXd& S1 = rho.dsigma_nodal;
    long n = v.size();

    auto dx = [&](const Eigen::ArrayXd& f) -> Eigen::ArrayXd { return (D1 * f.matrix()).array(); };

    std::vector<Eigen::ArrayXd> w{v};          // d_t^k v
    std::vector<Eigen::ArrayXd> w1{dx(v)};     // d_t^k v_x
    std::vector<Eigen::ArrayXd> w2{dx(w1[0])}; // d_t^k v_xx

    for (int k = 0; k < k_max; ++k) {
        // series to order k (coefficient j = d_t^j / j!)
        VecSeries H1 = VecSeries::from_constant(eta_x, k);
        VecSeries H2 = VecSeries::from_constant(eta_xx, k);
        VecSeries V1 = VecSeries::from_constant(w1[0], k);
        VecSeries V2 = VecSeries::from_constant(w2[0], k);
        double f = 1.0;
        for (int j = 1; j <= k; ++j) {
            f *= j;  // j!
            V1.c[static_cast<size_t>(j)] = w1[static_cast<size_t>(j)] / f;
            V2.c[static_cast<size_t>(j)] = w2[static_cast<size_t>(j)] / f;
            H1.c[static_cast<size_t>(j)] = w1[static_cast<size_t>(j - 1)] / f;
            H2.c[static_cast<size_t>(j)] = w2[static_cast<size_t>(j - 1)] / f;
        }
        VecSeries Wg = H1.pow(-gamma);
        VecSeries Wg1 = H1.pow(-gamma - 1.0);
        VecSeries R = (-gamma / (gamma - 1.0)) * (S1 * Wg) + gamma * (S0 * (H2 * Wg1));
        if (kappa != 0.0) {
            VecSeries K = kappa * (P0 * V2 + 2.0 * (P1 * V1));
            R = R + K;
        }
        // d_t^{k+1} v = d_t^k (v_t) = k! * R_k
        double kfact = 1.0;
        for (int j = 2; j <= k; ++j) kfact *= j;
        Eigen::ArrayXd next = kfact * R.c[static_cast<size_t>(k)];
        w.push_back(next);
        w1.push_back(dx(next));
        w2.push_back(dx(w1.back()));
        (void)n;
    }
    return w;
}

}  // namespace vaclab
