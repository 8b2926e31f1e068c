#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "vaclab/errors.hpp"

namespace vaclab {

// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration.
inline void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(q), 0.0);
    w.assign(static_cast<size_t>(q), 0.0);
    for (int i = 0; i < q; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (q + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int l = 2; l <= q; ++l) {
                double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            double dp = q * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        double p0 = 1.0, p1 = t;
        for (int l = 2; l <= q; ++l) {
            double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
            p0 = p1;
            p1 = p2;
        }
        double dp = q * (t * p1 - p0) / (t * t - 1.0);
        x[static_cast<size_t>(q - 1 - i)] = t;
        w[static_cast<size_t>(q - 1 - i)] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

// Composite Gauss-Legendre quadrature on I = (0,1): a uniform partition with
// the two boundary panels geometrically subdivided toward the endpoints, so
// that integrands carrying 1/rho0 or 1/d factors are resolved. All nodes are
// strictly interior.
struct Grid {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd quad_weights;
    std::vector<double> breakpoints;
    int pts_per_panel = 0;
    int declared_degree = 0;   // exact for global polynomials up to this degree
    int max_sine_modes = 0;    // sine modes this rule integrates to ~1e-12
    double interior_margin = 0.0;

    int n_points() const { return static_cast<int>(nodes.size()); }

    double integrate(const Eigen::ArrayXd& f) const { return (f * quad_weights).sum(); }

    static std::shared_ptr<const Grid> make(int uniform_panels = 24, int geometric_levels = 8,
                                            int pts = 12) {
        require(uniform_panels >= 2 && uniform_panels % 2 == 0, ErrorCode::precondition,
                "uniform_panels must be even and >= 2");
        require(geometric_levels >= 0 && pts >= 2, ErrorCode::precondition, "bad grid parameters");
        auto g = std::make_shared<Grid>();
        double h = 1.0 / uniform_panels;
        std::vector<double> bp;
        // left geometric refinement of [0, h]
        for (int j = geometric_levels; j >= 1; --j) bp.push_back(h * std::pow(0.5, j));
        for (int i = 1; i < uniform_panels; ++i) bp.push_back(i * h);
        for (int j = 1; j <= geometric_levels; ++j) bp.push_back(1.0 - h * std::pow(0.5, j));
        g->breakpoints.push_back(0.0);
        g->breakpoints.insert(g->breakpoints.end(), bp.begin(), bp.end());
        g->breakpoints.push_back(1.0);

        std::vector<double> gx, gw;
        gauss_legendre(pts, gx, gw);
        std::vector<double> xs, ws;
        for (size_t p = 0; p + 1 < g->breakpoints.size(); ++p) {
            double a = g->breakpoints[p], b = g->breakpoints[p + 1];
            for (int i = 0; i < pts; ++i) {
                xs.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[static_cast<size_t>(i)]);
                ws.push_back(0.5 * (b - a) * gw[static_cast<size_t>(i)]);
            }
        }
        g->nodes = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<long>(xs.size()));
        g->quad_weights = Eigen::Map<Eigen::ArrayXd>(ws.data(), static_cast<long>(ws.size()));
        g->pts_per_panel = pts;
        g->declared_degree = 2 * pts - 1;
        g->interior_margin = std::min(g->nodes(0), 1.0 - g->nodes(g->nodes.size() - 1));
        // q-point Gauss on a panel of width h resolves sin(k pi x) while
        // k*pi*h/2 stays well below the rule capacity; calibrated in tests.
        g->max_sine_modes = static_cast<int>(std::floor(2.0 * pts / (9.0 * h)));
        return g;
    }

    // Same panel structure at double density (panel bisection).
    static std::shared_ptr<const Grid> refine(const Grid& g) {
        auto r = std::make_shared<Grid>();
        std::vector<double> bp;
        for (size_t p = 0; p + 1 < g.breakpoints.size(); ++p) {
            bp.push_back(g.breakpoints[p]);
            bp.push_back(0.5 * (g.breakpoints[p] + g.breakpoints[p + 1]));
        }
        bp.push_back(1.0);
        r->breakpoints = bp;
        std::vector<double> gx, gw;
        gauss_legendre(g.pts_per_panel, gx, gw);
        std::vector<double> xs, ws;
        for (size_t p = 0; p + 1 < bp.size(); ++p) {
            double a = bp[p], b = bp[p + 1];
            for (int i = 0; i < g.pts_per_panel; ++i) {
                xs.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[static_cast<size_t>(i)]);
                ws.push_back(0.5 * (b - a) * gw[static_cast<size_t>(i)]);
            }
        }
        r->nodes = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<long>(xs.size()));
        r->quad_weights = Eigen::Map<Eigen::ArrayXd>(ws.data(), static_cast<long>(ws.size()));
        r->pts_per_panel = g.pts_per_panel;
        r->declared_degree = g.declared_degree;
        r->interior_margin = std::min(r->nodes(0), 1.0 - r->nodes(r->nodes.size() - 1));
        r->max_sine_modes = 2 * g.max_sine_modes;
        return r;
    }
};

using GridPtr = std::shared_ptr<const Grid>;

// Distance to the boundary of I, kept exactly piecewise affine.
inline double dist_to_boundary(double x) { return std::min(x, 1.0 - x); }

}  // namespace vaclab
