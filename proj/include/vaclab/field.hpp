#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "vaclab/errors.hpp"
#include "vaclab/grid.hpp"
#include "vaclab/legendre.hpp"
#include "vaclab/taylor.hpp"

namespace vaclab {

// A scalar function of x expressed through Taylor-valued evaluation, so that
// spatial derivatives of any order come out of the same closure.
struct AnalyticFn {
    std::function<Taylor(const Taylor&)> fn;

    Taylor jet(double x, int order) const { return fn(Taylor::variable(x, order)); }
    double operator()(double x) const { return jet(x, 0).value(); }
    double deriv(double x, int m) const { return jet(x, m).derivative(m); }
};

inline AnalyticFn afn(std::function<Taylor(const Taylor&)> f) { return AnalyticFn{std::move(f)}; }

inline AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b) {
    return afn([a, b](const Taylor& t) { return a.fn(t) + b.fn(t); });
}
inline AnalyticFn operator-(const AnalyticFn& a, const AnalyticFn& b) {
    return afn([a, b](const Taylor& t) { return a.fn(t) - b.fn(t); });
}
inline AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b) {
    return afn([a, b](const Taylor& t) { return a.fn(t) * b.fn(t); });
}
inline AnalyticFn operator*(double s, const AnalyticFn& a) {
    return afn([a, s](const Taylor& t) { return s * a.fn(t); });
}

// Spatial derivative as a closure: re-seeds the evaluation at a higher order
// and shifts the series down. Valid because closures are always fed the plain
// Taylor variable.
inline AnalyticFn derivative(const AnalyticFn& a, int m) {
    if (m == 0) return a;
    return afn([a, m](const Taylor& t) {
        Taylor s = a.fn(Taylor::variable(t.value(), t.order() + m));
        return s.derived(m);
    });
}

// Discrete scalar field on a Grid. Carries nodal values always; derivative
// access goes through an analytic closure when one is attached, and through a
// capped-degree Legendre projection otherwise. Immutable after construction.
class ScalarField {
public:
    ScalarField() = default;

    static ScalarField from_function(GridPtr grid, AnalyticFn f, int max_deriv = 12) {
        ScalarField s;
        s.grid_ = std::move(grid);
        s.analytic_ = std::move(f);
        s.max_deriv_ = max_deriv;
        s.values_.resize(s.grid_->n_points());
        for (long j = 0; j < s.values_.size(); ++j) s.values_(j) = (*s.analytic_)(s.grid_->nodes(j));
        return s;
    }

    static ScalarField from_values(GridPtr grid, Eigen::ArrayXd values, int spectral_degree = -1) {
        ScalarField s;
        s.grid_ = std::move(grid);
        s.values_ = std::move(values);
        require(s.values_.size() == s.grid_->n_points(), ErrorCode::precondition,
                "value count does not match grid");
        s.degree_ = spectral_degree > 0 ? spectral_degree
                                        : std::min(48, s.grid_->declared_degree / 2);
        s.max_deriv_ = 6;
        return s;
    }

    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    bool is_analytic() const { return analytic_.has_value(); }
    int max_deriv() const { return max_deriv_; }

    double operator()(double x) const {
        if (analytic_) return (*analytic_)(x);
        return legendre::eval(spectral(), x);
    }

    // Nodal values of the m-th derivative.
    Eigen::ArrayXd deriv_values(int m) const {
        require(m <= max_deriv_, ErrorCode::insufficient_smoothness,
                "derivative order exceeds field capability");
        if (m == 0) return values_;
        if (analytic_) {
            Eigen::ArrayXd d(values_.size());
            for (long j = 0; j < d.size(); ++j) d(j) = analytic_->deriv(grid_->nodes(j), m);
            return d;
        }
        Eigen::VectorXd c = spectral();
        Eigen::MatrixXd D = legendre::diff_modal(degree_);
        for (int k = 0; k < m; ++k) c = D * c;
        Eigen::MatrixXd V = legendre::vandermonde(grid_->nodes, degree_);
        return (V * c).array();
    }

    ScalarField derivative_field(int m) const {
        if (analytic_) {
            return ScalarField::from_function(grid_, derivative(*analytic_, m),
                                              std::max(0, max_deriv_ - m));
        }
        ScalarField s = ScalarField::from_values(grid_, deriv_values(m), degree_);
        s.max_deriv_ = std::max(0, max_deriv_ - m);
        return s;
    }

    double deriv_at(double x, int m) const {
        if (analytic_) return analytic_->deriv(x, m);
        Eigen::VectorXd c = spectral();
        Eigen::MatrixXd D = legendre::diff_modal(degree_);
        for (int k = 0; k < m; ++k) c = D * c;
        return legendre::eval(c, x);
    }

    double at_left() const { return (*this)(0.0); }
    double at_right() const { return (*this)(1.0); }

    const AnalyticFn& analytic() const {
        require(analytic_.has_value(), ErrorCode::precondition, "field is not analytic");
        return *analytic_;
    }

    // Legendre coefficients of the capped-degree projection (cached).
    const Eigen::VectorXd& spectral() const {
        if (!spectral_) {
            Eigen::MatrixXd P = legendre::projection(*grid_, degree_);
            spectral_ = (P * values_.matrix()).eval();
        }
        return *spectral_;
    }
    int spectral_degree() const { return degree_; }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
        if (a.analytic_ && b.analytic_) {
            ScalarField s = ScalarField::from_function(a.grid_, *a.analytic_ + *b.analytic_,
                                                       std::min(a.max_deriv_, b.max_deriv_));
            return s;
        }
        return combine_(a, b, a.values_ + b.values_);
    }
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b) {
        if (a.analytic_ && b.analytic_) {
            ScalarField s = ScalarField::from_function(a.grid_, *a.analytic_ - *b.analytic_,
                                                       std::min(a.max_deriv_, b.max_deriv_));
            return s;
        }
        return combine_(a, b, a.values_ - b.values_);
    }
    friend ScalarField operator*(double s, const ScalarField& a) {
        if (a.analytic_) return ScalarField::from_function(a.grid_, s * (*a.analytic_), a.max_deriv_);
        return ScalarField::from_values(a.grid_, s * a.values_, a.degree_);
    }

private:
    static ScalarField combine_(const ScalarField& a, const ScalarField& b, Eigen::ArrayXd v) {
        require(a.grid_.get() == b.grid_.get(), ErrorCode::precondition, "grid mismatch");
        ScalarField s = ScalarField::from_values(a.grid_, std::move(v), std::max(a.degree_, b.degree_));
        s.max_deriv_ = std::min(a.max_deriv_, b.max_deriv_);
        return s;
    }

    GridPtr grid_;
    Eigen::ArrayXd values_;
    std::optional<AnalyticFn> analytic_;
    int degree_ = 48;
    int max_deriv_ = 6;
    mutable std::optional<Eigen::VectorXd> spectral_;
};

// Convenience closed-form fields.
inline ScalarField field_const(GridPtr g, double c) {
    return ScalarField::from_function(std::move(g), afn([c](const Taylor& t) {
        return Taylor::constant(c, t.order());
    }), 20);
}

inline ScalarField field_from(GridPtr g, std::function<Taylor(const Taylor&)> f, int max_deriv = 12) {
    return ScalarField::from_function(std::move(g), afn(std::move(f)), max_deriv);
}

}  // namespace vaclab
