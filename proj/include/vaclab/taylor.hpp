#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace vaclab {

// Truncated Taylor series in one variable. Coefficient k stores
// f^(k)(x0)/k!, so arithmetic on Taylor values propagates derivatives
// through any algebraic expression evaluated with them.
class Taylor {
public:
    Taylor() : c_(1, 0.0) {}
    explicit Taylor(std::vector<double> c) : c_(std::move(c)) {}
    Taylor(double value, int order) : c_(static_cast<size_t>(order) + 1, 0.0) { c_[0] = value; }

    static Taylor variable(double x, int order) {
        Taylor t(x, order);
        if (order >= 1) t.c_[1] = 1.0;
        return t;
    }
    static Taylor constant(double x, int order) { return Taylor(x, order); }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int k) const { return k <= order() ? c_[static_cast<size_t>(k)] : 0.0; }
    double& coeff(int k) { return c_[static_cast<size_t>(k)]; }
    double value() const { return c_[0]; }

    // k-th derivative at the expansion point.
    double derivative(int k) const {
        if (k > order()) return 0.0;
        double f = 1.0;
        for (int j = 2; j <= k; ++j) f *= j;
        return c_[static_cast<size_t>(k)] * f;
    }

    // Series of the m-th derivative (loses m orders).
    Taylor derived(int m) const {
        int n = order() - m;
        assert(n >= 0);
        std::vector<double> r(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            double f = 1.0;  // (k+m)!/k!
            for (int j = k + 1; j <= k + m; ++j) f *= j;
            r[static_cast<size_t>(k)] = c_[static_cast<size_t>(k + m)] * f;
        }
        return Taylor(std::move(r));
    }

    friend Taylor operator+(const Taylor& a, const Taylor& b) {
        int n = std::max(a.order(), b.order());
        std::vector<double> r(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) r[static_cast<size_t>(k)] = a[k] + b[k];
        return Taylor(std::move(r));
    }
    friend Taylor operator-(const Taylor& a, const Taylor& b) {
        int n = std::max(a.order(), b.order());
        std::vector<double> r(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) r[static_cast<size_t>(k)] = a[k] - b[k];
        return Taylor(std::move(r));
    }
    friend Taylor operator-(const Taylor& a) {
        std::vector<double> r(a.c_);
        for (auto& x : r) x = -x;
        return Taylor(std::move(r));
    }
    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        int n = std::max(a.order(), b.order());
        std::vector<double> r(static_cast<size_t>(n) + 1, 0.0);
        for (int k = 0; k <= n; ++k)
            for (int j = 0; j <= k; ++j) r[static_cast<size_t>(k)] += a[j] * b[k - j];
        return Taylor(std::move(r));
    }
    friend Taylor operator*(double s, const Taylor& a) {
        std::vector<double> r(a.c_);
        for (auto& x : r) x *= s;
        return Taylor(std::move(r));
    }
    friend Taylor operator*(const Taylor& a, double s) { return s * a; }
    friend Taylor operator+(const Taylor& a, double s) {
        std::vector<double> r(a.c_);
        r[0] += s;
        return Taylor(std::move(r));
    }
    friend Taylor operator+(double s, const Taylor& a) { return a + s; }
    friend Taylor operator-(const Taylor& a, double s) { return a + (-s); }
    friend Taylor operator-(double s, const Taylor& a) { return (-a) + s; }
    friend Taylor operator/(const Taylor& a, const Taylor& b) {
        assert(b[0] != 0.0);
        int n = std::max(a.order(), b.order());
        std::vector<double> r(static_cast<size_t>(n) + 1, 0.0);
        for (int k = 0; k <= n; ++k) {
            double s = a[k];
            for (int j = 1; j <= k; ++j) s -= b[j] * r[static_cast<size_t>(k - j)];
            r[static_cast<size_t>(k)] = s / b[0];
        }
        return Taylor(std::move(r));
    }
    friend Taylor operator/(double s, const Taylor& b) { return Taylor(s, b.order()) / b; }
    friend Taylor operator/(const Taylor& a, double s) { return a * (1.0 / s); }

private:
    static double factorial_(int k) {
        double f = 1.0;
        for (int j = 2; j <= k; ++j) f *= j;
        return f;
    }
    std::vector<double> c_;
};

inline Taylor sin(const Taylor& u);
inline Taylor cos(const Taylor& u);

inline Taylor sin(const Taylor& u) {
    // sin/cos pair via s' = u' c, c' = -u' s.
    int n = u.order();
    std::vector<double> s(static_cast<size_t>(n) + 1), c(static_cast<size_t>(n) + 1);
    s[0] = std::sin(u[0]);
    c[0] = std::cos(u[0]);
    for (int k = 1; k <= n; ++k) {
        double sa = 0, ca = 0;
        for (int j = 1; j <= k; ++j) {
            sa += j * u[j] * c[static_cast<size_t>(k - j)];
            ca -= j * u[j] * s[static_cast<size_t>(k - j)];
        }
        s[static_cast<size_t>(k)] = sa / k;
        c[static_cast<size_t>(k)] = ca / k;
    }
    return Taylor(std::move(s));
}

inline Taylor cos(const Taylor& u) {
    int n = u.order();
    std::vector<double> s(static_cast<size_t>(n) + 1), c(static_cast<size_t>(n) + 1);
    s[0] = std::sin(u[0]);
    c[0] = std::cos(u[0]);
    for (int k = 1; k <= n; ++k) {
        double sa = 0, ca = 0;
        for (int j = 1; j <= k; ++j) {
            sa += j * u[j] * c[static_cast<size_t>(k - j)];
            ca -= j * u[j] * s[static_cast<size_t>(k - j)];
        }
        s[static_cast<size_t>(k)] = sa / k;
        c[static_cast<size_t>(k)] = ca / k;
    }
    return Taylor(std::move(c));
}

inline Taylor exp(const Taylor& u) {
    int n = u.order();
    std::vector<double> w(static_cast<size_t>(n) + 1);
    w[0] = std::exp(u[0]);
    for (int k = 1; k <= n; ++k) {
        double a = 0;
        for (int j = 1; j <= k; ++j) a += j * u[j] * w[static_cast<size_t>(k - j)];
        w[static_cast<size_t>(k)] = a / k;
    }
    return Taylor(std::move(w));
}

// u^a for real exponent; requires u[0] > 0.
inline Taylor pow(const Taylor& u, double a) {
    assert(u[0] > 0.0);
    int n = u.order();
    std::vector<double> w(static_cast<size_t>(n) + 1);
    w[0] = std::pow(u[0], a);
    for (int k = 1; k <= n; ++k) {
        double s = 0;
        for (int j = 1; j <= k; ++j)
            s += ((a + 1.0) * j / k - 1.0) * u[j] * w[static_cast<size_t>(k - j)];
        w[static_cast<size_t>(k)] = s / u[0];
    }
    return Taylor(std::move(w));
}

inline Taylor sqrt(const Taylor& u) { return pow(u, 0.5); }

}  // namespace vaclab
