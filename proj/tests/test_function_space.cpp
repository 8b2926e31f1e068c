#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vaclab/norms.hpp"
#include "vaclab/oracles.hpp"
#include "vaclab/sine_basis.hpp"

using namespace vaclab;

static GridPtr grid() {
    static GridPtr g = Grid::make();
    return g;
}

TEST_CASE("grid quadrature integrates reference integrands") {
    const Grid& g = *grid();
    CHECK(g.integrate(g.nodes * (1.0 - g.nodes)) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(g.integrate(g.nodes.min(1.0 - g.nodes)) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(g.integrate(Eigen::ArrayXd::Ones(g.n_points())) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sine basis closed forms") {
    SineBasis b = build_sine_basis(16, grid());
    CHECK(SineBasis::eval(1, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(b.eigenvalue(3) == doctest::Approx(9.0 * M_PI * M_PI).epsilon(1e-14));
    // <e_2, e_5> on the grid quadrature
    Eigen::ArrayXd e2 = b.values.col(1).array();
    Eigen::ArrayXd e5 = b.values.col(4).array();
    CHECK(std::abs(grid()->integrate(e2 * e5)) < 1e-12);
    CHECK(b.orthonormality_defect < 1e-10);
}

TEST_CASE("requesting more modes than the quadrature resolves fails") {
    CHECK_THROWS_AS(build_sine_basis(grid()->max_sine_modes + 40, grid()), Error);
}

TEST_CASE("spectral differentiation of the basis") {
    SineBasis b = build_sine_basis(10, grid());
    for (int k = 1; k <= 10; ++k) {
        ScalarField ek = b.mode_field(k);
        Eigen::ArrayXd d = ek.deriv_values(1);
        Eigen::ArrayXd exact =
            std::sqrt(2.0) * k * M_PI * (k * M_PI * grid()->nodes).cos();
        CHECK(std::sqrt(grid()->integrate((d - exact).square())) < 1e-8);
    }
}

TEST_CASE("sobolev_norm integer orders") {
    SineBasis b = build_sine_basis(4, grid());
    ScalarField e1 = b.mode_field(1);
    CHECK(sobolev_norm(e1, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sobolev_norm(e1, 1.0) == doctest::Approx(std::sqrt(1.0 + M_PI * M_PI)).epsilon(1e-12));
    ScalarField f = field_from(grid(), [](const Taylor& x) { return x * (1.0 - x); }, 20);
    double oracle = quadrature_oracle(
        [](double x) { return x * x * (1 - x) * (1 - x) + (1 - 2 * x) * (1 - 2 * x); }, 1e-12);
    CHECK(oracle == doctest::Approx(1.0 / 30.0 + 1.0 / 3.0).epsilon(1e-10));
    CHECK(sobolev_norm(f, 1.0) == doctest::Approx(std::sqrt(oracle)).epsilon(1e-10));
}

TEST_CASE("fractional norm multiplier realization") {
    SineBasis b = build_sine_basis(4, grid());
    // e_1 has a single unit sine coefficient
    CHECK(sobolev_norm(b.mode_field(1), 0.5) ==
          doctest::Approx(std::pow(1.0 + M_PI * M_PI, 0.25)).epsilon(1e-10));
    CHECK(sobolev_norm(b.mode_field(2), 1.5) ==
          doctest::Approx(std::pow(1.0 + 4.0 * M_PI * M_PI, 0.75)).epsilon(1e-10));
}

TEST_CASE("weighted_norm") {
    ScalarField one = field_const(grid(), 1.0);
    ScalarField d = ScalarField::from_values(grid(), grid()->nodes.min(1.0 - grid()->nodes));
    CHECK(weighted_norm(one, d, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    SineBasis b = build_sine_basis(2, grid());
    ScalarField rho = field_from(grid(), [](const Taylor& x) { return x * (1.0 - x); }, 20);
    double oracle = quadrature_oracle(
        [](double x) {
            double e = std::sqrt(2.0) * std::sin(M_PI * x);
            double de = std::sqrt(2.0) * M_PI * std::cos(M_PI * x);
            return x * (1 - x) * (e * e + de * de);
        },
        1e-12);
    CHECK(weighted_norm(b.mode_field(1), rho, 1.0) ==
          doctest::Approx(std::sqrt(oracle)).epsilon(1e-10));
    ScalarField zero = field_const(grid(), 0.0);
    CHECK(weighted_norm(zero, d, 1.0) == 0.0);
}

TEST_CASE("weighted_norm rejects nonpositive weights") {
    ScalarField one = field_const(grid(), 1.0);
    ScalarField w = field_from(grid(), [](const Taylor& x) { return x - 0.5; }, 4);
    CHECK_THROWS_AS(weighted_norm(one, w, 1.0), Error);
}

TEST_CASE("hardy_quotient closed forms") {
    ScalarField u = field_from(grid(), [](const Taylor& x) { return sin(M_PI * x); }, 20);
    ScalarField q = hardy_quotient(u);
    // limit pi at the node nearest 0
    CHECK(q.values()(0) == doctest::Approx(M_PI).epsilon(1e-6));
    ScalarField p = field_from(grid(), [](const Taylor& x) { return x * (1.0 - x); }, 20);
    ScalarField qp = hardy_quotient(p);
    for (long j = 0; j < grid()->n_points(); ++j) {
        double x = grid()->nodes(j);
        if (x > 0.5) break;
        CHECK(qp.values()(j) == doctest::Approx(1.0 - x).epsilon(1e-10));
    }
}

TEST_CASE("hardy_quotient L2 against brute-force quadrature") {
    SineBasis b = build_sine_basis(2, grid());
    ScalarField q = hardy_quotient(b.mode_field(2));
    double oracle = quadrature_oracle(
        [](double x) {
            double d = std::min(x, 1.0 - x);
            double e = std::sqrt(2.0) * std::sin(2.0 * M_PI * x);
            double r = d > 1e-9 ? e / d : 2.0 * std::sqrt(2.0) * M_PI * (x <= 0.5 ? 1.0 : -1.0);
            return r * r;
        },
        1e-12);
    CHECK(sobolev_norm(q, 0.0) == doctest::Approx(std::sqrt(oracle)).epsilon(1e-8));
}

TEST_CASE("hardy_quotient rejects non-vanishing endpoints") {
    ScalarField one = field_const(grid(), 1.0);
    CHECK_THROWS_AS(hardy_quotient(one), Error);
}

TEST_CASE("quotient removability: value near 0 matches u'(0)") {
    std::vector<ScalarField> fam;
    fam.push_back(field_from(grid(), [](const Taylor& x) { return sin(M_PI * x); }, 20));
    fam.push_back(field_from(grid(), [](const Taylor& x) { return x * (1.0 - x); }, 20));
    for (const auto& u : fam) {
        ScalarField q = hardy_quotient(u);
        CHECK(std::abs(q.values()(0) - u.deriv_at(0.0, 1)) < 1e-4);
    }
}

TEST_CASE("check_hardy_ratio stability under refinement") {
    GridPtr fine = Grid::refine(*grid());
    auto make = [](GridPtr g, int k) {
        return field_from(g, [k](const Taylor& x) {
            return std::sqrt(2.0) * sin(static_cast<double>(k) * M_PI * x);
        }, 20);
    };
    double rc = check_hardy_ratio(make(grid(), 1), 1);
    double rf = check_hardy_ratio(make(fine, 1), 1);
    CHECK(rc == doctest::Approx(rf).epsilon(1e-3));
    CHECK(rc > 0.0);
    CHECK(rc < 10.0);

    double maxC = 0.0;
    for (int k = 1; k <= 10; ++k) maxC = std::max(maxC, check_hardy_ratio(make(grid(), k), 2));
    CHECK(maxC > 0.0);
    CHECK(maxC < 10.0);

    ScalarField cub = field_from(grid(), [](const Taylor& x) { return x * x * (1.0 - x); }, 20);
    double r3 = check_hardy_ratio(cub, 3);
    CHECK(std::isfinite(r3));
    CHECK(r3 > 0.0);
}

TEST_CASE("embedding ratios") {
    ScalarField zero = field_const(grid(), 0.0);
    CHECK(check_embedding(zero, 1) == 0.0);
    CHECK(check_embedding(zero, 2) == 0.0);
    ScalarField one = field_const(grid(), 1.0);
    double r1 = check_embedding(one, 1);
    CHECK(std::isfinite(r1));
    CHECK(r1 > 0.0);
    SineBasis b = build_sine_basis(10, grid());
    for (int p : {1, 2}) {
        double maxr = 0.0;
        for (int k = 1; k <= 10; ++k) maxr = std::max(maxr, check_embedding(b.mode_field(k), p));
        CHECK(maxr < 20.0);  // recorded bound per p
    }
}
