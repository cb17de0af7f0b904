#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "mqg/transport.hpp"

using namespace mqg;

namespace {

using P = NCPoly<double>;
using T = NCTensor<double>;

double max_coeff(const P& p)
{
    double m = 0;
    for (const auto& [w, c] : p.terms()) m = std::max(m, std::abs(c));
    return m;
}

// The regime quantities recomputed from their closed forms.
double pi_ref(double q, int N, double eps)
{
    const double c = (3 + eps) * (3 + eps) * N * N;
    return q * c / (1 - q * (3 - 2 * q + c));
}

} // namespace

TEST_CASE("radius and power bound values")
{
    CHECK(radius(0.0, 1.0) == 3.0);
    CHECK(radius(0.5, 1.0) == doctest::Approx(6.0));
    CHECK(pi_bound(0.0, 2, 1.0) == 0.0);
    CHECK(pi_bound(0.001, 2, 1.0) == doctest::Approx(0.068596).epsilon(1e-5));
    for (double q : {1e-5, 1e-4, 1e-3, 5e-3})
        for (int N : {1, 2, 3})
            for (double eps : {0.5, 1.0, 2.0})
                if (in_regime(q, N, eps)) CHECK(pi_bound(q, N, eps) == doctest::Approx(pi_ref(q, N, eps)).epsilon(1e-14));
    CHECK_FALSE(in_regime(0.02, 2, 1.0));
    CHECK_THROWS_AS(pi_bound(0.02, 2, 1.0), std::domain_error);
}

TEST_CASE("default Neumann order is the smallest admissible K")
{
    for (double pi : {0.01, 0.0686, 0.3, 0.9}) {
        const int K = default_neumann_order(pi, 1e-8);
        CHECK(std::pow(pi, K + 1) / (1 - pi) <= 1e-8);
        if (K > 0) CHECK(std::pow(pi, K) / (1 - pi) > 1e-8);
    }
}

TEST_CASE("transport parameters")
{
    const auto p = TransportParams::make(0.001, 2, 1.0, -1, 6);
    CHECK(p.certified);
    CHECK(p.R == doctest::Approx(radius(0.001, 1.0)));
    CHECK(p.neumann_order == default_neumann_order(p.pi));
    CHECK_THROWS_AS(TransportParams::make(0.02, 2, 1.0, 6, 6), std::domain_error);
    const auto u = TransportParams::make_uncertified(0.02, 2, 1.0, 6, 6);
    CHECK_FALSE(u.certified);
    CHECK(u.pi == std::numeric_limits<double>::infinity());
    const auto v = TransportParams::make_uncertified(0.01, 2, 1.0, 6, 6);
    CHECK_FALSE(v.certified);
    CHECK(v.pi == doctest::Approx(pi_ref(0.01, 2, 1.0)));
    CHECK(v.pi >= 1);
    CHECK_THROWS(TransportParams::make_uncertified(0.02, 2, 1.0, -1, 6));
}

TEST_CASE("Neumann inverse")
{
    const T unit = T::unit();
    CHECK(xi_inverse_series(unit, 5, 6, 0.0) == unit);
    const double q = 1e-3;
    const auto qs = QSpec<double>::uniform(2, q);
    const int D = 6;
    const FockSpace<double> space(qs, D);
    const WickTable<double> table(qs, D);
    const T xi = xi_series(space, table, 0, D, D);
    const double pi = pi_bound(q, 2, 1.0);
    const double R = radius(q, 1.0);
    CHECK(xi_inverse_series(xi, 0, D, pi) == unit);
    CHECK_THROWS_AS(xi_inverse_series(xi, 3, D, 1.0), std::domain_error);
    double prev = neumann_residual(xi, xi_inverse_series(xi, 0, D, pi), D, R);
    CHECK(prev == doctest::Approx(rnorm(xi - unit, R)));
    for (int K = 1; K <= 6; ++K) {
        const double r = neumann_residual(xi, xi_inverse_series(xi, K, D, pi), D, R);
        CHECK(r <= pi * prev * (1 + 1e-9) + 1e-18);
        prev = r;
    }
    CHECK(prev < 1e-15);
}

TEST_CASE("levelwise bounds")
{
    const double q = 1e-3;
    const auto qs = QSpec<double>::uniform(3, q);
    const FockSpace<double> space(qs, 4);
    const WickTable<double> table(qs, 4);
    for (int n = 1; n <= 4; ++n) CHECK(levelwise_bound_check(space, table, 1, n, radius(q, 1.0)).holds());
}

TEST_CASE("the free case gives xi_j = Y_j and the quadratic potential")
{
    const auto b = compute_conjugates(QSpec<double>::uniform(2, 0.0), TransportParams::make(0.0, 2, 1.0, 4, 4));
    for (int j = 0; j < 2; ++j) {
        CHECK(max_coeff(b.xi[static_cast<std::size_t>(j)] - P::generator(j)) < 1e-15);
        CHECK(b.distances[static_cast<std::size_t>(j)] < 1e-14);
        CHECK(b.xi_norms[static_cast<std::size_t>(j)] == 0.0);
    }
    const P quad = 0.5 * (P::monomial(Word{0, 0}) + P::monomial(Word{1, 1}));
    CHECK(max_coeff(b.potential - quad) < 1e-15);
}

TEST_CASE("semicircular relation tau(Y_j P) = tau (x) tau (d_j P)")
{
    const FockSpace<double> space(QSpec<double>::uniform(2, 0.0), 4);
    const VacuumStates<double> states(space);
    for (int j = 0; j < 2; ++j) {
        const auto c = conjugate_relation_check(states, j, P::generator(j), 5);
        CHECK(c.max_residual < 1e-14);
        CHECK(c.monomials == 63);
    }
    CHECK_THROWS(conjugate_relation_check(states, 0, P::monomial(Word{0, 0, 0, 0}), 5));
}

TEST_CASE("conjugate pipeline at small q")
{
    const double q = 1e-3;
    const int D = 6;
    const auto params = TransportParams::make(q, 2, 1.0, 6, D);
    const auto b = compute_conjugates(QSpec<double>::uniform(2, q), params);
    const FockSpace<double> space(QSpec<double>::uniform(2, q), D);
    const VacuumStates<double> states(space);
    for (int j = 0; j < 2; ++j) {
        const auto& xi = b.xi[static_cast<std::size_t>(j)];
        CHECK(xi.degree() <= D + 1);
        CHECK(conjugate_relation_check(states, j, xi, 5).max_residual < 1e-12);
        CHECK(b.neumann_residuals[static_cast<std::size_t>(j)] < 1e-15);
        CHECK(b.distances[static_cast<std::size_t>(j)] == doctest::Approx(distance_to_free(xi, j, params.R)));
        CHECK(b.star_asymmetry[static_cast<std::size_t>(j)] < 1e-15);
        // first-order correction: xi_j - Y_j is O(q)
        CHECK(b.distances[static_cast<std::size_t>(j)] < 100 * q);
        const P grad = cyclic_grad(j, b.potential) - xi;
        CHECK(max_coeff(grad.truncated(D - 1)) < 1e-10);
    }
    CHECK(star(b.potential) == b.potential);
    CHECK(b.potential == potential(b.xi));
}

TEST_CASE("distance shrinks with q")
{
    double prev = std::numeric_limits<double>::infinity();
    for (double q : {0.02, 0.01, 0.005, 0.001, 1e-4}) {
        const auto b = compute_conjugates(QSpec<double>::uniform(2, q), TransportParams::make_uncertified(q, 2, 1.0, 6, 6));
        const double d = std::max(b.distances[0], b.distances[1]);
        CHECK(d <= prev);
        prev = d;
    }
}

TEST_CASE("log grid")
{
    const auto g = log_grid(1e-5, 1e-2, 16);
    CHECK(g.size() == 49);
    CHECK(g.front() == doctest::Approx(1e-5));
    CHECK(g.back() == doctest::Approx(1e-2));
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] / g[k - 1] == doctest::Approx(std::pow(10.0, 1.0 / 16)));
    CHECK_THROWS(log_grid(0.0, 1.0, 4));
}

TEST_CASE("q0 scan picks the largest certified point under the threshold")
{
    const Mat<double> shape = Mat<double>::Ones(2, 2);
    const std::vector<double> grid{1e-4, 1e-3, 5e-3, 0.02};
    const auto r = q0_scan(shape, 1.0, 0.1, grid, 4, 4);
    REQUIRE(r.rows.size() == 4);
    CHECK_FALSE(r.rows[3].in_regime);
    CHECK(std::isinf(r.rows[3].pi));
    REQUIRE(r.q0.has_value());
    double expect = 0;
    for (const auto& row : r.rows)
        if (row.in_regime && row.distance < 0.1) expect = std::max(expect, row.q);
    CHECK(*r.q0 == expect);
    const auto none = q0_scan(shape, 1.0, 1e-12, grid, 4, 4);
    CHECK_FALSE(none.q0.has_value());
}
