#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mqg/ncpoly.hpp"

using namespace mqg;

namespace {

using P = NCPoly<double>;
using T = NCTensor<double>;

P random_poly(std::mt19937_64& rng, int N, int max_deg, int terms)
{
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> letter(0, N - 1);
    std::uniform_int_distribution<int> coef(-4, 4); // small integers keep sums exact
    P p;
    for (int t = 0; t < terms; ++t) {
        std::vector<Letter> w(static_cast<std::size_t>(deg(rng)));
        for (auto& l : w) l = static_cast<Letter>(letter(rng));
        p.add(Word(std::move(w)), coef(rng));
    }
    return p;
}

T random_tensor(std::mt19937_64& rng, int N, int max_deg, int terms)
{
    T t;
    for (int k = 0; k < terms; ++k) t += T::elementary(random_poly(rng, N, max_deg, 1), random_poly(rng, N, max_deg, 1));
    return t;
}

double max_abs(const Mat<double>& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

TEST_CASE("polynomial arithmetic")
{
    const P y1 = P::generator(0);
    const P y2 = P::generator(1);
    const P p = y1 * y2 + 2.0 * y2;
    CHECK(p.coeff(Word{0, 1}) == 1.0);
    CHECK(p.coeff(Word{1}) == 2.0);
    CHECK(p.degree() == 2);
    CHECK((p - p).is_zero());
    CHECK((y1 * y2 * y1).truncated(2).is_zero());
    CHECK(P::constant(3.0).degree() == 0);
    CHECK(P().degree() < 0);
    CHECK((y1 * (y2 + y1)) == (y1 * y2 + y1 * y1));
}

TEST_CASE("tensor product law is ac (x) (db)°")
{
    const T x = T::monomial(Word{0}, Word{1});
    const T y = T::monomial(Word{1, 1}, Word{0, 0});
    const T xy = x * y;
    CHECK(xy.size() == 1);
    CHECK(xy.coeff(Word{0, 1, 1}, Word{0, 0, 1}) == 1.0);
    CHECK(multiply(x, y, 5).is_zero());
    CHECK(multiply(x, y, 6) == xy);
}

TEST_CASE("tensor multiplication is associative with unit 1 (x) 1°")
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const T a = random_tensor(rng, 2, 2, 3);
        const T b = random_tensor(rng, 2, 2, 3);
        const T c = random_tensor(rng, 2, 2, 3);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * T::unit() == a);
        CHECK(T::unit() * a == a);
    }
}

TEST_CASE("bimodule action is left multiplication by a (x) b°")
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const P a = random_poly(rng, 2, 2, 3);
        const P b = random_poly(rng, 2, 2, 3);
        const T u = random_tensor(rng, 2, 2, 3);
        CHECK(bimodule(a, u, b) == T::elementary(a, b) * u);
    }
}

TEST_CASE("free difference quotient examples")
{
    const P p = P::monomial(Word{0, 1, 0});
    const T d = free_diff(0, p);
    CHECK(d.size() == 2);
    CHECK(d.coeff(Word{}, Word{1, 0}) == 1.0);
    CHECK(d.coeff(Word{0, 1}, Word{}) == 1.0);
    CHECK(free_diff(1, p) == T::monomial(Word{0}, Word{0}));
    CHECK(free_diff(0, P::constant(5)).is_zero());
    CHECK(free_diff(0, P::generator(0)) == T::unit());
}

TEST_CASE("free difference quotient is a derivation into the bimodule")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const P p = random_poly(rng, 3, 3, 4);
        const P q = random_poly(rng, 3, 3, 4);
        for (int j = 0; j < 3; ++j)
            CHECK(free_diff(j, p * q) == bimodule(P::constant(1), free_diff(j, p), q) + bimodule(p, free_diff(j, q), P::constant(1)));
    }
}

TEST_CASE("cyclic gradient and number operator")
{
    const P p = P::monomial(Word{0, 1, 0});
    CHECK(cyclic_grad(0, p) == P::monomial(Word{1, 0}) + P::monomial(Word{0, 1}));
    CHECK(cyclic_grad(1, p) == P::monomial(Word{0, 0}));
    // sum_i Y_i D_i P = sum over cyclic rotations; for P = Y1^2, D_1 P = 2 Y1
    CHECK(cyclic_grad(0, P::monomial(Word{0, 0})) == 2.0 * P::generator(0));
    CHECK(sigma_inv(P::monomial(Word{0, 1}, 4.0)) == P::monomial(Word{0, 1}, 2.0));
    CHECK_THROWS_AS(sigma_inv(P::constant(1)), std::domain_error);
}

TEST_CASE("star is an anti-multiplicative involution")
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        const P p = random_poly(rng, 2, 3, 4);
        const P q = random_poly(rng, 2, 3, 4);
        CHECK(star(star(p)) == p);
        CHECK(star(p * q) == star(q) * star(p));
        const T u = random_tensor(rng, 2, 2, 3);
        const T v = random_tensor(rng, 2, 2, 3);
        CHECK(star(star(u)) == u);
        CHECK(hs_adjoint(hs_adjoint(u)) == u);
        CHECK(star(u * v) == star(v) * star(u));
    }
}

TEST_CASE("R-norm is submultiplicative and exact on monomials")
{
    std::mt19937_64 rng(5);
    CHECK(rnorm(P::monomial(Word{0, 1, 1}, -2.0), 3.0) == 54.0);
    CHECK(rnorm(T::monomial(Word{0}, Word{1, 1}, 0.5), 2.0) == 4.0);
    for (int t = 0; t < 30; ++t) {
        const P p = random_poly(rng, 2, 3, 4);
        const P q = random_poly(rng, 2, 3, 4);
        CHECK(rnorm(p * q, 2.5) <= rnorm(p, 2.5) * rnorm(q, 2.5) * (1 + 1e-14));
        const T u = random_tensor(rng, 2, 2, 3);
        const T v = random_tensor(rng, 2, 2, 3);
        CHECK(rnorm(u * v, 2.5) <= rnorm(u, 2.5) * rnorm(v, 2.5) * (1 + 1e-14));
    }
}

TEST_CASE("evaluation on the Fock space")
{
    const auto q = QSpec<double>::uniform(2, 0.3);
    const FockSpace<double> space(q, 4);
    const VacuumStates<double> states(space);
    const P x1 = P::generator(0);
    const P x2 = P::generator(1);
    // eval_poly is an algebra map on low levels
    const Mat<double> lhs = eval_poly(x1 * x2, space).matrix;
    const Mat<double> rhs = eval_poly(x1, space).matrix * eval_poly(x2, space).matrix;
    CHECK(max_abs((lhs - rhs).leftCols(space.basis().offset(3))) < 1e-14);
    CHECK(trace(x1 * x1 * x2 * x2, states) == doctest::Approx(1.0));
    CHECK(trace(x1 * x2 * x1 * x2, states) == doctest::Approx(0.3));
    CHECK(max_abs(apply_vacuum(x1 * x2, states) - space.apply_word(Word{0, 1}, space.vacuum())) == 0.0);
}

TEST_CASE("eval_tensor of a (x) b° is the rank-one map |a Omega><b* Omega|")
{
    std::mt19937_64 rng(6);
    const auto q = random_qspec(2, 0.4, rng);
    const FockSpace<double> space(q, 4);
    const VacuumStates<double> states(space);
    const Mat<double> g = space.metric();
    for (int t = 0; t < 10; ++t) {
        const P a = random_poly(rng, 2, 2, 3);
        const P b = random_poly(rng, 2, 2, 3);
        const Vec<double> av = apply_vacuum(a, states);
        const Vec<double> bv = apply_vacuum(star(b), states);
        const Mat<double> expect = av * (g * bv).transpose();
        CHECK(max_abs(eval_tensor(T::elementary(a, b), states).matrix - expect) < 1e-12);
        // <u, T v> = <u, a Omega> <b* Omega, v>
        const Mat<double> op = eval_tensor(T::elementary(a, b), states).matrix;
        Eigen::SelfAdjointEigenSolver<Mat<double>> es(op.transpose() * op);
        CHECK(es.eigenvalues().reverse().tail(static_cast<Eigen::Index>(space.dim()) - 1).cwiseAbs().maxCoeff() <
              1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
    }
}
