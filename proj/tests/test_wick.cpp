#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mqg/wick.hpp"
#include "mqg/wick_basis.hpp"
#include "rational.hpp"

using namespace mqg;

namespace {

double max_abs(const Mat<double>& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

using P = NCPoly<double>;

} // namespace

TEST_CASE("low-degree Wick polynomials by hand")
{
    Mat<double> m(2, 2);
    m << 0.25, -0.4, -0.4, 0.1;
    const QSpec<double> q(m);
    const WickTable<double> table(q, 3);
    const P y1 = P::generator(0);
    const P y2 = P::generator(1);
    CHECK(table(Word{}) == P::constant(1));
    CHECK(table(Word{0}) == y1);
    CHECK(table(Word{0, 0}) == y1 * y1 - P::constant(1));
    CHECK(table(Word{0, 1}) == y1 * y2);
    // single-letter words follow the q-Hermite recursion
    const P h3 = y1 * y1 * y1 - (2 + 0.25) * y1;
    CHECK(max_abs(Mat<double>::Constant(1, 1, rnorm(table(Word{0, 0, 0}) - h3, 1.0))) < 1e-15);
    // X_1 X_2 X_1 Omega = e_121 + q_12 e_2
    const P mixed = y1 * y2 * y1 + 0.4 * y2;
    CHECK(rnorm(table(Word{0, 1, 0}) - mixed, 1.0) < 1e-15);
}

TEST_CASE("Wick property holds exactly over the rationals")
{
    const auto q = rational_qspec({{"1/3", "-2/7", "1/5"}, {"-2/7", "-1/2", "3/11"}, {"1/5", "3/11", "2/9"}});
    const FockSpace<Rational> space(q, 4);
    const VacuumStates<Rational> states(space);
    const WickTable<Rational> table(q, 4);
    for (std::size_t idx = 0; idx < space.dim(); ++idx)
        CHECK(exactly_equal(apply_vacuum(table.at_index(idx), states), space.basis_vector(space.word(idx))));
}

TEST_CASE("Wick polynomials are monic with lower-degree corrections")
{
    std::mt19937_64 rng(8);
    const auto q = random_qspec(3, 0.5, rng);
    const WickTable<double> table(q, 4);
    for (std::size_t idx = 0; idx < table.basis().size(); ++idx) {
        const Word w = table.basis().word(idx);
        const P& psi = table.at_index(idx);
        CHECK(psi.degree() == static_cast<int>(w.size()));
        CHECK(psi.coeff(w) == 1.0);
        CHECK(psi.homogeneous_part(static_cast<int>(w.size())).size() == 1);
        // parity: only degrees |w|, |w|-2, ...
        for (const auto& [v, c] : psi.terms()) CHECK((w.size() - v.size()) % 2 == 0);
    }
}

TEST_CASE("Gram matrix recovered as tau(psi_v^* psi_w)")
{
    std::mt19937_64 rng(9);
    const auto q = random_qspec(2, 0.4, rng);
    const FockSpace<double> space(q, 4);
    const VacuumStates<double> states(space);
    const WickTable<double> table(q, 2);
    for (int n = 0; n <= 2; ++n) {
        const auto words = space.basis().words(n);
        for (std::size_t a = 0; a < words.size(); ++a)
            for (std::size_t b = 0; b < words.size(); ++b) {
                const double t = trace(star(table(words[a])) * table(words[b]), states);
                CHECK(std::abs(t - space.gram(n)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))) < 1e-12);
            }
    }
}

TEST_CASE("orthonormal polynomials")
{
    std::mt19937_64 rng(10);
    for (int N = 1; N <= 3; ++N) {
        const auto q = random_qspec(N, 0.3, rng);
        const FockSpace<double> space(q, 4);
        const VacuumStates<double> states(space);
        const WickTable<double> table(q, 4);
        const GramSqrtInv roots(space);
        for (int n = 0; n <= 4; ++n) {
            CHECK(roots.residual(space, n) < 1e-10);
            const auto words = space.basis().words(n);
            for (std::size_t a = 0; a < words.size(); ++a)
                for (std::size_t b = 0; b < words.size(); ++b) {
                    const double ip = space.inner(apply_vacuum(ortho_poly(words[a], table, roots), states),
                                                  apply_vacuum(ortho_poly(words[b], table, roots), states));
                    CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-10);
                }
        }
    }
}

TEST_CASE("R-norms of Wick polynomials respect their bound")
{
    for (double q : {0.05, 0.2}) {
        const auto qs = QSpec<double>::uniform(2, q);
        const WickTable<double> table(qs, 5);
        for (int n = 0; n <= 5; ++n) {
            const auto c = wick_rnorm_bound_check(table, n, 3.0, q);
            CHECK(c.max_rnorm <= c.bound * (1 + 1e-12));
        }
    }
}
