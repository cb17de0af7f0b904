#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <utility>
#include <vector>

#include "mqg/fock.hpp"
#include "mqg/spectral.hpp"
#include "rational.hpp"

using namespace mqg;

namespace {

double max_abs(const Mat<double>& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Sum over pair partitions of positions with equal letters; every crossing
// pair of pairs contributes q of their two letters.
double pairing_sum(const Word& w, const QSpec<double>& q)
{
    const int n = static_cast<int>(w.size());
    if (n % 2) return 0.0;
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    double total = 0;
    auto rec = [&](auto&& self) -> void {
        int a = 0;
        while (a < n && partner[static_cast<std::size_t>(a)] >= 0) ++a;
        if (a == n) {
            double weight = 1;
            for (int x = 0; x < n; ++x) {
                const int y = partner[static_cast<std::size_t>(x)];
                if (y < x) continue;
                for (int u = x + 1; u < y; ++u) {
                    const int v = partner[static_cast<std::size_t>(u)];
                    if (v > y) weight *= q(w[x], w[u]);
                }
            }
            total += weight;
            return;
        }
        for (int b = a + 1; b < n; ++b) {
            if (partner[static_cast<std::size_t>(b)] >= 0 || w[a] != w[b]) continue;
            partner[static_cast<std::size_t>(a)] = b;
            partner[static_cast<std::size_t>(b)] = a;
            self(self);
            partner[static_cast<std::size_t>(a)] = partner[static_cast<std::size_t>(b)] = -1;
        }
    };
    rec(rec);
    return total;
}

std::vector<Word> all_words(int N, int n)
{
    std::vector<Word> out{Word{}};
    for (int k = 0; k < n; ++k) {
        std::vector<Word> next;
        for (const auto& w : out)
            for (int i = 0; i < N; ++i) next.push_back(w + Word{i});
        out = std::move(next);
    }
    return out;
}

} // namespace

TEST_CASE("graded basis indexing round-trips")
{
    const GradedBasis b(3, 4);
    CHECK(b.size() == 1 + 3 + 9 + 27 + 81);
    CHECK(b.offset(2) == 4);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(b.index(b.word(k)) == k);
    CHECK(b.word(0).empty());
    CHECK_THROWS(b.index(Word{0, 3}));
}

TEST_CASE("level-2 Gram matrix by hand")
{
    const double q = 0.1;
    const FockSpace<double> space(QSpec<double>::uniform(2, q), 2);
    // order: 11, 12, 21, 22
    Mat<double> expect(4, 4);
    expect << 1 + q, 0, 0, 0, 0, 1, q, 0, 0, q, 1, 0, 0, 0, 0, 1 + q;
    CHECK(max_abs(space.gram(2) - expect) < 1e-15);
}

TEST_CASE("gram_perm equals gram_rec exactly over the rationals")
{
    const auto q = rational_qspec({{"1/3", "-2/7", "1/5"}, {"-2/7", "-1/2", "3/11"}, {"1/5", "3/11", "5/9"}});
    const FockSpace<Rational> space(q, 4);
    for (int n = 0; n <= 4; ++n) CHECK(exactly_equal(gram_perm(space, n), gram_rec(space, n)));
    const auto q2 = rational_qspec({{"9/10", "-7/8"}, {"-7/8", "-4/5"}});
    const FockSpace<Rational> space2(q2, 6);
    for (int n = 0; n <= 6; ++n) CHECK(exactly_equal(gram_perm(space2, n), gram_rec(space2, n)));
}

TEST_CASE("commutation relation and left/right commutation")
{
    std::mt19937_64 rng(3);
    for (int N = 1; N <= 3; ++N) {
        const auto q = random_qspec(N, 0.6, rng);
        const FockSpace<double> space(q, 4);
        const auto dim = static_cast<Eigen::Index>(space.dim());
        const auto cols = static_cast<Eigen::Index>(space.basis().offset(4));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const Mat<double> li = op_annihilate(space, i).matrix;
                const Mat<double> cj = op_create(space, j).matrix;
                Mat<double> m = li * cj - q(i, j) * cj * li;
                if (i == j) m -= Mat<double>::Identity(dim, dim);
                CHECK(max_abs(m.leftCols(cols)) < 1e-12);
                const Mat<double> x = op_X(space, i).matrix;
                const Mat<double> r = op_create_right(space, j).matrix + op_annihilate_right(space, j).matrix;
                CHECK(max_abs((x * r - r * x).leftCols(space.basis().offset(3))) < 1e-12);
            }
    }
}

TEST_CASE("annihilation is the adjoint of creation and fields are self-adjoint")
{
    std::mt19937_64 rng(5);
    const auto q = random_qspec(2, 0.5, rng);
    const FockSpace<double> space(q, 4);
    const Mat<double> g = space.metric();
    for (int i = 0; i < 2; ++i) {
        const Mat<double> c = op_create(space, i).matrix;
        const Mat<double> a = op_annihilate(space, i).matrix;
        const auto inner = static_cast<Eigen::Index>(space.basis().offset(4));
        // <c u, v> = <u, a v> for u on levels < d
        const Mat<double> lhs = (c.transpose() * g).topRows(inner);
        const Mat<double> rhs = (g * a).topRows(inner);
        CHECK(max_abs(lhs - rhs) < 1e-12);
        const Mat<double> x = op_X(space, i).matrix;
        const Mat<double> gx = (g * x).topLeftCorner(inner, inner);
        CHECK(max_abs(gx - gx.transpose()) < 1e-12);
    }
}

TEST_CASE("Gram matrices are positive definite and class block diagonal")
{
    const FockSpace<double> space(QSpec<double>::uniform(3, 0.4), 4);
    for (int n = 0; n <= 4; ++n) {
        Eigen::SelfAdjointEigenSolver<Mat<double>> es(space.gram(n));
        CHECK(es.eigenvalues().minCoeff() > 0);
        CHECK(gram_is_class_block_diagonal(space, n));
    }
}

TEST_CASE("inverse-norm bounds")
{
    for (double q : {0.05, 0.2, 0.3}) {
        const FockSpace<double> space(QSpec<double>::uniform(2, q), 5);
        for (int n = 0; n <= 5; ++n) {
            const auto b = pnorm_bounds(q, n);
            const double norm = gram_inverse_norm(space, n);
            CHECK(norm <= b.simple * (1 + 1e-12));
            CHECK(norm <= b.product * (1 + 1e-12));
        }
    }
}

TEST_CASE("free moments are Catalan numbers")
{
    const FockSpace<double> space(QSpec<double>::uniform(1, 0.0), 5);
    const double catalan[] = {1, 1, 2, 5, 14, 42};
    for (int k = 0; k <= 5; ++k) CHECK(trace_moment(space, Word(std::vector<Letter>(2 * k, 0))) == catalan[k]);
    CHECK(trace_moment(space, Word{0, 0, 0}) == 0.0);
}

TEST_CASE("single-variable moments follow the crossing distribution")
{
    const double q = 0.37;
    const FockSpace<double> space(QSpec<double>::uniform(1, q), 4);
    const auto x = [&](int n) { return trace_moment(space, Word(std::vector<Letter>(static_cast<std::size_t>(n), 0))); };
    CHECK(x(4) == doctest::Approx(2 + q).epsilon(1e-14));
    CHECK(x(6) == doctest::Approx(5 + 6 * q + 3 * q * q + q * q * q).epsilon(1e-14));
    const double m8 = 14 + 28 * q + 28 * q * q + 20 * std::pow(q, 3) + 10 * std::pow(q, 4) + 4 * std::pow(q, 5) + std::pow(q, 6);
    CHECK(x(8) == doctest::Approx(m8).epsilon(1e-13));
}

TEST_CASE("mixed moments match the pair-partition sum")
{
    std::mt19937_64 rng(17);
    for (int N = 2; N <= 3; ++N) {
        const auto q = random_qspec(N, 0.7, rng);
        const FockSpace<double> space(q, 3);
        const VacuumStates<double> states(space);
        for (int n = 0; n <= 6; ++n)
            for (const Word& w : all_words(N, n)) {
                CHECK(std::abs(trace_moment(space, w) - pairing_sum(w, q)) < 1e-12);
                CHECK(std::abs(states.moment(w) - pairing_sum(w, q)) < 1e-12);
            }
    }
}

TEST_CASE("moment spot values")
{
    Mat<double> m(2, 2);
    m << 0.2, -0.45, -0.45, 0.6;
    const FockSpace<double> space(QSpec<double>(m), 2);
    CHECK(trace_moment(space, Word{0, 0}) == doctest::Approx(1.0));
    CHECK(trace_moment(space, Word{1, 1, 1, 1}) == doctest::Approx(2.6));
    CHECK(trace_moment(space, Word{0, 1, 0, 1}) == doctest::Approx(-0.45));
    CHECK(trace_moment(space, Word{0, 0, 1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("moments beyond the exact range are refused")
{
    const FockSpace<double> space(QSpec<double>::uniform(2, 0.1), 2);
    CHECK_NOTHROW(trace_moment(space, Word{0, 0, 0, 0, 0}));
    CHECK_THROWS_AS(trace_moment(space, Word{0, 0, 0, 0, 0, 0}), std::domain_error);
    CHECK_THROWS_AS(trace_moment(space, Word{2}), std::out_of_range);
}
