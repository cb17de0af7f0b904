#include "mqg/verify.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mqg {

namespace {

const std::vector<std::string> kCheckNames = {
    "qcore.coeff_a_reduced_word_independence",
    "qcore.coeff_a_uniform_power",
    "qcore.class_dimensions_sum",
    "fock.commutation_relation",
    "fock.left_right_commute",
    "fock.annihilation_gram_adjoint",
    "fock.gram_perm_equals_rec",
    "fock.gram_class_block_diagonal",
    "fock.field_self_adjoint",
    "fock.moments_pair_partition",
    "spectral.inverse_norm_bounds",
    "ncpoly.rnorm_submultiplicative",
    "ncpoly.free_diff_leibniz",
    "ncpoly.eval_tensor_rank_one",
    "ncpoly.star_involution",
    "wick.vacuum_property",
    "wick.gram_via_trace",
    "wick.sqrt_inverse_block_diagonal",
    "wick.rnorm_bound",
    "xi.partition_of_unity",
    "xi.class_decomposition",
    "xi.series_matches_operator",
    "xi.series_star_symmetric",
    "xi.hs_geometric_bound",
    "xi.adjointness_oracle",
    "xi.deriv_pairing",
    "xi.adjoint_routes_agree",
    "transport.power_bound",
    "transport.levelwise_bound",
    "transport.neumann_tail",
    "transport.derivation_factorization",
    "transport.conjugate_relation",
    "transport.cyclic_gradient",
    "transport.potential_star_invariant",
};

/// Reordered floating-point products of the same factors differ by a few ulp.
constexpr double kUlp = 2.220446049250313e-16;

const std::map<std::string, double> kDefaultTolerances = {
    {"qcore.coeff_a_reduced_word_independence", 8 * kUlp},
    {"qcore.coeff_a_uniform_power", 0.0},
    {"fock.commutation_relation", 1e-12},
    {"fock.left_right_commute", 1e-12},
    {"fock.annihilation_gram_adjoint", 1e-12},
    {"fock.gram_perm_equals_rec", 1e-12},
    {"fock.field_self_adjoint", 1e-12},
    {"fock.moments_pair_partition", 1e-12},
    {"ncpoly.free_diff_leibniz", 0.0},
    {"ncpoly.eval_tensor_rank_one", 1e-12},
    {"ncpoly.star_involution", 0.0},
    {"wick.vacuum_property", 1e-12},
    {"wick.gram_via_trace", 1e-12},
    {"wick.sqrt_inverse_block_diagonal", 1e-10},
    {"xi.partition_of_unity", 0.0},
    {"xi.class_decomposition", 8 * kUlp},
    {"xi.series_matches_operator", 1e-10},
    {"xi.series_star_symmetric", 0.0},
    {"xi.adjointness_oracle", 1e-8},
    {"xi.deriv_pairing", 1e-10},
    {"xi.adjoint_routes_agree", 1e-10},
    {"transport.derivation_factorization", 1e-6},
    {"transport.conjugate_relation", 1e-6},
    {"transport.cyclic_gradient", 1e-10},
    {"transport.potential_star_invariant", 0.0},
};

/// Relative rounding allowance for measured/bound ratios that can be tight.
constexpr double kRatioSlack = 1e-12;
/// Slack on the measured Neumann ratio.
constexpr double kNeumannRatioSlack = 0.05;
/// Below this the residual is rounding noise and ratios are meaningless.
constexpr double kNeumannFloor = 1e-12;

double tol(const RunConfig& c, const std::string& name)
{
    if (auto it = c.tolerances.find(name); it != c.tolerances.end()) return it->second;
    return kDefaultTolerances.at(name);
}

double max_abs(const Mat<double>& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double max_coeff(const NCPoly<double>& p)
{
    double m = 0;
    for (const auto& [w, c] : p.terms()) m = std::max(m, std::abs(c));
    return m;
}

double max_coeff(const NCTensor<double>& t)
{
    double m = 0;
    for (const auto& [k, c] : t.terms()) m = std::max(m, std::abs(c));
    return m;
}

Word random_word(std::mt19937_64& rng, int n_generators, int length)
{
    std::uniform_int_distribution<int> letter(0, n_generators - 1);
    std::vector<Letter> l(static_cast<std::size_t>(length));
    for (auto& x : l) x = static_cast<Letter>(letter(rng));
    return Word(std::move(l));
}

/// Small-integer coefficients keep products and sums exact in double.
NCPoly<double> random_poly(std::mt19937_64& rng, int n_generators, int max_degree, int n_terms, bool integer)
{
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> icoef(-3, 3);
    std::uniform_real_distribution<double> rcoef(-1.0, 1.0);
    NCPoly<double> p;
    for (int t = 0; t < n_terms; ++t)
        p.add(random_word(rng, n_generators, deg(rng)), integer ? icoef(rng) : rcoef(rng));
    return p;
}

Permutation random_permutation(std::mt19937_64& rng, int n)
{
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 0);
    std::shuffle(img.begin(), img.end(), rng);
    return Permutation(std::move(img));
}

/// Mixed q-Gaussian moment by pair partitions: sum over colour-respecting
/// pairings of prod over crossings {(a,b),(c,d)}, a<c<b<d, of q(w_a, w_c).
double pairing_moment(const Word& w, const QSpec<double>& q)
{
    const std::size_t n = w.size();
    if (n % 2) return 0.0;
    std::vector<int> partner(n, -1);
    double total = 0;
    auto rec = [&](auto&& self, std::size_t first) -> void {
        while (first < n && partner[first] >= 0) ++first;
        if (first == n) {
            double f = 1;
            for (std::size_t a = 0; a < n; ++a) {
                const auto b = static_cast<std::size_t>(partner[a]);
                if (b < a) continue;
                for (std::size_t c = a + 1; c < b; ++c) {
                    const auto d = static_cast<std::size_t>(partner[c]);
                    if (d > b) f *= q(w[a], w[c]);
                }
            }
            total += f;
            return;
        }
        for (std::size_t b = first + 1; b < n; ++b) {
            if (partner[b] >= 0 || w[b] != w[first]) continue;
            partner[first] = static_cast<int>(b);
            partner[b] = static_cast<int>(first);
            self(self, first + 1);
            partner[first] = partner[b] = -1;
        }
    };
    rec(rec, 0);
    return total;
}

/// Columns of levels <= `level`.
Eigen::Index columns_upto(const FockSpace<double>& space, int level)
{
    return level < 0 ? 0 : static_cast<Eigen::Index>(space.basis().offset(level + 1));
}

// ---------------------------------------------------------------- qcore

void check_qcore(const RunConfig& cfg, const QSpec<double>& q, std::mt19937_64& rng, Report& rep)
{
    const int N = q.n_generators();
    {
        double worst = 0;
        int trials = 0;
        int attempts = 0;
        std::uniform_int_distribution<int> len(3, 7);
        while (trials < 100 && attempts < 10000) {
            ++attempts;
            const int n = len(rng);
            const Permutation sigma = random_permutation(rng, n);
            if (sigma.inversions() < 2) continue;
            const auto r1 = random_reduced_word(sigma, rng);
            const auto r2 = random_reduced_word(sigma, rng);
            if (r1 == r2) continue;
            const Word w = random_word(rng, N, n);
            const double a = coeff_a(std::span<const int>(r1), w, q);
            const double b = coeff_a(std::span<const int>(r2), w, q);
            worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
            ++trials;
        }
        rep.add_bounded("qcore.coeff_a_reduced_word_independence", worst,
                        tol(cfg, "qcore.coeff_a_reduced_word_independence"),
                        std::to_string(trials) + " pairs with distinct decompositions, relative difference");
    }
    {
        const double u = q.q_max() > 0 ? q.q_max() : 0.5;
        const auto uq = QSpec<double>::uniform(N, u);
        double worst = 0;
        for (int n = 1; n <= 6; ++n) {
            const Word w = random_word(rng, N, n);
            for_each_permutation(n, [&](const Permutation& s) {
                double expected = 1;
                for (int k = 0; k < s.inversions(); ++k) expected *= u;
                worst = std::max(worst, std::abs(coeff_a(s, w, uq) - expected));
            });
        }
        rep.add_bounded("qcore.coeff_a_uniform_power", worst, tol(cfg, "qcore.coeff_a_uniform_power"),
                        "all of S_n, n <= 6");
    }
    {
        std::uint64_t mismatches = 0;
        for (int n = 0; n <= 8; ++n)
            for (int m = 1; m <= 4; ++m) {
                std::uint64_t sum = 0;
                for (const auto& [sig, dim] : enumerate_classes(n, m)) sum += dim;
                std::uint64_t pw = 1;
                for (int k = 0; k < n; ++k) pw *= static_cast<std::uint64_t>(m);
                if (sum != pw) ++mismatches;
            }
        rep.add_bounded("qcore.class_dimensions_sum", static_cast<double>(mismatches), 0.0, "n <= 8, N <= 4");
    }
}

// ---------------------------------------------------------------- fock

void check_fock(const RunConfig& cfg, const FockSpace<double>& space, Report& rep)
{
    const int N = space.n_generators();
    const int d = space.depth();
    const auto& q = space.qspec();
    const auto& basis = space.basis();
    std::vector<Mat<double>> L, Ls, R;
    for (int i = 0; i < N; ++i) {
        L.push_back(op_create(space, i).matrix);
        Ls.push_back(op_annihilate(space, i).matrix);
        R.push_back(op_create_right(space, i).matrix);
    }
    const auto dim = static_cast<Eigen::Index>(space.dim());
    {
        const Eigen::Index cols = columns_upto(space, d - 1);
        double worst = 0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                Mat<double> m = Ls[i] * L[j] - q(i, j) * L[j] * Ls[i];
                if (i == j) m -= Mat<double>::Identity(dim, dim);
                worst = std::max(worst, max_abs(m.leftCols(cols)));
            }
        rep.add_bounded("fock.commutation_relation", worst, tol(cfg, "fock.commutation_relation"), "levels <= d-1");
    }
    {
        const Eigen::Index cols = columns_upto(space, d - 2);
        double worst = 0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) worst = std::max(worst, max_abs((L[i] * R[j] - R[j] * L[i]).leftCols(cols)));
        rep.add_bounded("fock.left_right_commute", worst, tol(cfg, "fock.left_right_commute"), "levels <= d-2");
    }
    {
        double worst = 0;
        for (int i = 0; i < N; ++i)
            for (int n = 0; n < d; ++n) {
                const auto o0 = static_cast<Eigen::Index>(basis.offset(n));
                const auto o1 = static_cast<Eigen::Index>(basis.offset(n + 1));
                const auto s0 = static_cast<Eigen::Index>(basis.level_size(n));
                const auto s1 = static_cast<Eigen::Index>(basis.level_size(n + 1));
                const Mat<double> up = L[i].block(o1, o0, s1, s0);
                const Mat<double> down = Ls[i].block(o0, o1, s0, s1);
                worst = std::max(worst, max_abs(space.gram(n + 1) * up - down.transpose() * space.gram(n)));
            }
        rep.add_bounded("fock.annihilation_gram_adjoint", worst, tol(cfg, "fock.annihilation_gram_adjoint"));
    }
    {
        double worst = 0;
        const int top = std::min(6, d);
        for (int n = 0; n <= top; ++n) worst = std::max(worst, max_abs(gram_perm(space, n) - gram_rec(space, n)));
        rep.add_bounded("fock.gram_perm_equals_rec", worst, tol(cfg, "fock.gram_perm_equals_rec"),
                        "n <= " + std::to_string(top));
    }
    {
        int bad = 0;
        for (int n = 0; n <= d; ++n)
            if (!gram_is_class_block_diagonal(space, n)) ++bad;
        rep.add_bounded("fock.gram_class_block_diagonal", bad, 0.0, "structural zeros across classes");
    }
    {
        const Mat<double> g = space.metric();
        const Eigen::Index cols = columns_upto(space, d - 1);
        double worst = 0;
        for (int i = 0; i < N; ++i) {
            const Mat<double> x = op_X(space, i).matrix;
            const Mat<double> a = (g * x).topLeftCorner(cols, cols);
            worst = std::max(worst, max_abs(a - a.transpose()));
        }
        rep.add_bounded("fock.field_self_adjoint", worst, tol(cfg, "fock.field_self_adjoint"), "levels < d");
    }
    {
        const VacuumStates<double> states(space);
        const int len = std::min(2 * d, 8);
        double worst = 0;
        std::size_t words = 0;
        for (int n = 0; n <= len; n += 2) {
            const GradedBasis all(N, n);
            for (std::size_t k = 0; k < all.level_size(n); ++k) {
                const Word w = all.word(all.offset(n) + k);
                worst = std::max(worst, std::abs(states.moment(w) - pairing_moment(w, q)));
                ++words;
            }
        }
        rep.add_bounded("fock.moments_pair_partition", worst, tol(cfg, "fock.moments_pair_partition"),
                        std::to_string(words) + " words of even length <= " + std::to_string(len));
    }
    {
        const double qm = q.q_max();
        if (!(qm < 0.5)) {
            rep.add_skipped("spectral.inverse_norm_bounds", "needs q_max < 1/2");
        } else {
            double worst_ratio = 0;
            for (int n = 0; n <= d; ++n) {
                const double norm = gram_inverse_norm(space, n);
                const auto b = pnorm_bounds(qm, n);
                worst_ratio = std::max({worst_ratio, norm / b.simple, norm / b.product});
            }
            rep.add_bounded("spectral.inverse_norm_bounds", worst_ratio, 1.0 + kRatioSlack,
                            "max ||G_n^{-1}|| / bound over the simple and product bounds");
        }
    }
}

// ---------------------------------------------------------------- ncpoly

void check_ncpoly(const RunConfig& cfg, const FockSpace<double>& space, std::mt19937_64& rng, Report& rep)
{
    const int N = space.n_generators();
    const int d = space.depth();
    {
        const double R = 3.0;
        double worst = 0;
        for (int t = 0; t < 50; ++t) {
            const auto a = random_poly(rng, N, 3, 5, false);
            const auto b = random_poly(rng, N, 2, 5, false);
            const double lhs = rnorm(a * b, R);
            const double rhs = rnorm(a, R) * rnorm(b, R);
            worst = std::max(worst, lhs / std::max(rhs, 1e-300));
        }
        rep.add_bounded("ncpoly.rnorm_submultiplicative", worst, 1.0 + kRatioSlack, "max ||pq||/(||p|| ||q||), R = 3");
    }
    {
        double worst = 0;
        const auto one = NCPoly<double>::constant(1.0);
        for (int t = 0; t < 50; ++t) {
            const auto a = random_poly(rng, N, 3, 4, true);
            const auto b = random_poly(rng, N, 3, 4, true);
            for (int j = 0; j < N; ++j) {
                const auto lhs = free_diff(j, a * b);
                const auto rhs = bimodule(one, free_diff(j, a), b) + bimodule(a, free_diff(j, b), one);
                worst = std::max(worst, max_coeff(lhs - rhs));
            }
        }
        rep.add_bounded("ncpoly.free_diff_leibniz", worst, tol(cfg, "ncpoly.free_diff_leibniz"),
                        "d(PQ) = dP.Q + P.dQ, integer coefficients");
    }
    {
        const VacuumStates<double> states(space);
        const int top = std::max(0, std::min(2, d / 2));
        double worst = 0;
        for (int t = 0; t < 20; ++t) {
            const auto a = random_poly(rng, N, top, 3, false);
            const auto b = random_poly(rng, N, top, 3, false);
            const auto p = random_poly(rng, N, top, 3, false);
            const Mat<double> op = eval_tensor(NCTensor<double>::elementary(a, b), states).matrix;
            const Vec<double> pv = apply_vacuum(p, states);
            const Vec<double> expect = space.inner(pv, apply_vacuum(star(b), states)) * apply_vacuum(a, states);
            worst = std::max(worst, max_abs(op * pv - expect));
        }
        rep.add_bounded("ncpoly.eval_tensor_rank_one", worst, tol(cfg, "ncpoly.eval_tensor_rank_one"));
    }
    {
        double worst = 0;
        for (int t = 0; t < 50; ++t) {
            const auto a = random_poly(rng, N, 4, 5, true);
            const auto b = random_poly(rng, N, 4, 5, true);
            worst = std::max(worst, max_coeff(star(star(a)) - a));
            worst = std::max(worst, max_coeff(star(a * b) - star(b) * star(a)));
        }
        rep.add_bounded("ncpoly.star_involution", worst, tol(cfg, "ncpoly.star_involution"));
    }
}

// ---------------------------------------------------------------- wick

void check_wick(const RunConfig& cfg, const FockSpace<double>& space, const WickTable<double>& table, Report& rep)
{
    const int d = space.depth();
    const auto& basis = space.basis();
    const VacuumStates<double> states(space);
    {
        const int top = std::min(4, d);
        double worst = 0;
        for (std::size_t idx = 0; idx < basis.offset(top + 1); ++idx) {
            const Vec<double> v = apply_vacuum(table.at_index(idx), states);
            worst = std::max(worst, max_abs(v - space.basis_vector(basis.word(idx))));
        }
        rep.add_bounded("wick.vacuum_property", worst, tol(cfg, "wick.vacuum_property"),
                        "|w| <= " + std::to_string(top));
    }
    {
        double worst = 0;
        for (int n = 0; n <= d; ++n) {
            const auto sz = basis.level_size(n);
            for (std::size_t a = 0; a < sz; ++a)
                for (std::size_t b = 0; b < sz; ++b) {
                    const auto& pa = table.at_index(basis.offset(n) + a);
                    const auto& pb = table.at_index(basis.offset(n) + b);
                    const double t = trace(star(pb) * pa, states);
                    worst = std::max(worst, std::abs(t - space.gram(n)(static_cast<Eigen::Index>(a),
                                                                       static_cast<Eigen::Index>(b))));
                }
        }
        rep.add_bounded("wick.gram_via_trace", worst, tol(cfg, "wick.gram_via_trace"));
    }
    {
        const GramSqrtInv roots(space);
        double worst = 0;
        int structural = 0;
        for (int n = 0; n <= d; ++n) {
            worst = std::max(worst, roots.residual(space, n));
            const Mat<double>& b = roots.level(n);
            for (Eigen::Index r = 0; r < b.rows(); ++r)
                for (Eigen::Index c = 0; c < b.cols(); ++c) {
                    const Word wr = basis.word(basis.offset(n) + static_cast<std::size_t>(r));
                    const Word wc = basis.word(basis.offset(n) + static_cast<std::size_t>(c));
                    if (!(ClassSignature(space.n_generators(), wr) == ClassSignature(space.n_generators(), wc)) &&
                        b(r, c) != 0.0)
                        ++structural;
                }
        }
        rep.add_bounded("wick.sqrt_inverse_block_diagonal", structural ? INFINITY : worst,
                        tol(cfg, "wick.sqrt_inverse_block_diagonal"),
                        "max |B G B - I|; " + std::to_string(structural) + " cross-class nonzeros");
    }
    {
        const double q = space.qspec().q_max();
        const double R = radius(std::min(q, 0.999), cfg.eps);
        double worst = 0;
        for (int n = 0; n <= d; ++n) {
            const auto c = wick_rnorm_bound_check(table, n, R, q);
            worst = std::max(worst, c.max_rnorm / c.bound);
        }
        rep.add_bounded("wick.rnorm_bound", worst, 1.0 + kRatioSlack, "max ||psi_w||_R / (R + 1/(1-q))^n");
    }
}

// ---------------------------------------------------------------- xi

void check_xi(const RunConfig& cfg, const FockSpace<double>& space, const WickTable<double>& table,
              std::mt19937_64& rng, Report& rep)
{
    const int N = space.n_generators();
    const int d = space.depth();
    const auto dim = static_cast<Eigen::Index>(space.dim());
    const VacuumStates<double> states(space);
    {
        Mat<double> sum = vacuum_projection(space).matrix;
        for (int n = 1; n <= d; ++n)
            for (const auto& [sig, count] : enumerate_classes(n, N)) sum += class_projection(space, sig).matrix;
        rep.add_bounded("xi.partition_of_unity", max_abs(sum - Mat<double>::Identity(dim, dim)),
                        tol(cfg, "xi.partition_of_unity"));
    }
    {
        double worst = 0;
        for (int j = 0; j < N; ++j) {
            Mat<double> sum = Mat<double>::Zero(dim, dim);
            for (int n = 0; n <= d; ++n)
                for (const auto& [sig, count] : enumerate_classes(n, N)) {
                    double qj = 1;
                    for (int t = 0; t < N; ++t)
                        for (int k = 0; k < sig.counts()[t]; ++k) qj *= space.qspec()(j, t);
                    sum += qj * class_projection(space, sig).matrix;
                }
            const Mat<double> xi = xi_operator(space, j).matrix;
            for (Eigen::Index k = 0; k < dim; ++k)
                worst = std::max(worst, std::abs(sum(k, k) - xi(k, k)) / std::max(std::abs(xi(k, k)), 1e-300));
            worst = std::max(worst, max_abs(sum - Mat<double>(sum.diagonal().asDiagonal())));
        }
        rep.add_bounded("xi.class_decomposition", worst, tol(cfg, "xi.class_decomposition"),
                        "relative difference on the diagonal, off-diagonal exact zero");
    }
    std::vector<NCTensor<double>> series;
    for (int j = 0; j < N; ++j) series.push_back(xi_series(space, table, j, d));
    {
        double worst = 0;
        for (int j = 0; j < N; ++j)
            worst = std::max(worst, max_abs(eval_tensor(series[j], states).matrix - xi_operator(space, j).matrix));
        rep.add_bounded("xi.series_matches_operator", worst, tol(cfg, "xi.series_matches_operator"),
                        "levels <= " + std::to_string(d));
    }
    {
        double worst = 0;
        for (int j = 0; j < N; ++j) worst = std::max(worst, max_coeff(star(series[j]) - hs_adjoint(series[j])));
        rep.add_bounded("xi.series_star_symmetric", worst, std::max(tol(cfg, "xi.series_star_symmetric"), 1e-14),
                        "tensor star equals operator adjoint on the series");
    }
    {
        bool ok = true;
        double worst = 0;
        double bound = 0;
        for (int j = 0; j < N; ++j) {
            const auto r = hs_norm_sq(space, j);
            ok = ok && r.holds;
            worst = std::max(worst, r.partial_sum);
            bound = std::max(bound, r.geometric_bound);
        }
        CheckResult c{"xi.hs_geometric_bound", ok ? CheckStatus::pass : CheckStatus::fail, worst, bound,
                      "truncated ||Xi_j||_HS^2 against level caps and 1/(1 - q^2 N)"};
        rep.add(c);
    }
    const QDerivation deriv(space, table);
    {
        if (d < 4) {
            rep.add_skipped("xi.adjointness_oracle", "needs d >= 4 for exact pairings");
        } else {
            const OrthonormalFrame frame(space);
            std::vector<Word> monomials;
            for (int n = 0; n <= 3; ++n)
                for (const Word& w : GradedBasis(N, n).words(n)) monomials.push_back(w);
            std::vector<std::vector<Mat<double>>> hat(static_cast<std::size_t>(N));
            for (int j = 0; j < N; ++j)
                for (const Word& p : monomials)
                    hat[j].push_back(frame.to_orthonormal(qderiv_matrix(space, j, NCPoly<double>::monomial(p)).matrix));
            double worst = 0;
            std::uniform_int_distribution<int> pick_j(0, N - 1);
            for (int t = 0; t < 50; ++t) {
                const int j = pick_j(rng);
                const auto a = random_poly(rng, N, 2, 3, false);
                const auto b = random_poly(rng, N, 2, 3, false);
                const auto adj = deriv.adjoint(j, a, b);
                const Mat<double> lhs_op = frame.to_orthonormal(eval_tensor(NCTensor<double>::elementary(a, b), states).matrix);
                for (std::size_t k = 0; k < monomials.size(); ++k) {
                    const Word p_rev = monomials[k].reversed();
                    double lhs = 0;
                    for (const auto& [w, c] : adj.terms()) lhs += c * states.moment(p_rev + w);
                    const double rhs = (lhs_op.array() * hat[j][k].array()).sum();
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
            rep.add_bounded("xi.adjointness_oracle", worst, tol(cfg, "xi.adjointness_oracle"),
                            "50 random (a, b), deg <= 2, all monomials deg <= 3");
        }
    }
    {
        if (d < 4) {
            rep.add_skipped("xi.deriv_pairing", "needs d >= 4 for exact pairings");
        } else {
            const int top = std::min(5, 2 * d - 3);
            double worst = 0;
            for (int s = 0; s < N; ++s) {
                const auto xi = xi_series(space, table, s, std::min(d, 4));
                for (int n = 0; n <= top; ++n)
                    for (const Word& p : GradedBasis(N, n).words(n)) {
                        const double lhs = states.moment(p.reversed() + Word{s});
                        double rhs = 0;
                        const auto dq = qderiv_tensor(s, NCPoly<double>::monomial(p), xi);
                        for (const auto& [key, c] : dq.terms())
                            rhs += c * states.moment(key.first) * states.moment(key.second);
                        worst = std::max(worst, std::abs(lhs - rhs));
                    }
            }
            rep.add_bounded("xi.deriv_pairing", worst, tol(cfg, "xi.deriv_pairing"),
                            "all monomials deg <= " + std::to_string(top));
        }
    }
    {
        const int top = std::max(0, std::min(2, d / 2));
        double worst = 0;
        std::uniform_int_distribution<int> pick_j(0, N - 1);
        for (int t = 0; t < 20; ++t) {
            const int j = pick_j(rng);
            const auto a = random_poly(rng, N, top, 3, false);
            const auto b = random_poly(rng, N, top, 3, false);
            const auto fast = deriv.adjoint(j, a, b);
            const auto literal = qderiv_adjoint_contraction(j, a, b, series[j], states);
            worst = std::max(worst, max_coeff(fast - literal));
        }
        rep.add_bounded("xi.adjoint_routes_agree", worst, tol(cfg, "xi.adjoint_routes_agree"),
                        "Fock-coordinate adjoint vs literal contraction, deg <= " + std::to_string(top));
    }
}

// ---------------------------------------------------------------- transport

void check_transport(const RunConfig& cfg, const QSpec<double>& q, Report& rep)
{
    static const char* names[] = {"transport.power_bound",          "transport.levelwise_bound",
                                  "transport.neumann_tail",         "transport.derivation_factorization",
                                  "transport.conjugate_relation",   "transport.cyclic_gradient",
                                  "transport.potential_star_invariant"};
    const int N = q.n_generators();
    const double qm = q.q_max();
    const int D = cfg.effective_cutoff();
    if (!(qm < 1) || !in_regime(qm, N, cfg.eps) || !(pi_bound(qm, N, cfg.eps) < 1)) {
        for (const char* n : names) rep.add_skipped(n, "pi(q, N) >= 1: outside the certified regime");
        rep.diagnostics()["transport"] = io::Json{{"certified", false}};
        return;
    }
    const auto params = TransportParams::make(qm, N, cfg.eps, cfg.neumann, D);
    const FockSpace<double> space(q, D);
    const WickTable<double> table(q, D);
    const VacuumStates<double> states(space);
    const auto bundle = compute_conjugates(q, params);

    double worst_norm = 0;
    for (double x : bundle.xi_norms) worst_norm = std::max(worst_norm, x);
    rep.add_bounded("transport.power_bound", worst_norm, params.pi, "truncated ||Xi_j - 1(x)1°||_R vs pi(q, N)");

    if (!(qm < 0.5) || D < 1) {
        rep.add_skipped("transport.levelwise_bound", "needs q_max < 1/2 and D >= 1");
    } else {
        double worst = 0;
        for (int j = 0; j < N; ++j)
            for (int n = 1; n <= std::min(4, D); ++n) {
                const auto c = levelwise_bound_check(space, table, j, n, params.R);
                worst = std::max(worst, c.bound > 0 ? c.norm / c.bound : (c.norm > 0 ? INFINITY : 0.0));
            }
        rep.add_bounded("transport.levelwise_bound", worst, 1.0 + kRatioSlack, "max level-n norm / bound, 1 <= n <= 4");
    }

    std::vector<NCTensor<double>> truncs;
    std::vector<NCTensor<double>> inverses;
    for (int j = 0; j < N; ++j) {
        truncs.push_back(xi_series(space, table, j, D).truncated(D));
        inverses.push_back(xi_inverse_series(truncs.back(), params.neumann_order, D, params.pi));
    }
    {
        const int kmax = std::max(params.neumann_order, 4);
        double worst_ratio = 0;
        io::Json tails = io::Json::array();
        for (int j = 0; j < N; ++j) {
            io::Json row = io::Json::array();
            double prev = -1;
            for (int k = 0; k <= kmax; ++k) {
                const double r =
                    neumann_residual(truncs[j], xi_inverse_series(truncs[j], k, D, params.pi), D, params.R);
                row.push_back(r);
                if (prev > kNeumannFloor && r > kNeumannFloor) worst_ratio = std::max(worst_ratio, r / prev);
                prev = r;
            }
            tails.push_back(std::move(row));
        }
        rep.diagnostics()["neumann_tail_residuals"] = std::move(tails);
        rep.add_bounded("transport.neumann_tail", worst_ratio, params.pi + kNeumannRatioSlack,
                        "max successive residual ratio (above 1e-12) vs pi + 0.05");
    }
    {
        double worst = 0;
        for (int j = 0; j < N; ++j)
            for (int n = 1; n <= 3; ++n)
                for (const Word& p : GradedBasis(N, n).words(n)) {
                    const auto P = NCPoly<double>::monomial(p);
                    const auto lhs = multiply(qderiv_tensor(j, P, truncs[j]), inverses[j], D);
                    const auto diff = (lhs - free_diff(j, P)).truncated(D);
                    worst = std::max(worst, max_abs(eval_tensor(diff, states).matrix));
                }
        rep.add_bounded("transport.derivation_factorization", worst, tol(cfg, "transport.derivation_factorization"),
                        "eval_tensor((d^Q P) Xi^{-1} - dP), deg P <= 3, total degree <= D");
    }
    {
        const int top = std::min(5, 2 * D - (D + 1));
        if (top < 1) {
            rep.add_skipped("transport.conjugate_relation", "D too small for an exact pairing");
        } else {
            double worst = 0;
            for (int j = 0; j < N; ++j)
                worst = std::max(worst, conjugate_relation_check(states, j, bundle.xi[j], top).max_residual);
            rep.add_bounded("transport.conjugate_relation", worst, tol(cfg, "transport.conjugate_relation"),
                            "monomials deg <= " + std::to_string(top));
        }
    }
    {
        double worst = 0;
        for (int i = 0; i < N; ++i) {
            const auto g = cyclic_grad(i, bundle.potential) - bundle.xi[i];
            for (const auto& [w, c] : g.terms())
                if (static_cast<int>(w.size()) <= D - 1) worst = std::max(worst, std::abs(c));
        }
        rep.add_bounded("transport.cyclic_gradient", worst, tol(cfg, "transport.cyclic_gradient"),
                        "max coefficient of D_i V - xi_i on degrees <= D-1");
    }
    rep.add_bounded("transport.potential_star_invariant", max_coeff(star(bundle.potential) - bundle.potential),
                    tol(cfg, "transport.potential_star_invariant"));

    io::Json t;
    t["certified"] = true;
    t["pi"] = params.pi;
    t["R"] = params.R;
    t["neumann_order"] = params.neumann_order;
    t["cutoff"] = params.cutoff;
    t["xi_norms"] = bundle.xi_norms;
    t["neumann_residuals"] = bundle.neumann_residuals;
    t["distances_to_free"] = bundle.distances;
    t["xi_star_asymmetry"] = bundle.star_asymmetry;
    t["smallness_threshold"] = cfg.threshold;
    t["smallness_threshold_source"] = "external constant, supplied as configuration";
    io::Json below = io::Json::array();
    for (double x : bundle.distances) below.push_back(x < cfg.threshold);
    t["distance_below_threshold"] = std::move(below);
    rep.diagnostics()["transport"] = std::move(t);
}

} // namespace

// ---------------------------------------------------------------- RunConfig

void RunConfig::validate() const
{
    if (n_generators < 1 || n_generators > 8) throw std::invalid_argument("n must lie in [1, 8]");
    if (depth < 0 || depth > 12) throw std::invalid_argument("depth must lie in [0, 12]");
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    if (cutoff > depth) throw std::invalid_argument("cutoff D cannot exceed depth d");
    if (q_source == QSource::matrix && q_matrix.rows() != n_generators)
        throw std::invalid_argument("q-matrix size does not match n");
    if (q_source != QSource::matrix && !(std::abs(q) < 1)) throw std::invalid_argument("|q| must be < 1");
    for (const auto& f : formats)
        if (f != "json" && f != "csv" && f != "txt") throw std::invalid_argument("unknown format '" + f + "'");
    for (const auto& [name, value] : tolerances) {
        if (!kDefaultTolerances.count(name)) throw std::invalid_argument("no tolerance named '" + name + "'");
        if (!(value >= 0)) throw std::invalid_argument("tolerance must be non-negative");
    }
    (void)qspec();
}

QSpec<double> RunConfig::qspec() const
{
    switch (q_source) {
    case QSource::matrix:
        return QSpec<double>(q_matrix);
    case QSource::random: {
        std::mt19937_64 rng(seed);
        return random_qspec(n_generators, std::abs(q), rng);
    }
    case QSource::uniform:
    default:
        return QSpec<double>::uniform(n_generators, q);
    }
}

bool RunConfig::wants(const std::string& format) const
{
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

io::Json RunConfig::to_json() const
{
    io::Json j;
    j["n"] = n_generators;
    j["q_source"] = q_source == QSource::uniform ? "uniform" : q_source == QSource::matrix ? "matrix" : "random";
    if (q_source != QSource::matrix) j["q"] = q;
    if (!q_matrix_path.empty()) j["q_matrix_path"] = q_matrix_path;
    j["q_matrix"] = io::matrix_to_json(qspec().entries());
    j["seed"] = seed;
    j["depth"] = depth;
    j["eps"] = eps;
    j["neumann"] = neumann;
    j["cutoff"] = effective_cutoff();
    j["threshold"] = threshold;
    j["formats"] = formats;
    io::Json t = io::Json::object();
    for (const auto& [k, v] : tolerances) t[k] = v;
    j["tolerance_overrides"] = std::move(t);
    return j;
}

void RunConfig::apply_config_text(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "n") n_generators = std::stoi(val);
            else if (key == "q") { q = std::stod(val); q_source = QSource::uniform; }
            else if (key == "q-random") { q = std::stod(val); q_source = QSource::random; }
            else if (key == "q-matrix") {
                q_matrix_path = val;
                q_matrix = io::matrix_from_text(io::read_file(val));
                q_source = QSource::matrix;
            }
            else if (key == "depth") depth = std::stoi(val);
            else if (key == "eps") eps = std::stod(val);
            else if (key == "neumann") neumann = std::stoi(val);
            else if (key == "cutoff") cutoff = std::stoi(val);
            else if (key == "seed") seed = std::stoull(val);
            else if (key == "threshold") threshold = std::stod(val);
            else if (key == "out") out = val;
            else if (key == "format") {
                formats.clear();
                std::istringstream fs(val);
                std::string f;
                while (std::getline(fs, f, ',')) formats.push_back(trim(f));
            }
            else if (key.rfind("tol.", 0) == 0) tolerances[key.substr(4)] = std::stod(val);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": value out of range");
        }
    }
}

// ---------------------------------------------------------------- Report

std::string to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    default: return "skipped";
    }
}

void Report::add(CheckResult r)
{
    for (const auto& c : checks_)
        if (c.name == r.name) throw std::logic_error("duplicate check '" + r.name + "'");
    checks_.push_back(std::move(r));
}

void Report::add_bounded(const std::string& name, double residual, double bound, std::string detail)
{
    add({name, residual <= bound ? CheckStatus::pass : CheckStatus::fail, residual, bound, std::move(detail)});
}

void Report::add_skipped(const std::string& name, std::string reason)
{
    add({name, CheckStatus::skipped, 0.0, 0.0, std::move(reason)});
}

const CheckResult& Report::at(const std::string& name) const
{
    for (const auto& c : checks_)
        if (c.name == name) return c;
    throw std::out_of_range("no check '" + name + "'");
}

bool Report::passed() const
{
    return std::none_of(checks_.begin(), checks_.end(), [](const auto& c) { return c.status == CheckStatus::fail; });
}

io::Json Report::to_json() const
{
    io::Json j;
    j["config"] = config_;
    io::Json checks = io::Json::array();
    for (const auto& c : checks_) {
        io::Json r;
        r["name"] = c.name;
        r["status"] = to_string(c.status);
        r["max_residual"] = c.max_residual;
        r["bound"] = c.bound;
        r["slack"] = c.slack();
        r["detail"] = c.detail;
        checks.push_back(std::move(r));
    }
    j["checks"] = std::move(checks);
    j["diagnostics"] = diagnostics_;
    j["passed"] = passed();
    j["versions"] = io::Json{{"mqg", "1.0.0"},
                             {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                           "." + std::to_string(EIGEN_MINOR_VERSION)}};
    return j;
}

const std::vector<std::string>& verification_check_names() { return kCheckNames; }

Report run_verification(const RunConfig& config)
{
    config.validate();
    const QSpec<double> q = config.qspec();
    Report rep(config.to_json());
    std::mt19937_64 rng(config.seed);
    const FockSpace<double> space(q, config.depth);
    const WickTable<double> table(q, config.depth);
    check_qcore(config, q, rng, rep);
    check_fock(config, space, rep);
    check_ncpoly(config, space, rng, rep);
    check_wick(config, space, table, rep);
    check_xi(config, space, table, rng, rep);
    check_transport(config, q, rep);
    return rep;
}

} // namespace mqg
