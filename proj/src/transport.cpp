#include "mqg/transport.hpp"

#include <cmath>
#include <limits>

namespace mqg {

double radius(double q, double eps)
{
    if (!(eps > 0) || !(q >= 0 && q < 1)) throw std::domain_error("radius: need eps > 0 and 0 <= q < 1");
    return (2 + eps) / (1 - q);
}

bool in_regime(double q, int n_generators, double eps)
{
    const double c = (3 + eps) * (3 + eps) * n_generators * n_generators;
    return q >= 0 && q * (3 - 2 * q + c) < 1;
}

double pi_bound(double q, int n_generators, double eps)
{
    if (!(eps > 0)) throw std::domain_error("pi_bound: eps must be positive");
    if (!in_regime(q, n_generators, eps))
        throw std::domain_error("pi_bound: q(3 - 2q + (3+eps)^2 N^2) >= 1, outside the proven regime");
    const double c = (3 + eps) * (3 + eps) * n_generators * n_generators;
    return q * n_generators * n_generators * (3 + eps) * (3 + eps) / (1 - q * (3 - 2 * q + c));
}

int default_neumann_order(double pi, double tol)
{
    if (!(pi >= 0 && pi < 1)) throw std::domain_error("default_neumann_order: need 0 <= pi < 1");
    if (pi == 0) return 0;
    return std::max(0, static_cast<int>(std::ceil(std::log(tol * (1 - pi)) / std::log(pi))) - 1);
}

TransportParams TransportParams::make(double q, int n_generators, double eps, int neumann_order, int cutoff)
{
    if (cutoff < 0) throw std::invalid_argument("TransportParams: negative cutoff");
    TransportParams p;
    p.n_generators = n_generators;
    p.q = q;
    p.eps = eps;
    p.R = radius(q, eps);
    p.pi = pi_bound(q, n_generators, eps);
    p.neumann_order = neumann_order < 0 ? default_neumann_order(p.pi) : neumann_order;
    p.cutoff = cutoff;
    return p;
}

TransportParams TransportParams::make_uncertified(double q, int n_generators, double eps, int neumann_order,
                                                  int cutoff)
{
    if (in_regime(q, n_generators, eps) && pi_bound(q, n_generators, eps) < 1)
        return make(q, n_generators, eps, neumann_order, cutoff);
    if (neumann_order < 0) throw std::invalid_argument("TransportParams: explicit K required outside the regime");
    if (cutoff < 0) throw std::invalid_argument("TransportParams: negative cutoff");
    TransportParams p;
    p.n_generators = n_generators;
    p.q = q;
    p.eps = eps;
    p.R = radius(q, eps);
    p.pi = in_regime(q, n_generators, eps) ? pi_bound(q, n_generators, eps) : std::numeric_limits<double>::infinity();
    p.neumann_order = neumann_order;
    p.cutoff = cutoff;
    p.certified = false;
    return p;
}

LevelBoundCheck levelwise_bound_check(const FockSpace<double>& space, const WickTable<double>& table, int j, int n,
                                      double R)
{
    const double q = space.qspec().q_max();
    if (!(q < 0.5)) throw std::domain_error("levelwise_bound_check: needs q_max < 1/2");
    const int N = space.n_generators();
    const double norm = rnorm(xi_level_part(space, table, j, n), R);
    const double bound = std::pow(q, n) * std::pow(static_cast<double>(N), 2 * n) * std::pow(R + 1 / (1 - q), 2 * n) *
                         std::pow((1 - q) / (1 - 2 * q), n);
    return {n, norm, bound};
}

namespace {

NCTensor<double> neumann_sum(const NCTensor<double>& xi, int neumann_order, int cutoff)
{
    const NCTensor<double> delta = (NCTensor<double>::unit() - xi).truncated(cutoff);
    NCTensor<double> sum = NCTensor<double>::unit();
    NCTensor<double> term = NCTensor<double>::unit();
    for (int k = 1; k <= neumann_order; ++k) {
        term = multiply(term, delta, cutoff);
        sum += term;
    }
    return sum;
}

} // namespace

NCTensor<double> xi_inverse_series(const NCTensor<double>& xi, int neumann_order, int cutoff, double pi)
{
    if (!(pi < 1)) throw std::domain_error("xi_inverse_series: pi(q, N) >= 1, Neumann series not certified");
    return neumann_sum(xi, neumann_order, cutoff);
}

double neumann_residual(const NCTensor<double>& xi, const NCTensor<double>& inverse, int cutoff, double R)
{
    return rnorm(multiply(xi.truncated(cutoff), inverse, cutoff) - NCTensor<double>::unit(), R);
}

NCPoly<double> conjugate_series(const QDerivation& deriv, int j, const NCTensor<double>& inverse)
{
    NCPoly<double> out;
    const NCTensor<double> t = star(inverse);
    for (const auto& [key, c] : t.terms()) deriv.accumulate_adjoint(j, key.first, key.second, c, out);
    return out;
}

ConjugateCheck conjugate_relation_check(const VacuumStates<double>& states, int j, const NCPoly<double>& xi,
                                        int max_degree)
{
    const auto& space = states.space();
    if (xi.degree() + max_degree > 2 * space.depth())
        throw std::domain_error("conjugate_relation_check: pairing not exact at this depth");
    const GradedBasis words(space.n_generators(), max_degree);
    ConjugateCheck out;
    for (std::size_t idx = 0; idx < words.size(); ++idx) {
        const Word p = words.word(idx);
        const Word p_rev = p.reversed();
        double lhs = 0;
        for (const auto& [w, c] : xi.terms()) lhs += c * states.moment(p_rev + w);
        double rhs = 0;
        const NCTensor<double> dp = free_diff(j, NCPoly<double>::monomial(p));
        for (const auto& [key, c] : dp.terms())
            rhs += c * states.moment(key.first) * states.moment(key.second);
        const double r = std::abs(lhs - rhs);
        if (r > out.max_residual || out.monomials == 0) {
            out.max_residual = std::max(out.max_residual, r);
            if (r >= out.max_residual) out.worst = p;
        }
        ++out.monomials;
    }
    return out;
}

NCPoly<double> potential(std::span<const NCPoly<double>> xi)
{
    NCPoly<double> half;
    for (std::size_t i = 0; i < xi.size(); ++i) half += xi[i] * NCPoly<double>::generator(static_cast<int>(i)) * 0.5;
    return sigma_inv(half + star(half));
}

double distance_to_free(const NCPoly<double>& xi_j, int j, double R)
{
    return rnorm(xi_j - NCPoly<double>::generator(j), R);
}

namespace {

double max_star_asymmetry(const NCPoly<double>& p)
{
    double worst = 0;
    const NCPoly<double> diff = p - star(p);
    for (const auto& [w, c] : diff.terms()) worst = std::max(worst, std::abs(c));
    return worst;
}

} // namespace

ConjugateBundle compute_conjugates(const QSpec<double>& q, const TransportParams& params)
{
    const int D = params.cutoff;
    const FockSpace<double> space(q, D);
    const WickTable<double> table(q, D);
    const QDerivation deriv(space, table);
    ConjugateBundle b;
    b.params = params;
    for (int j = 0; j < q.n_generators(); ++j) {
        const NCTensor<double> xi_full = xi_series(space, table, j, D);
        b.xi_norms.push_back(rnorm(xi_full - NCTensor<double>::unit(), params.R));
        const NCTensor<double> xi_trunc = xi_full.truncated(D);
        const NCTensor<double> inverse = params.certified
                                             ? xi_inverse_series(xi_trunc, params.neumann_order, D, params.pi)
                                             : neumann_sum(xi_trunc, params.neumann_order, D);
        b.neumann_residuals.push_back(neumann_residual(xi_trunc, inverse, D, params.R));
        NCPoly<double> xj = conjugate_series(deriv, j, inverse);
        b.distances.push_back(distance_to_free(xj, j, params.R));
        b.star_asymmetry.push_back(max_star_asymmetry(xj));
        b.xi.push_back(std::move(xj));
    }
    b.potential = potential(b.xi);
    return b;
}

std::vector<double> log_grid(double lo, double hi, int per_decade)
{
    if (!(lo > 0 && hi >= lo && per_decade > 0)) throw std::invalid_argument("log_grid: need 0 < lo <= hi");
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    const int steps = static_cast<int>(std::lround((b - a) * per_decade));
    std::vector<double> out;
    for (int k = 0; k <= steps; ++k) out.push_back(std::pow(10.0, a + (b - a) * k / std::max(steps, 1)));
    return out;
}

ScanReport q0_scan(const Mat<double>& shape, double eps, double threshold, std::span<const double> grid,
                   int neumann_order, int cutoff)
{
    const double scale = shape.cwiseAbs().maxCoeff();
    if (!(scale > 0)) throw std::invalid_argument("q0_scan: shape matrix is zero");
    const Mat<double> unit_shape = shape / scale;
    const int N = static_cast<int>(shape.rows());
    ScanReport out;
    out.threshold = threshold;
    for (double q : grid) {
        ScanRow row;
        row.q = q;
        const QSpec<double> qs(unit_shape * q);
        const auto params = TransportParams::make_uncertified(q, N, eps, neumann_order, cutoff);
        row.pi = params.pi;
        row.in_regime = params.certified;
        const auto bundle = compute_conjugates(qs, params);
        for (double d : bundle.distances) row.distance = std::max(row.distance, d);
        for (double x : bundle.xi_norms) row.xi_norm = std::max(row.xi_norm, x);
        if (row.in_regime && row.distance < threshold && (!out.q0 || q > *out.q0)) out.q0 = q;
        out.rows.push_back(row);
    }
    return out;
}

} // namespace mqg
