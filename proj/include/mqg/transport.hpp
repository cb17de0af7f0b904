#pragma once

// Neumann inversion of the Xi series, conjugate variables xi_j, the
// potential V, the R-norm bound pi(q, N) and the small-q scan.

#include <optional>
#include <span>

#include "mqg/xi.hpp"

namespace mqg {

/// R = (2 + eps) / (1 - q)
double radius(double q, double eps);

/// True when q (3 - 2q + (3 + eps)^2 N^2) < 1.
bool in_regime(double q, int n_generators, double eps);

/// pi(q, N) = q N^2 (3 + eps)^2 / (1 - q (3 - 2q + (3 + eps)^2 N^2)).
/// Throws std::domain_error outside the regime.
double pi_bound(double q, int n_generators, double eps);

/// Smallest K with pi^{K+1} / (1 - pi) <= tol.
int default_neumann_order(double pi, double tol = 1e-8);

struct TransportParams {
    int n_generators = 0;
    double q = 0;   ///< q_max
    double eps = 1; ///< free parameter of the radius
    double R = 0;
    double pi = 0;
    int neumann_order = 0; ///< K
    int cutoff = 0;        ///< D: Xi levels and tensor total degree; Fock depth d = D
    bool certified = true; ///< pi < 1; otherwise no convergence guarantee (pi = +inf when the denominator is <= 0)

    /// Validates the regime; K < 0 selects default_neumann_order(pi).
    static TransportParams make(double q, int n_generators, double eps, int neumann_order, int cutoff);
    /// Same, but outside the regime returns certified = false instead of
    /// throwing. K must then be given explicitly.
    static TransportParams make_uncertified(double q, int n_generators, double eps, int neumann_order, int cutoff);
};

struct LevelBoundCheck {
    int level;
    double norm;  ///< ||level-n part of Xi_j||_R
    double bound; ///< q^n N^{2n} (R + 1/(1-q))^{2n} ((1-q)/(1-2q))^n
    bool holds() const { return norm <= bound; }
};

LevelBoundCheck levelwise_bound_check(const FockSpace<double>& space, const WickTable<double>& table, int j, int n,
                                      double R);

/// sum_{k <= K} (1 (x) 1° - Xi)^k with every product truncated to total
/// degree D. Refuses pi >= 1.
NCTensor<double> xi_inverse_series(const NCTensor<double>& xi, int neumann_order, int cutoff, double pi);

/// ||Xi * S - 1 (x) 1°||_R, the product truncated to total degree D.
double neumann_residual(const NCTensor<double>& xi, const NCTensor<double>& inverse, int cutoff, double R);

/// xi_j = d_j^(Q)*((Xi_j^{-1})^*), applied termwise. Degree <= D + 1.
NCPoly<double> conjugate_series(const QDerivation& deriv, int j, const NCTensor<double>& inverse);

struct ConjugateCheck {
    double max_residual = 0;
    Word worst;
    std::size_t monomials = 0;
};

/// max over monomials P with deg P <= max_degree of
/// |<xi Omega, P Omega>_Q - sum_{A (x) B in d_j P} tau(A) tau(B)|.
ConjugateCheck conjugate_relation_check(const VacuumStates<double>& states, int j, const NCPoly<double>& xi,
                                        int max_degree);

/// V = Sigma(1/2 sum_i xi_i Y_i + Y_i xi_i), formed as Sigma(S + S^*) with
/// S = 1/2 sum_i xi_i Y_i so that V is exactly star-invariant.
NCPoly<double> potential(std::span<const NCPoly<double>> xi);

/// ||xi_j - Y_j||_R
double distance_to_free(const NCPoly<double>& xi_j, int j, double R);

struct ConjugateBundle {
    TransportParams params;
    std::vector<NCPoly<double>> xi;
    NCPoly<double> potential;
    std::vector<double> xi_norms;          ///< truncated ||Xi_j - 1 (x) 1°||_R, levels <= D
    std::vector<double> neumann_residuals; ///< per j
    std::vector<double> distances;         ///< ||xi_j - Y_j||_R
    std::vector<double> star_asymmetry;    ///< max |coeff(xi_j - xi_j^*)|
};

/// Runs the whole pipeline on a Fock space of depth D. Uncertified params
/// bypass the pi < 1 refusal of xi_inverse_series.
ConjugateBundle compute_conjugates(const QSpec<double>& q, const TransportParams& params);

/// Equally spaced in log10 with `per_decade` points per decade, endpoints included.
std::vector<double> log_grid(double lo, double hi, int per_decade);

struct ScanRow {
    double q = 0;
    double pi = 0; ///< +inf when the denominator is <= 0
    bool in_regime = false; ///< pi < 1
    double xi_norm = 0;  ///< max_j truncated ||Xi_j - 1 (x) 1°||_R
    double distance = 0; ///< max_j ||xi_j - Y_j||_R
};

struct ScanReport {
    std::vector<ScanRow> rows;
    double threshold = 0;
    std::optional<double> q0; ///< largest grid q with pi < 1 and distance < threshold
};

/// For each grid value q, Q = q * shape (shape normalised to max |entry| = 1).
/// Points with pi >= 1 are still evaluated, uncertified, and never chosen as q0.
ScanReport q0_scan(const Mat<double>& shape, double eps, double threshold, std::span<const double> grid,
                   int neumann_order, int cutoff);

} // namespace mqg
