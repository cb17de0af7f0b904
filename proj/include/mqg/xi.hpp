#pragma once

// The multiplier Xi_j (diagonal operator and tensor series), class
// projections, the derivation d_j^(Q)(X) = [X, r_j], its adjoint, and
// Hilbert-Schmidt bookkeeping.

#include <unordered_map>

#include "mqg/wick_basis.hpp"

namespace mqg {

/// Xi_j e_w = q_j(w) e_w.
LinOp<double> xi_operator(const FockSpace<double>& space, int j);

/// Gram-orthogonal projection onto span{e_w : w in the class}. Classes are
/// mutually orthogonal, so this is a coordinate mask.
LinOp<double> class_projection(const FockSpace<double>& space, const ClassSignature& sig);

/// p_Omega
LinOp<double> vacuum_projection(const FockSpace<double>& space);

/// sum_{n <= max_level} sum_{|w| = |v| = n} q_j(w) (G_n^{-1})_{vw} psi_v (x) psi_w^*,
/// which equals sum_{|w| = n} q_j(w) p_w (x) p_w^*. Terms of total degree
/// above `max_total_degree` are skipped when it is non-negative.
NCTensor<double> xi_series(const FockSpace<double>& space, const WickTable<double>& table, int j, int max_level,
                           int max_total_degree = -1);

/// The same series assembled literally from the orthonormal polynomials p_w.
NCTensor<double> xi_series_orthonormal(const FockSpace<double>& space, const WickTable<double>& table, int j,
                                       int max_level);

/// The level-n summand sum_{|w| = |v| = n} of the series.
NCTensor<double> xi_level_part(const FockSpace<double>& space, const WickTable<double>& table, int j, int n);

struct HSReport {
    std::vector<double> level_sums; ///< sum over classes of q_j(class)^2 dim(class)
    std::vector<double> level_caps; ///< (q_max^2 N)^n
    double partial_sum = 0;         ///< sum over n <= d
    double geometric_bound = 0;     ///< 1 / (1 - q_max^2 N); infinite outside q^2 N < 1
    bool holds = false;
};

/// Truncated ||Xi_j||_HS^2 with the level-wise and geometric envelopes.
HSReport hs_norm_sq(const FockSpace<double>& space, int j);

/// [p(X), r_j] as a dense operator.
LinOp<double> qderiv_matrix(const FockSpace<double>& space, int j, const NCPoly<double>& p);

/// Symbolic d_j^(Q) p: sum over p = A Y_j B of (A (x) B°) . Xi_j.
NCTensor<double> qderiv_tensor(int j, const NCPoly<double>& p, const NCTensor<double>& xi_j);

/// d_j^(Q)*(a (x) b°) = a Y_j b - sum tau(c) a d - sum tau(d') c' b over the
/// terms c (x) d° of d_j^(Q) b and c' (x) d'° of d_j^(Q) a, contracted
/// literally against the tensor series `xi_j` (levels >= max(deg a, deg b)).
NCPoly<double> qderiv_adjoint_contraction(int j, const NCPoly<double>& a, const NCPoly<double>& b,
                                          const NCTensor<double>& xi_j, const VacuumStates<double>& states);

/// d_j^(Q)* with the tau-contractions of the Xi series evaluated in Fock
/// coordinates:
///
///   sum tau(A psi_v) (G^{-1})_{vw} q_j(w) psi_w^*  =  sum_w q_j(w) (X_{A*} Omega)_w psi_w^*,
///
/// so no tensor series is materialized. Exact whenever deg a, deg b <= d.
class QDerivation {
public:
    QDerivation(const FockSpace<double>& space, const WickTable<double>& table);

    NCPoly<double> adjoint(int j, const NCPoly<double>& a, const NCPoly<double>& b) const;
    /// out += c * d_j^(Q)*(Y_a (x) Y_b°)
    void accumulate_adjoint(int j, const Word& a, const Word& b, double c, NCPoly<double>& out) const;

    const VacuumStates<double>& states() const noexcept { return states_; }

private:
    const NCPoly<double>& left_contraction(int j, const Word& prefix) const;
    const NCPoly<double>& right_contraction(int j, const Word& suffix) const;

    const FockSpace<double>* space_;
    const WickTable<double>* table_;
    VacuumStates<double> states_;
    mutable std::vector<std::unordered_map<Word, NCPoly<double>, WordHash>> left_;
    mutable std::vector<std::unordered_map<Word, NCPoly<double>, WordHash>> right_;
};

/// Change of basis to the Gram-orthonormal frame {p_w Omega}, where the
/// Hilbert-Schmidt inner product is the Frobenius one.
class OrthonormalFrame {
public:
    explicit OrthonormalFrame(const FockSpace<double>& space);

    /// U^{-1} A U with U = diag(G_n^{-1/2}).
    Mat<double> to_orthonormal(const Mat<double>& a) const;
    /// <A, B>_HS = tr(B^dagger A).
    double hs_inner(const Mat<double>& a, const Mat<double>& b) const;
    double hs_norm(const Mat<double>& a) const;

private:
    Mat<double> u_;
    Mat<double> u_inv_;
};

} // namespace mqg
