#pragma once

// The Gram square-root change of basis B = G_n^{-1/2} and the orthonormal
// polynomials p_w = sum_v B_{wv} psi_v.

#include "mqg/spectral.hpp"
#include "mqg/wick.hpp"

namespace mqg {

/// B_n = G_n^{-1/2} for n = 0..depth, each with the class-block zero pattern.
class GramSqrtInv {
public:
    explicit GramSqrtInv(const FockSpace<double>& space);

    const Mat<double>& level(int n) const { return roots_.at(static_cast<std::size_t>(n)); }
    int depth() const noexcept { return static_cast<int>(roots_.size()) - 1; }

    /// max |B G_n B - I|
    double residual(const FockSpace<double>& space, int n) const;

private:
    std::vector<Mat<double>> roots_;
};

/// p_w = sum_{|v| = |w|} B_{wv} psi_v.
NCPoly<double> ortho_poly(const Word& w, const WickTable<double>& table, const GramSqrtInv& roots);

struct WickNormCheck {
    int level;
    double max_rnorm; ///< max_{|w| = n} ||psi_w||_R
    double bound;     ///< (R + 1/(1-q))^n
    bool holds() const { return max_rnorm <= bound; }
};

WickNormCheck wick_rnorm_bound_check(const WickTable<double>& table, int n, double R, double q);

} // namespace mqg
