#include "mqg/wick_basis.hpp"

#include <cmath>

namespace mqg {

GramSqrtInv::GramSqrtInv(const FockSpace<double>& space)
{
    for (int n = 0; n <= space.depth(); ++n) roots_.push_back(GramSpectrum(space, n).inverse_sqrt());
}

double GramSqrtInv::residual(const FockSpace<double>& space, int n) const
{
    const Mat<double>& b = level(n);
    const Mat<double> r = b * space.gram(n) * b - Mat<double>::Identity(b.rows(), b.cols());
    return r.cwiseAbs().maxCoeff();
}

NCPoly<double> ortho_poly(const Word& w, const WickTable<double>& table, const GramSqrtInv& roots)
{
    const auto& basis = table.basis();
    const int n = static_cast<int>(w.size());
    const Mat<double>& b = roots.level(n);
    const auto row = static_cast<Eigen::Index>(basis.local_index(w));
    NCPoly<double> out;
    for (Eigen::Index col = 0; col < b.cols(); ++col) {
        if (b(row, col) == 0.0) continue;
        out += table.at_index(basis.offset(n) + static_cast<std::size_t>(col)) * b(row, col);
    }
    return out;
}

WickNormCheck wick_rnorm_bound_check(const WickTable<double>& table, int n, double R, double q)
{
    const auto& basis = table.basis();
    double worst = 0;
    for (std::size_t k = 0; k < basis.level_size(n); ++k) worst = std::max(worst, rnorm(table.at_index(basis.offset(n) + k), R));
    return {n, worst, std::pow(R + 1.0 / (1.0 - q), n)};
}

} // namespace mqg
