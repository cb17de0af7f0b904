#include "mqg/spectral.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace mqg {

std::vector<std::pair<ClassSignature, std::vector<Eigen::Index>>> class_members(const GradedBasis& basis, int level)
{
    std::map<ClassSignature, std::vector<Eigen::Index>> groups;
    for (std::size_t k = 0; k < basis.level_size(level); ++k) {
        const Word w = basis.word(basis.offset(level) + k);
        groups[ClassSignature(basis.n_generators(), w)].push_back(static_cast<Eigen::Index>(k));
    }
    return {groups.begin(), groups.end()};
}

GramSpectrum::GramSpectrum(const FockSpace<double>& space, int level)
    : level_(level), dim_(static_cast<Eigen::Index>(space.basis().level_size(level)))
{
    const Mat<double>& g = space.gram(level);
    for (auto& [sig, members] : class_members(space.basis(), level)) {
        const auto m = static_cast<Eigen::Index>(members.size());
        Mat<double> block(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c) block(r, c) = g(members[r], members[c]);
        Eigen::SelfAdjointEigenSolver<Mat<double>> es(block);
        if (es.info() != Eigen::Success) throw std::runtime_error("GramSpectrum: eigendecomposition failed");
        blocks_.push_back({sig, std::move(members), es.eigenvalues(), es.eigenvectors()});
    }
}

double GramSpectrum::min_eigenvalue() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_) m = std::min(m, b.eigenvalues(0));
    return m;
}

double GramSpectrum::max_eigenvalue() const
{
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_) m = std::max(m, b.eigenvalues(b.eigenvalues.size() - 1));
    return m;
}

namespace {

void require_positive(const GramSpectrum& s)
{
    // Relative to the largest eigenvalue; below this the inverse is noise.
    if (!(s.min_eigenvalue() > 1e-13 * s.max_eigenvalue()))
        throw std::domain_error("Gram matrix at level " + std::to_string(s.level()) +
                                " is numerically singular (q_max too close to 1 for this truncation)");
}

} // namespace

Mat<double> GramSpectrum::inverse() const
{
    require_positive(*this);
    return apply([](double x) { return 1.0 / x; });
}

Mat<double> GramSpectrum::inverse_sqrt() const
{
    require_positive(*this);
    return apply([](double x) { return 1.0 / std::sqrt(x); });
}

Mat<double> GramSpectrum::sqrt() const
{
    require_positive(*this);
    return apply([](double x) { return std::sqrt(x); });
}

double gram_inverse_norm(const FockSpace<double>& space, int n)
{
    const GramSpectrum s(space, n);
    require_positive(s);
    return 1.0 / s.min_eigenvalue();
}

PnormBounds pnorm_bounds(double q, int n)
{
    if (!(q >= 0 && q < 1)) throw std::domain_error("pnorm_bounds: q must lie in [0, 1)");
    constexpr double cutoff = 1e-18;
    double product = 1.0;
    for (int k = 1;; ++k) {
        const double qk = std::pow(q, k);
        if (qk < cutoff) break;
        product *= (1 + qk) / (1 - qk);
    }
    double theta = 1.0;
    for (int k = 1;; ++k) {
        const double term = std::pow(q, static_cast<double>(k) * k);
        if (term < cutoff) break;
        theta += 2.0 * (k % 2 ? -term : term);
    }
    PnormBounds b;
    b.product = std::pow((1 - q) * product, n);
    b.theta = std::pow((1 - q) / theta, n);
    b.simple = q < 0.5 ? std::pow((1 - q) / (1 - 2 * q), n) : std::numeric_limits<double>::infinity();
    return b;
}

bool gram_is_class_block_diagonal(const FockSpace<double>& space, int n)
{
    const auto& basis = space.basis();
    const auto& g = space.gram(n);
    std::vector<ClassSignature> sig;
    for (std::size_t k = 0; k < basis.level_size(n); ++k)
        sig.emplace_back(basis.n_generators(), basis.word(basis.offset(n) + k));
    for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c)
            if (!(sig[r] == sig[c]) && g(r, c) != 0.0) return false;
    return true;
}

} // namespace mqg
