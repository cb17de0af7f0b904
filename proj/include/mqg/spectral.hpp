#pragma once

// Class-block spectral data of the Gram matrices: G_n is block diagonal
// over the letter-count classes, so inverses, square roots and norms are
// computed from one symmetric eigendecomposition per block.

#include "mqg/fock.hpp"

namespace mqg {

struct ClassBlock {
    ClassSignature signature;
    std::vector<Eigen::Index> members; ///< local indices within the level
    Vec<double> eigenvalues;           ///< ascending
    Mat<double> eigenvectors;
};

class GramSpectrum {
public:
    GramSpectrum(const FockSpace<double>& space, int level);

    int level() const noexcept { return level_; }
    const std::vector<ClassBlock>& blocks() const noexcept { return blocks_; }
    double min_eigenvalue() const;
    double max_eigenvalue() const;

    /// V f(Lambda) V^T assembled into the full level matrix; zero off the
    /// class blocks.
    template <class F>
    Mat<double> apply(F&& f) const
    {
        Mat<double> out = Mat<double>::Zero(dim_, dim_);
        for (const auto& b : blocks_) {
            const Mat<double> m = b.eigenvectors * b.eigenvalues.unaryExpr(f).asDiagonal() * b.eigenvectors.transpose();
            for (std::size_t r = 0; r < b.members.size(); ++r)
                for (std::size_t c = 0; c < b.members.size(); ++c) out(b.members[r], b.members[c]) = m(r, c);
        }
        return out;
    }

    Mat<double> inverse() const;
    /// The principal inverse square root G^{-1/2}.
    Mat<double> inverse_sqrt() const;
    Mat<double> sqrt() const;

private:
    int level_;
    Eigen::Index dim_;
    std::vector<ClassBlock> blocks_;
};

/// Local indices of each class at `level`, keyed by signature.
std::vector<std::pair<ClassSignature, std::vector<Eigen::Index>>> class_members(const GradedBasis& basis, int level);

/// ||G_n^{-1}||_2. Throws std::domain_error when G_n is numerically singular.
double gram_inverse_norm(const FockSpace<double>& space, int n);

struct PnormBounds {
    double product; ///< [(1-q) prod_k (1+q^k)/(1-q^k)]^n
    double theta;   ///< [(1-q) / sum_k (-1)^k q^{k^2}]^n
    double simple;  ///< ((1-q)/(1-2q))^n, infinite when q >= 1/2
};

/// Upper bounds for ||G_n^{-1}|| in terms of q = max |q_ij|.
PnormBounds pnorm_bounds(double q, int n);

/// True when every entry of G_n linking two different classes is exactly 0.
bool gram_is_class_block_diagonal(const FockSpace<double>& space, int n);

} // namespace mqg
