#pragma once

// Wick words psi_w: the polynomials with psi_w(X) Omega = e_w, built by
//
//   psi_{i_1..i_n} = Y_{i_1} psi_{i_2..i_n}
//       - sum_{j>=2} delta(i_1, i_j) prod_{2<=k<j} q(i_1, i_k) psi_{i_2..^i_j..i_n}.

#include "mqg/ncpoly.hpp"

namespace mqg {

template <class S = double>
class WickTable {
public:
    /// Builds every psi_w with |w| <= depth, level by level.
    WickTable(const QSpec<S>& q, int depth) : basis_(q.n_generators(), depth)
    {
        table_.reserve(basis_.size());
        table_.push_back(NCPoly<S>::constant(S(1)));
        for (std::size_t idx = 1; idx < basis_.size(); ++idx) {
            const Word w = basis_.word(idx);
            const int first = w[0];
            const Word rest = w.sub(1);
            NCPoly<S> psi = NCPoly<S>::generator(first) * table_[basis_.index(rest)];
            S factor(1);
            for (std::size_t j = 1; j < w.size(); ++j) {
                if (w[j] == first) psi -= table_[basis_.index(rest.erased(j - 1))] * factor;
                factor *= q(first, w[j]);
            }
            table_.push_back(std::move(psi));
        }
    }

    int depth() const noexcept { return basis_.depth(); }
    int n_generators() const noexcept { return basis_.n_generators(); }
    const GradedBasis& basis() const noexcept { return basis_; }

    const NCPoly<S>& operator()(const Word& w) const { return table_.at(basis_.index(w)); }
    const NCPoly<S>& at_index(std::size_t idx) const { return table_.at(idx); }

private:
    GradedBasis basis_;
    std::vector<NCPoly<S>> table_;
};

/// psi_w for a single word (builds the table up to |w|).
template <class S>
NCPoly<S> wick_poly(const Word& w, const QSpec<S>& q)
{
    return WickTable<S>(q, static_cast<int>(w.size()))(w);
}

} // namespace mqg
