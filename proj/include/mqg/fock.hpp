#pragma once

// Truncated mixed q-Fock space: graded word basis, Gram matrices of the
// deformed inner product, matrix models of l_i, l_i*, r_i, r_i*, X_i, and
// the vacuum trace.
//
// Vectors and operators are coordinate arrays in the word basis (which is
// not orthonormal); inner products go through the Gram blocks. Creation out
// of the top level d yields 0.

#include <optional>
#include <unordered_map>

#include "mqg/qcore.hpp"

namespace mqg {

/// Index arithmetic for all words of length <= depth in shortlex order.
class GradedBasis {
public:
    GradedBasis(int n_generators, int depth) : n_(n_generators), depth_(depth)
    {
        if (n_generators < 1 || n_generators > 255) throw std::invalid_argument("GradedBasis: bad number of generators");
        if (depth < 0) throw std::invalid_argument("GradedBasis: negative depth");
        powers_.push_back(1);
        for (int k = 1; k <= depth + 1; ++k) powers_.push_back(powers_.back() * static_cast<std::size_t>(n_));
        offsets_.push_back(0);
        for (int k = 0; k <= depth; ++k) offsets_.push_back(offsets_.back() + powers_[k]);
    }

    int n_generators() const noexcept { return n_; }
    int depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return offsets_.back(); }
    std::size_t offset(int level) const { return offsets_.at(level); }
    std::size_t level_size(int level) const { return powers_.at(level); }
    /// N^k
    std::size_t power(int k) const { return powers_.at(k); }

    int level_of(std::size_t index) const
    {
        int n = 0;
        while (offsets_[n + 1] <= index) ++n;
        return n;
    }

    /// Position of `w` within its level (base-N value of the letters).
    std::size_t local_index(const Word& w) const
    {
        std::size_t v = 0;
        for (Letter l : w) v = v * static_cast<std::size_t>(n_) + l;
        return v;
    }

    std::size_t index(const Word& w) const
    {
        if (static_cast<int>(w.size()) > depth_) throw std::out_of_range("GradedBasis: word longer than depth");
        if (!w.in_range(n_)) throw std::out_of_range("GradedBasis: letter out of range");
        return offsets_[w.size()] + local_index(w);
    }

    Word word(std::size_t index) const
    {
        const int n = level_of(index);
        std::size_t v = index - offsets_[n];
        std::vector<Letter> letters(n);
        for (int p = n - 1; p >= 0; --p) {
            letters[p] = static_cast<Letter>(v % n_);
            v /= n_;
        }
        return Word(std::move(letters));
    }

    /// Letter at position `pos` of the level-`n` word with local index `v`.
    int letter(std::size_t v, int n, int pos) const { return static_cast<int>((v / powers_[n - 1 - pos]) % n_); }

    /// Local index after deleting position `pos` from a level-`n` word.
    std::size_t erase_local(std::size_t v, int n, int pos) const
    {
        const std::size_t high = v / powers_[n - pos];
        const std::size_t low = v % powers_[n - 1 - pos];
        return high * powers_[n - 1 - pos] + low;
    }

    /// All words of length `level`, in order.
    std::vector<Word> words(int level) const
    {
        std::vector<Word> out;
        out.reserve(level_size(level));
        for (std::size_t k = 0; k < level_size(level); ++k) out.push_back(word(offset(level) + k));
        return out;
    }

private:
    int n_;
    int depth_;
    std::vector<std::size_t> powers_;
    std::vector<std::size_t> offsets_;
};

template <class S>
class FockSpace;

namespace detail {

// <e_i, e_j>_Q via <e_{i_1} (x) u, v> = <u, l_{i_1}^* v> and <Omega,Omega> = 1.
template <class S>
Mat<S> gram_recursive_level(const GradedBasis& basis, const QSpec<S>& q, int n, const Mat<S>& below)
{
    const std::size_t dim = basis.level_size(n);
    Mat<S> g = Mat<S>::Zero(dim, dim);
    if (n == 0) {
        g(0, 0) = S(1);
        return g;
    }
    for (std::size_t a = 0; a < dim; ++a) {
        const int first = basis.letter(a, n, 0);
        const std::size_t rest = a % basis.power(n - 1);
        for (std::size_t b = 0; b < dim; ++b) {
            S acc(0);
            S factor(1);
            for (int k = 0; k < n; ++k) {
                const int l = basis.letter(b, n, k);
                if (l == first) acc += factor * below(rest, basis.erase_local(b, n, k));
                factor *= q(first, l);
            }
            g(a, b) = acc;
        }
    }
    return g;
}

} // namespace detail

/// The graded basis of words of length <= depth together with the level
/// Gram matrices G_0, ..., G_d.
template <class S = double>
class FockSpace {
public:
    FockSpace(QSpec<S> q, int depth) : q_(std::move(q)), basis_(q_.n_generators(), depth)
    {
        grams_.reserve(depth + 1);
        Mat<S> prev;
        for (int n = 0; n <= depth; ++n) {
            grams_.push_back(detail::gram_recursive_level(basis_, q_, n, prev));
            prev = grams_.back();
        }
    }

    const QSpec<S>& qspec() const noexcept { return q_; }
    const GradedBasis& basis() const noexcept { return basis_; }
    int n_generators() const noexcept { return basis_.n_generators(); }
    int depth() const noexcept { return basis_.depth(); }
    std::size_t dim() const noexcept { return basis_.size(); }
    std::size_t index(const Word& w) const { return basis_.index(w); }
    Word word(std::size_t index) const { return basis_.word(index); }

    /// G_n, the Gram matrix of <.,.>_Q on words of length n.
    const Mat<S>& gram(int n) const { return grams_.at(n); }

    /// Coordinate vector of e_w.
    Vec<S> basis_vector(const Word& w) const
    {
        Vec<S> v = Vec<S>::Zero(dim());
        v(index(w)) = S(1);
        return v;
    }

    Vec<S> vacuum() const
    {
        Vec<S> v = Vec<S>::Zero(dim());
        v(0) = S(1);
        return v;
    }

    /// <u, v>_Q. Levels are mutually orthogonal.
    S inner(const Vec<S>& u, const Vec<S>& v) const
    {
        S acc(0);
        for (int n = 0; n <= depth(); ++n) {
            const auto off = static_cast<Eigen::Index>(basis_.offset(n));
            const auto len = static_cast<Eigen::Index>(basis_.level_size(n));
            acc += u.segment(off, len).dot(grams_[n] * v.segment(off, len));
        }
        return acc;
    }

    /// The full block-diagonal metric diag(G_0, ..., G_d).
    Mat<S> metric() const
    {
        Mat<S> g = Mat<S>::Zero(dim(), dim());
        for (int n = 0; n <= depth(); ++n) {
            const auto off = static_cast<Eigen::Index>(basis_.offset(n));
            const auto len = static_cast<Eigen::Index>(basis_.level_size(n));
            g.block(off, off, len, len) = grams_[n];
        }
        return g;
    }

    // Column-wise actions on coordinate arrays (vectors or matrices whose
    // columns are vectors).

    /// l_i: e_w -> e_{iw}; the top level is sent to 0.
    template <class Derived>
    typename Derived::PlainObject create_left(int i, const Eigen::MatrixBase<Derived>& v) const
    {
        check_generator(i);
        typename Derived::PlainObject out = Derived::PlainObject::Zero(v.rows(), v.cols());
        for (int n = 0; n < depth(); ++n) {
            const auto len = static_cast<Eigen::Index>(basis_.level_size(n));
            const auto src = static_cast<Eigen::Index>(basis_.offset(n));
            const auto dst = static_cast<Eigen::Index>(basis_.offset(n + 1) + static_cast<std::size_t>(i) * basis_.power(n));
            out.middleRows(dst, len) = v.middleRows(src, len);
        }
        return out;
    }

    /// r_i: e_w -> e_{wi}; the top level is sent to 0.
    template <class Derived>
    typename Derived::PlainObject create_right(int i, const Eigen::MatrixBase<Derived>& v) const
    {
        check_generator(i);
        typename Derived::PlainObject out = Derived::PlainObject::Zero(v.rows(), v.cols());
        const auto N = static_cast<std::size_t>(n_generators());
        for (int n = 0; n < depth(); ++n) {
            const std::size_t src = basis_.offset(n);
            const std::size_t dst = basis_.offset(n + 1);
            for (std::size_t k = 0; k < basis_.level_size(n); ++k)
                out.row(static_cast<Eigen::Index>(dst + k * N + i)) = v.row(static_cast<Eigen::Index>(src + k));
        }
        return out;
    }

    /// l_i^*(e_{j_1..j_n}) = sum_k delta_{i j_k} q_{i j_1} ... q_{i j_{k-1}} e_{j without k}.
    template <class Derived>
    typename Derived::PlainObject annihilate_left(int i, const Eigen::MatrixBase<Derived>& v) const
    {
        check_generator(i);
        typename Derived::PlainObject out = Derived::PlainObject::Zero(v.rows(), v.cols());
        for (int n = 1; n <= depth(); ++n) {
            const std::size_t src = basis_.offset(n);
            const std::size_t dst = basis_.offset(n - 1);
            for (std::size_t k = 0; k < basis_.level_size(n); ++k) {
                const auto row = v.row(static_cast<Eigen::Index>(src + k));
                if (row.isZero(0)) continue;
                S factor(1);
                for (int p = 0; p < n; ++p) {
                    const int l = basis_.letter(k, n, p);
                    if (l == i) out.row(static_cast<Eigen::Index>(dst + basis_.erase_local(k, n, p))) += factor * row;
                    factor *= q_(i, l);
                }
            }
        }
        return out;
    }

    /// X_i = l_i + l_i^*.
    template <class Derived>
    typename Derived::PlainObject apply_field(int i, const Eigen::MatrixBase<Derived>& v) const
    {
        typename Derived::PlainObject out = create_left(i, v);
        out += annihilate_left(i, v);
        return out;
    }

    /// X_{w_1} ... X_{w_n} v (rightmost letter acts first).
    template <class Derived>
    typename Derived::PlainObject apply_word(const Word& w, const Eigen::MatrixBase<Derived>& v) const
    {
        typename Derived::PlainObject out = v;
        for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) out = apply_field(*it, out);
        return out;
    }

private:
    void check_generator(int i) const
    {
        if (i < 0 || i >= n_generators()) throw std::out_of_range("FockSpace: generator index out of range");
    }

    QSpec<S> q_;
    GradedBasis basis_;
    std::vector<Mat<S>> grams_;
};

/// A dense operator on the truncated space, with its grading shift
/// (nullopt when the operator mixes levels).
template <class S = double>
struct LinOp {
    Mat<S> matrix;
    std::optional<int> shift;

    LinOp operator+(const LinOp& o) const { return {matrix + o.matrix, shift == o.shift ? shift : std::nullopt}; }
    LinOp operator-(const LinOp& o) const { return {matrix - o.matrix, shift == o.shift ? shift : std::nullopt}; }
    LinOp operator*(const LinOp& o) const
    {
        std::optional<int> s;
        if (shift && o.shift) s = *shift + *o.shift;
        return {matrix * o.matrix, s};
    }
    LinOp operator*(const S& c) const { return {matrix * c, shift}; }
    Vec<S> operator*(const Vec<S>& v) const { return matrix * v; }
};

template <class S>
LinOp<S> op_identity(const FockSpace<S>& space)
{
    return {Mat<S>::Identity(space.dim(), space.dim()), 0};
}

template <class S>
LinOp<S> op_create(const FockSpace<S>& space, int i)
{
    return {space.create_left(i, Mat<S>::Identity(space.dim(), space.dim())), 1};
}

template <class S>
LinOp<S> op_annihilate(const FockSpace<S>& space, int i)
{
    return {space.annihilate_left(i, Mat<S>::Identity(space.dim(), space.dim())), -1};
}

template <class S>
LinOp<S> op_create_right(const FockSpace<S>& space, int i)
{
    return {space.create_right(i, Mat<S>::Identity(space.dim(), space.dim())), 1};
}

/// r_i^* as the Gram adjoint of r_i: the level n+1 -> n block is
/// G_n^{-1} R_n^T G_{n+1}.
template <class S>
LinOp<S> op_annihilate_right(const FockSpace<S>& space, int i)
{
    const Mat<S> r = op_create_right(space, i).matrix;
    const auto& basis = space.basis();
    Mat<S> out = Mat<S>::Zero(space.dim(), space.dim());
    for (int n = 0; n < space.depth(); ++n) {
        const auto lo = static_cast<Eigen::Index>(basis.offset(n));
        const auto hi = static_cast<Eigen::Index>(basis.offset(n + 1));
        const auto nlo = static_cast<Eigen::Index>(basis.level_size(n));
        const auto nhi = static_cast<Eigen::Index>(basis.level_size(n + 1));
        const Mat<S> rt = r.block(hi, lo, nhi, nlo).transpose() * space.gram(n + 1);
        out.block(lo, hi, nlo, nhi) = space.gram(n).ldlt().solve(rt);
    }
    return {std::move(out), -1};
}

template <class S>
LinOp<S> op_X(const FockSpace<S>& space, int i)
{
    return {space.apply_field(i, Mat<S>::Identity(space.dim(), space.dim())), std::nullopt};
}

/// G_n from the definition: entry (i, j) = sum over sigma with
/// i_k = j_{sigma^{-1}(k)} of a(sigma, j).
template <class S>
Mat<S> gram_perm(const FockSpace<S>& space, int n)
{
    if (n > 8) throw std::out_of_range("gram_perm: level above the S_n enumeration cap (8)");
    if (n > space.depth()) throw std::out_of_range("gram_perm: level above depth");
    const auto& basis = space.basis();
    const std::size_t dim = basis.level_size(n);
    Mat<S> g = Mat<S>::Zero(dim, dim);
    const auto words = basis.words(n);
    for_each_permutation(n, [&](const Permutation& sigma) {
        const auto rw = reduced_word(sigma);
        const Permutation inv = sigma.inverse();
        for (std::size_t b = 0; b < dim; ++b) {
            const Word& j = words[b];
            std::vector<Letter> i(n);
            for (int k = 0; k < n; ++k) i[k] = static_cast<Letter>(j[inv(k)]);
            g(basis.local_index(Word(std::move(i))), b) += coeff_a<S>(std::span<const int>(rw), j, space.qspec());
        }
    });
    return g;
}

/// G_n through the annihilator recursion (independent of coeff_a).
template <class S>
Mat<S> gram_rec(const FockSpace<S>& space, int n)
{
    if (n > space.depth()) throw std::out_of_range("gram_rec: level above depth");
    Mat<S> g;
    for (int k = 0; k <= n; ++k) g = detail::gram_recursive_level(space.basis(), space.qspec(), k, g);
    return g;
}

/// tau_Q(X_{w_1} ... X_{w_k}) = <X_w Omega, Omega>_Q.
///
/// Exact while |w| <= 2d + 1: a path that leaves the truncation needs at
/// least 2(d + 1) steps to return to the vacuum.
template <class S>
S trace_moment(const FockSpace<S>& space, const Word& w)
{
    if (static_cast<int>(w.size()) > 2 * space.depth() + 1)
        throw std::domain_error("trace_moment: word too long for exact evaluation at this depth");
    if (!w.in_range(space.n_generators())) throw std::out_of_range("trace_moment: letter out of range");
    return space.apply_word(w, space.vacuum())(0);
}

/// Memoized vectors X_w Omega for words up to the depth, and exact traces of
/// words up to 2d via tau(uv) = <X_v Omega, X_{u reversed} Omega>_Q.
template <class S = double>
class VacuumStates {
public:
    explicit VacuumStates(const FockSpace<S>& space) : space_(&space) {}

    const FockSpace<S>& space() const noexcept { return *space_; }

    const Vec<S>& operator()(const Word& w) const
    {
        if (static_cast<int>(w.size()) > space_->depth())
            throw std::domain_error("VacuumStates: word longer than the truncation depth");
        if (auto it = states_.find(w); it != states_.end()) return it->second;
        Vec<S> v = w.empty() ? space_->vacuum() : space_->apply_field(w[0], (*this)(w.sub(1)));
        return states_.emplace(w, std::move(v)).first->second;
    }

    S moment(const Word& w) const
    {
        if (static_cast<int>(w.size()) > 2 * space_->depth())
            throw std::domain_error("VacuumStates: word too long for an exact trace");
        if (w.size() % 2) return S(0);
        if (auto it = moments_.find(w); it != moments_.end()) return it->second;
        const std::size_t half = w.size() / 2;
        const S m = space_->inner((*this)(w.sub(half)), (*this)(w.sub(0, half).reversed()));
        moments_.emplace(w, m);
        return m;
    }

private:
    const FockSpace<S>* space_;
    mutable std::unordered_map<Word, Vec<S>, WordHash> states_;
    mutable std::unordered_map<Word, S, WordHash> moments_;
};

} // namespace mqg
