#pragma once

// Parameter matrix, words, equivalence classes and the permutation
// combinatorics behind the deformed inner product.
//
// Generators and letters are 0-based throughout (0..N-1). Text and JSON
// output converts to the 1-based convention Y1..YN.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mqg {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Letter = std::uint8_t;

/// A multi-index (i_1, ..., i_n). The empty word labels the vacuum.
///
/// Words are totally ordered shortlex (length first, then lexicographic),
/// which is also the order of the truncated Fock basis.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
    Word(std::initializer_list<int> letters)
    {
        letters_.reserve(letters.size());
        for (int l : letters) letters_.push_back(static_cast<Letter>(l));
    }

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    int operator[](std::size_t k) const { return letters_[k]; }
    auto begin() const noexcept { return letters_.begin(); }
    auto end() const noexcept { return letters_.end(); }
    const std::vector<Letter>& letters() const noexcept { return letters_; }

    Word reversed() const { return Word(std::vector<Letter>(letters_.rbegin(), letters_.rend())); }

    Word sub(std::size_t pos, std::size_t len = static_cast<std::size_t>(-1)) const
    {
        const std::size_t stop = len > size() - pos ? size() : pos + len;
        return Word(std::vector<Letter>(letters_.begin() + pos, letters_.begin() + stop));
    }

    /// The word with the letter at `pos` removed.
    Word erased(std::size_t pos) const
    {
        std::vector<Letter> out;
        out.reserve(size() - 1);
        out.insert(out.end(), letters_.begin(), letters_.begin() + pos);
        out.insert(out.end(), letters_.begin() + pos + 1, letters_.end());
        return Word(std::move(out));
    }

    bool in_range(int n_generators) const noexcept
    {
        return std::all_of(begin(), end(), [=](Letter l) { return l < n_generators; });
    }

    Word& operator+=(const Word& rhs)
    {
        letters_.insert(letters_.end(), rhs.letters_.begin(), rhs.letters_.end());
        return *this;
    }
    friend Word operator+(Word lhs, const Word& rhs) { return lhs += rhs; }

    friend bool operator==(const Word&, const Word&) = default;
    friend std::strong_ordering operator<=>(const Word& a, const Word& b)
    {
        if (a.size() != b.size()) return a.size() <=> b.size();
        return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
    }

private:
    std::vector<Letter> letters_;
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept
    {
        std::size_t h = 0xcbf29ce484222325ull ^ w.size();
        for (Letter l : w) h = (h ^ l) * 0x100000001b3ull;
        return h;
    }
};

/// "(1,2,1)" with 1-based letters.
inline std::string to_string(const Word& w)
{
    std::string out = "(";
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(w[k] + 1);
    }
    return out + ")";
}

/// Letter counts (k_1, ..., k_N) of a word; labels its class under S_n.
class ClassSignature {
public:
    explicit ClassSignature(std::vector<int> counts) : counts_(std::move(counts)) {}
    ClassSignature(int n_generators, const Word& w) : counts_(n_generators, 0)
    {
        for (Letter l : w) ++counts_.at(l);
    }

    const std::vector<int>& counts() const noexcept { return counts_; }
    int level() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }

    /// Number of words in the class, n! / (k_1! ... k_N!).
    std::uint64_t dimension() const
    {
        std::uint64_t dim = 1;
        int seen = 0;
        for (int k : counts_) {
            for (int t = 1; t <= k; ++t) dim = dim * static_cast<std::uint64_t>(seen + t) / static_cast<std::uint64_t>(t);
            seen += k;
        }
        return dim;
    }

    friend bool operator==(const ClassSignature&, const ClassSignature&) = default;
    friend auto operator<=>(const ClassSignature&, const ClassSignature&) = default;

private:
    std::vector<int> counts_;
};

/// All classes at `level`, first count descending: (n,0,..), (n-1,1,..), ...
inline std::vector<std::pair<ClassSignature, std::uint64_t>> enumerate_classes(int level, int n_generators)
{
    if (level < 0 || n_generators < 1) throw std::invalid_argument("enumerate_classes: bad level or N");
    std::vector<std::pair<ClassSignature, std::uint64_t>> out;
    std::vector<int> counts(n_generators, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n_generators - 1) {
            counts[pos] = remaining;
            ClassSignature sig(counts);
            const auto dim = sig.dimension();
            out.emplace_back(std::move(sig), dim);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            counts[pos] = k;
            self(self, pos + 1, remaining - k);
        }
    };
    rec(rec, 0, level);
    return out;
}

/// A permutation of {0..n-1} in one-line notation, sigma(k) = images[k].
class Permutation {
public:
    explicit Permutation(std::vector<int> images) : images_(std::move(images))
    {
        std::vector<char> hit(images_.size(), 0);
        for (int v : images_) {
            if (v < 0 || v >= static_cast<int>(images_.size()) || hit[v])
                throw std::invalid_argument("Permutation: not a bijection");
            hit[v] = 1;
        }
        for (std::size_t k = 0; k < images_.size(); ++k)
            for (std::size_t l = k + 1; l < images_.size(); ++l)
                if (images_[k] > images_[l]) ++inversions_;
    }

    static Permutation identity(int n)
    {
        std::vector<int> id(n);
        std::iota(id.begin(), id.end(), 0);
        return Permutation(std::move(id));
    }

    /// tau_{m_1} o ... o tau_{m_k} with tau_m = (m, m+1).
    static Permutation from_adjacent(int n, std::span<const int> word)
    {
        std::vector<int> img(n);
        std::iota(img.begin(), img.end(), 0);
        for (int m : word) {
            if (m < 0 || m + 1 >= n) throw std::invalid_argument("from_adjacent: transposition out of range");
            std::swap(img[m], img[m + 1]);
        }
        return Permutation(std::move(img));
    }

    int size() const noexcept { return static_cast<int>(images_.size()); }
    int operator()(int k) const { return images_[k]; }
    const std::vector<int>& images() const noexcept { return images_; }
    /// |sigma|: number of pairs k < l with sigma(k) > sigma(l).
    int inversions() const noexcept { return inversions_; }

    Permutation inverse() const
    {
        std::vector<int> inv(images_.size());
        for (std::size_t k = 0; k < images_.size(); ++k) inv[images_[k]] = static_cast<int>(k);
        return Permutation(std::move(inv));
    }

    /// Composition (a * b)(k) = a(b(k)).
    friend Permutation operator*(const Permutation& a, const Permutation& b)
    {
        if (a.size() != b.size()) throw std::invalid_argument("Permutation: size mismatch");
        std::vector<int> out(a.images_.size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.images_[b.images_[k]];
        return Permutation(std::move(out));
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.images_ == b.images_; }

private:
    std::vector<int> images_;
    int inversions_ = 0;
};

namespace detail {

// Sorts the one-line notation by adjacent swaps chosen by `pick`; the
// reversed swap sequence is a reduced decomposition.
template <class Pick>
std::vector<int> reduce_by_swaps(const Permutation& sigma, Pick&& pick)
{
    std::vector<int> a = sigma.images();
    std::vector<int> swaps;
    swaps.reserve(sigma.inversions());
    std::vector<int> descents;
    for (;;) {
        descents.clear();
        for (std::size_t m = 0; m + 1 < a.size(); ++m)
            if (a[m] > a[m + 1]) descents.push_back(static_cast<int>(m));
        if (descents.empty()) break;
        const int m = pick(descents);
        std::swap(a[m], a[m + 1]);
        swaps.push_back(m);
    }
    std::reverse(swaps.begin(), swaps.end());
    return swaps;
}

} // namespace detail

/// A reduced decomposition sigma = tau_{m_1} ... tau_{m_k}, k = |sigma|,
/// returned as the 0-based positions (m_1, ..., m_k).
inline std::vector<int> reduced_word(const Permutation& sigma)
{
    return detail::reduce_by_swaps(sigma, [](const std::vector<int>& d) { return d.front(); });
}

/// A uniformly chosen descent is swapped at every step, so different seeds
/// give different reduced decompositions of the same permutation.
template <class URNG>
std::vector<int> random_reduced_word(const Permutation& sigma, URNG& rng)
{
    return detail::reduce_by_swaps(sigma, [&](const std::vector<int>& d) {
        std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
        return d[pick(rng)];
    });
}

/// Calls f(sigma) for every sigma in S_n, lexicographic in one-line notation.
template <class Fn>
void for_each_permutation(int n, Fn&& f)
{
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    do {
        f(Permutation(img));
    } while (std::next_permutation(img.begin(), img.end()));
}

/// The symmetric matrix (q_ij) with |q_ij| < 1.
template <class S = double>
class QSpec {
public:
    using Matrix = Mat<S>;

    explicit QSpec(Matrix entries) : entries_(std::move(entries))
    {
        using std::abs;
        if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
            throw std::invalid_argument("QSpec: parameter matrix must be square and non-empty");
        q_max_ = S(0);
        for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
            for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
                if (entries_(i, j) != entries_(j, i)) throw std::invalid_argument("QSpec: parameter matrix not symmetric");
                if (!(abs(entries_(i, j)) < S(1))) throw std::invalid_argument("QSpec: entries must lie in (-1, 1)");
                if (abs(entries_(i, j)) > q_max_) q_max_ = abs(entries_(i, j));
            }
        }
    }

    static QSpec uniform(int n_generators, S q) { return QSpec(Matrix::Constant(n_generators, n_generators, q)); }

    int n_generators() const noexcept { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const noexcept { return entries_; }
    const S& operator()(int i, int j) const { return entries_(i, j); }
    /// max_ij |q_ij|
    const S& q_max() const noexcept { return q_max_; }

private:
    Matrix entries_;
    S q_max_;
};

/// Entries drawn uniformly from [-q_max, q_max], then symmetrised.
template <class URNG>
QSpec<double> random_qspec(int n_generators, double q_max, URNG& rng)
{
    std::uniform_real_distribution<double> dist(-q_max, q_max);
    Mat<double> m(n_generators, n_generators);
    for (int i = 0; i < n_generators; ++i)
        for (int j = i; j < n_generators; ++j) m(i, j) = m(j, i) = dist(rng);
    return QSpec<double>(std::move(m));
}

/// a(sigma, w) evaluated along an explicit reduced decomposition
/// (m_1, ..., m_k): tau_{m_k} acts first, each adjacent swap of the current
/// word contributes q of the two letters it exchanges.
template <class S>
S coeff_a(std::span<const int> reduced, const Word& w, const QSpec<S>& q)
{
    std::vector<Letter> cur = w.letters();
    S factor(1);
    for (auto it = reduced.rbegin(); it != reduced.rend(); ++it) {
        const int m = *it;
        if (m < 0 || static_cast<std::size_t>(m) + 1 >= cur.size())
            throw std::invalid_argument("coeff_a: transposition out of range for word length");
        factor *= q(cur[m], cur[m + 1]);
        std::swap(cur[m], cur[m + 1]);
    }
    return factor;
}

template <class S>
S coeff_a(const Permutation& sigma, const Word& w, const QSpec<S>& q)
{
    if (static_cast<std::size_t>(sigma.size()) != w.size())
        throw std::invalid_argument("coeff_a: word length differs from permutation degree");
    const auto rw = reduced_word(sigma);
    return coeff_a<S>(std::span<const int>(rw), w, q);
}

/// q_k(w) = q_{k w_1} ... q_{k w_n}; 1 on the empty word.
template <class S>
S q_class(int k, const Word& w, const QSpec<S>& q)
{
    S out(1);
    for (Letter l : w) out *= q(k, l);
    return out;
}

} // namespace mqg
