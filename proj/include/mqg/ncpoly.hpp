#pragma once

// Noncommutative polynomials in self-adjoint Y_1..Y_N, the algebraic tensor
// square A (x) A^op, R-norms, free difference quotients, cyclic gradients,
// the number-operator inverse, and evaluation on the truncated Fock space.

#include <cmath>
#include <map>

#include "mqg/fock.hpp"

namespace mqg {

/// A finite sum of monomials Y_w with coefficients; exact zeros are never stored.
template <class S = double>
class NCPoly {
public:
    using Terms = std::map<Word, S>;

    NCPoly() = default;

    static NCPoly constant(const S& c) { return monomial(Word{}, c); }
    static NCPoly generator(int i) { return monomial(Word{i}); }
    static NCPoly monomial(const Word& w, const S& c = S(1))
    {
        NCPoly p;
        p.add(w, c);
        return p;
    }

    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    /// Length of the longest stored word; -1 for the zero polynomial.
    int degree() const
    {
        int d = -1;
        for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
        return d;
    }

    S coeff(const Word& w) const
    {
        auto it = terms_.find(w);
        return it == terms_.end() ? S(0) : it->second;
    }

    void add(const Word& w, const S& c)
    {
        if (c == S(0)) return;
        auto [it, inserted] = terms_.try_emplace(w, c);
        if (!inserted) {
            it->second += c;
            if (it->second == S(0)) terms_.erase(it);
        }
    }

    NCPoly homogeneous_part(int k) const
    {
        NCPoly out;
        for (const auto& [w, c] : terms_)
            if (static_cast<int>(w.size()) == k) out.terms_.emplace_hint(out.terms_.end(), w, c);
        return out;
    }

    NCPoly truncated(int max_degree) const
    {
        NCPoly out;
        for (const auto& [w, c] : terms_)
            if (static_cast<int>(w.size()) <= max_degree) out.terms_.emplace_hint(out.terms_.end(), w, c);
        return out;
    }

    /// Drops coefficients with |c| <= tol. The only lossy operation.
    NCPoly& prune(double tol)
    {
        using std::abs;
        std::erase_if(terms_, [&](const auto& kv) { return abs(kv.second) <= S(tol); });
        return *this;
    }

    NCPoly& operator+=(const NCPoly& o)
    {
        for (const auto& [w, c] : o.terms_) add(w, c);
        return *this;
    }
    NCPoly& operator-=(const NCPoly& o)
    {
        for (const auto& [w, c] : o.terms_) add(w, -c);
        return *this;
    }
    NCPoly& operator*=(const S& s)
    {
        if (s == S(0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [w, c] : terms_) c *= s;
        std::erase_if(terms_, [](const auto& kv) { return kv.second == S(0); });
        return *this;
    }

    friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
    friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }
    friend NCPoly operator-(NCPoly a) { return a *= S(-1); }
    friend NCPoly operator*(NCPoly a, const S& s) { return a *= s; }
    friend NCPoly operator*(const S& s, NCPoly a) { return a *= s; }

    friend NCPoly operator*(const NCPoly& a, const NCPoly& b)
    {
        NCPoly out;
        for (const auto& [u, cu] : a.terms_)
            for (const auto& [v, cv] : b.terms_) out.add(u + v, cu * cv);
        return out;
    }

    friend bool operator==(const NCPoly&, const NCPoly&) = default;

private:
    Terms terms_;
};

/// Finite sums of Y_u (x) (Y_v)°, stored by the pair (u, v).
///
/// Multiplication follows A (x) A^op: (a (x) b°)(c (x) d°) = ac (x) (db)°.
/// The unit is 1 (x) 1°.
template <class S = double>
class NCTensor {
public:
    using Key = std::pair<Word, Word>;
    using Terms = std::map<Key, S>;

    NCTensor() = default;

    static NCTensor unit() { return monomial(Word{}, Word{}); }
    static NCTensor monomial(const Word& left, const Word& right, const S& c = S(1))
    {
        NCTensor t;
        t.add(left, right, c);
        return t;
    }
    /// a (x) b°
    static NCTensor elementary(const NCPoly<S>& a, const NCPoly<S>& b)
    {
        NCTensor t;
        for (const auto& [u, cu] : a.terms())
            for (const auto& [v, cv] : b.terms()) t.add(u, v, cu * cv);
        return t;
    }

    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    /// Largest total degree |u| + |v|; -1 when zero.
    int degree() const
    {
        int d = -1;
        for (const auto& [k, c] : terms_) d = std::max(d, static_cast<int>(k.first.size() + k.second.size()));
        return d;
    }

    S coeff(const Word& left, const Word& right) const
    {
        auto it = terms_.find(Key{left, right});
        return it == terms_.end() ? S(0) : it->second;
    }

    void add(const Word& left, const Word& right, const S& c) { add(Key{left, right}, c); }
    void add(const Key& key, const S& c)
    {
        if (c == S(0)) return;
        auto [it, inserted] = terms_.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second == S(0)) terms_.erase(it);
        }
    }

    NCTensor truncated(int max_total_degree) const
    {
        NCTensor out;
        for (const auto& [k, c] : terms_)
            if (static_cast<int>(k.first.size() + k.second.size()) <= max_total_degree)
                out.terms_.emplace_hint(out.terms_.end(), k, c);
        return out;
    }

    NCTensor& prune(double tol)
    {
        using std::abs;
        std::erase_if(terms_, [&](const auto& kv) { return abs(kv.second) <= S(tol); });
        return *this;
    }

    NCTensor& operator+=(const NCTensor& o)
    {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    NCTensor& operator-=(const NCTensor& o)
    {
        for (const auto& [k, c] : o.terms_) add(k, -c);
        return *this;
    }
    NCTensor& operator*=(const S& s)
    {
        if (s == S(0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_) c *= s;
        std::erase_if(terms_, [](const auto& kv) { return kv.second == S(0); });
        return *this;
    }

    friend NCTensor operator+(NCTensor a, const NCTensor& b) { return a += b; }
    friend NCTensor operator-(NCTensor a, const NCTensor& b) { return a -= b; }
    friend NCTensor operator*(NCTensor a, const S& s) { return a *= s; }
    friend NCTensor operator*(const S& s, NCTensor a) { return a *= s; }
    friend NCTensor operator*(const NCTensor& x, const NCTensor& y) { return multiply(x, y, -1); }

    /// x * y keeping only terms of total degree <= max_total_degree
    /// (no cap when negative).
    friend NCTensor multiply(const NCTensor& x, const NCTensor& y, int max_total_degree)
    {
        // Bucket the right factor by total degree so the cap prunes whole ranges.
        std::vector<std::vector<const typename Terms::value_type*>> by_degree;
        for (const auto& kv : y.terms_) {
            const std::size_t d = kv.first.first.size() + kv.first.second.size();
            if (by_degree.size() <= d) by_degree.resize(d + 1);
            by_degree[d].push_back(&kv);
        }
        NCTensor out;
        for (const auto& [kx, cx] : x.terms_) {
            const int dx = static_cast<int>(kx.first.size() + kx.second.size());
            int room = static_cast<int>(by_degree.size()) - 1;
            if (max_total_degree >= 0) room = std::min(room, max_total_degree - dx);
            for (int d = 0; d <= room; ++d)
                for (const auto* kv : by_degree[d])
                    out.add(kx.first + kv->first.first, kv->first.second + kx.second, cx * kv->second);
        }
        return out;
    }

    friend bool operator==(const NCTensor&, const NCTensor&) = default;

private:
    Terms terms_;
};

/// sum |c| R^{deg}
template <class S>
double rnorm(const NCPoly<S>& p, double R)
{
    using std::abs;
    double acc = 0;
    for (const auto& [w, c] : p.terms()) acc += static_cast<double>(abs(c)) * std::pow(R, static_cast<double>(w.size()));
    return acc;
}

/// sum |c| R^{|u| + |v|} (total-degree weighting).
template <class S>
double rnorm(const NCTensor<S>& t, double R)
{
    using std::abs;
    double acc = 0;
    for (const auto& [k, c] : t.terms())
        acc += static_cast<double>(abs(c)) * std::pow(R, static_cast<double>(k.first.size() + k.second.size()));
    return acc;
}

/// The involution: words reversed (the Y_i are self-adjoint, coefficients real).
template <class S>
NCPoly<S> star(const NCPoly<S>& p)
{
    NCPoly<S> out;
    for (const auto& [w, c] : p.terms()) out.add(w.reversed(), c);
    return out;
}

/// (a (x) b°)^* = a^* (x) (b^*)°.
template <class S>
NCTensor<S> star(const NCTensor<S>& t)
{
    NCTensor<S> out;
    for (const auto& [k, c] : t.terms()) out.add(k.first.reversed(), k.second.reversed(), c);
    return out;
}

/// The Hilbert-Schmidt adjoint under a (x) b° -> <., b^* Omega> a Omega,
/// i.e. (a (x) b°)^dagger = b^* (x) (a^*)°.
template <class S>
NCTensor<S> hs_adjoint(const NCTensor<S>& t)
{
    NCTensor<S> out;
    for (const auto& [k, c] : t.terms()) out.add(k.second.reversed(), k.first.reversed(), c);
    return out;
}

/// (a (x) b°) # x = a x b
template <class S>
NCPoly<S> hash_action(const NCTensor<S>& t, const NCPoly<S>& x)
{
    NCPoly<S> out;
    for (const auto& [k, c] : t.terms())
        for (const auto& [w, cw] : x.terms()) out.add(k.first + w + k.second, c * cw);
    return out;
}

/// m(a (x) b°) = ab
template <class S>
NCPoly<S> multiply_legs(const NCTensor<S>& t)
{
    NCPoly<S> out;
    for (const auto& [k, c] : t.terms()) out.add(k.first + k.second, c);
    return out;
}

/// (A (x) B°) . t, the bimodule action: A . a (x) (b . B)°. On Fock-space
/// operators it is T -> A T B.
template <class S>
NCTensor<S> bimodule(const NCPoly<S>& left, const NCTensor<S>& t, const NCPoly<S>& right)
{
    NCTensor<S> out;
    for (const auto& [k, c] : t.terms())
        for (const auto& [a, ca] : left.terms())
            for (const auto& [b, cb] : right.terms()) out.add(a + k.first, k.second + b, ca * c * cb);
    return out;
}

/// The free difference quotient: sum over P = A Y_j B of A (x) B°.
template <class S>
NCTensor<S> free_diff(int j, const NCPoly<S>& p)
{
    NCTensor<S> out;
    for (const auto& [w, c] : p.terms())
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] == j) out.add(w.sub(0, k), w.sub(k + 1), c);
    return out;
}

/// The cyclic gradient: sum over P = A Y_i B of BA.
template <class S>
NCPoly<S> cyclic_grad(int i, const NCPoly<S>& p)
{
    NCPoly<S> out;
    for (const auto& [w, c] : p.terms())
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] == i) out.add(w.sub(k + 1) + w.sub(0, k), c);
    return out;
}

/// Inverse of the number operator on polynomials without constant term:
/// each degree-k monomial is divided by k.
template <class S>
NCPoly<S> sigma_inv(const NCPoly<S>& p)
{
    NCPoly<S> out;
    for (const auto& [w, c] : p.terms()) {
        if (w.empty()) throw std::domain_error("sigma_inv: polynomial has a nonzero constant term");
        out.add(w, c / S(static_cast<int>(w.size())));
    }
    return out;
}

/// p(X_1, ..., X_N) as a dense operator. Exact on input levels m with
/// m + deg p <= d.
template <class S>
LinOp<S> eval_poly(const NCPoly<S>& p, const FockSpace<S>& space)
{
    const Mat<S> id = Mat<S>::Identity(space.dim(), space.dim());
    Mat<S> out = Mat<S>::Zero(space.dim(), space.dim());
    for (const auto& [w, c] : p.terms()) out += c * space.apply_word(w, id);
    std::optional<int> shift;
    if (p.size() == 1 && p.terms().begin()->first.empty()) shift = 0;
    return {std::move(out), shift};
}

/// p(X) Omega, memoized through `states`.
template <class S>
Vec<S> apply_vacuum(const NCPoly<S>& p, const VacuumStates<S>& states)
{
    Vec<S> out = Vec<S>::Zero(states.space().dim());
    for (const auto& [w, c] : p.terms()) out += c * states(w);
    return out;
}

/// tau_Q(p(X)).
template <class S>
S trace(const NCPoly<S>& p, const VacuumStates<S>& states)
{
    S acc(0);
    for (const auto& [w, c] : p.terms()) acc += c * states.moment(w);
    return acc;
}

/// The Hilbert-Schmidt embedding a (x) b° -> <., b^* Omega>_Q a Omega, as a
/// matrix in word coordinates: sum c (X_u Omega)(G X_{v reversed} Omega)^T.
template <class S>
LinOp<S> eval_tensor(const NCTensor<S>& t, const VacuumStates<S>& states)
{
    const auto& space = states.space();
    const Mat<S> g = space.metric();
    Mat<S> out = Mat<S>::Zero(space.dim(), space.dim());
    for (const auto& [k, c] : t.terms()) out += c * states(k.first) * (g * states(k.second.reversed())).transpose();
    return {std::move(out), std::nullopt};
}

} // namespace mqg
