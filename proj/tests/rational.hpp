#pragma once

// Exact rational scalar for tests that assert equality rather than closeness.

#include <boost/multiprecision/cpp_int.hpp>
#include <initializer_list>
#include <string>

#include "mqg/qcore.hpp"

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

inline Rational rat(const std::string& s) { return Rational(s); }

inline mqg::QSpec<Rational> rational_qspec(std::initializer_list<std::initializer_list<const char*>> rows)
{
    const auto n = static_cast<Eigen::Index>(rows.size());
    mqg::Mat<Rational> m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (const char* v : row) m(i, j++) = Rational(v);
        ++i;
    }
    return mqg::QSpec<Rational>(std::move(m));
}

template <class A, class B>
bool exactly_equal(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (!(a(i, j) == b(i, j))) return false;
    return true;
}
