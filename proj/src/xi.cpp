#include "mqg/xi.hpp"

#include <cmath>
#include <limits>

namespace mqg {

LinOp<double> xi_operator(const FockSpace<double>& space, int j)
{
    Vec<double> diag(space.dim());
    for (std::size_t k = 0; k < space.dim(); ++k) diag(k) = q_class(j, space.word(k), space.qspec());
    return {diag.asDiagonal(), 0};
}

LinOp<double> class_projection(const FockSpace<double>& space, const ClassSignature& sig)
{
    Vec<double> mask = Vec<double>::Zero(space.dim());
    const int n = sig.level();
    if (n > space.depth()) throw std::out_of_range("class_projection: class above depth");
    const auto& basis = space.basis();
    for (std::size_t k = 0; k < basis.level_size(n); ++k) {
        const std::size_t idx = basis.offset(n) + k;
        if (ClassSignature(space.n_generators(), basis.word(idx)) == sig) mask(idx) = 1.0;
    }
    return {mask.asDiagonal(), 0};
}

LinOp<double> vacuum_projection(const FockSpace<double>& space)
{
    Mat<double> p = Mat<double>::Zero(space.dim(), space.dim());
    p(0, 0) = 1.0;
    return {std::move(p), 0};
}

namespace {

// psi terms bucketed by degree, for total-degree capped products.
struct Bucketed {
    std::vector<std::vector<std::pair<const Word*, double>>> by_degree;
};

Bucketed bucket(const NCPoly<double>& p)
{
    Bucketed b;
    for (const auto& [w, c] : p.terms()) {
        if (b.by_degree.size() <= w.size()) b.by_degree.resize(w.size() + 1);
        b.by_degree[w.size()].emplace_back(&w, c);
    }
    return b;
}

void accumulate_levels(NCTensor<double>& out, const FockSpace<double>& space, const WickTable<double>& table, int j,
                       int lo, int hi, int max_total_degree)
{
    if (hi > space.depth() || hi > table.depth())
        throw std::out_of_range("xi_series: level cutoff exceeds the Fock depth");
    const auto& basis = space.basis();
    for (int n = lo; n <= hi; ++n) {
        const GramSpectrum spec(space, n);
        const Mat<double> ginv = spec.inverse();
        std::vector<NCPoly<double>> stars(basis.level_size(n));
        std::vector<Bucketed> right(basis.level_size(n));
        for (std::size_t k = 0; k < basis.level_size(n); ++k) {
            stars[k] = star(table.at_index(basis.offset(n) + k));
            right[k] = bucket(stars[k]);
        }
        for (const auto& block : spec.blocks()) {
            const Word rep = basis.word(basis.offset(n) + static_cast<std::size_t>(block.members.front()));
            const double qj = q_class(j, rep, space.qspec());
            if (qj == 0.0) continue;
            for (Eigen::Index v : block.members) {
                const NCPoly<double>& left = table.at_index(basis.offset(n) + static_cast<std::size_t>(v));
                for (Eigen::Index w : block.members) {
                    const double c = qj * ginv(v, w);
                    if (c == 0.0) continue;
                    const auto& rb = right[static_cast<std::size_t>(w)].by_degree;
                    for (const auto& [lw, lc] : left.terms()) {
                        int room = static_cast<int>(rb.size()) - 1;
                        if (max_total_degree >= 0) room = std::min(room, max_total_degree - static_cast<int>(lw.size()));
                        for (int d = 0; d <= room; ++d)
                            for (const auto& [rw, rc] : rb[d]) out.add(lw, *rw, c * lc * rc);
                    }
                }
            }
        }
    }
}

} // namespace

NCTensor<double> xi_series(const FockSpace<double>& space, const WickTable<double>& table, int j, int max_level,
                           int max_total_degree)
{
    NCTensor<double> out;
    accumulate_levels(out, space, table, j, 0, max_level, max_total_degree);
    return out;
}

NCTensor<double> xi_level_part(const FockSpace<double>& space, const WickTable<double>& table, int j, int n)
{
    NCTensor<double> out;
    accumulate_levels(out, space, table, j, n, n, -1);
    return out;
}

NCTensor<double> xi_series_orthonormal(const FockSpace<double>& space, const WickTable<double>& table, int j,
                                       int max_level)
{
    const GramSqrtInv roots(space);
    const auto& basis = space.basis();
    NCTensor<double> out;
    for (int n = 0; n <= max_level; ++n) {
        for (std::size_t k = 0; k < basis.level_size(n); ++k) {
            const Word w = basis.word(basis.offset(n) + k);
            const double qj = q_class(j, w, space.qspec());
            if (qj == 0.0) continue;
            const NCPoly<double> p = ortho_poly(w, table, roots);
            out += NCTensor<double>::elementary(p, star(p)) * qj;
        }
    }
    return out;
}

HSReport hs_norm_sq(const FockSpace<double>& space, int j)
{
    const int N = space.n_generators();
    const double q = space.qspec().q_max();
    const double ratio = q * q * N;
    HSReport r;
    r.holds = true;
    for (int n = 0; n <= space.depth(); ++n) {
        double level = 0;
        for (const auto& [sig, dim] : enumerate_classes(n, N)) {
            double qj = 1;
            for (int t = 0; t < N; ++t) qj *= std::pow(space.qspec()(j, t), sig.counts()[t]);
            level += qj * qj * static_cast<double>(dim);
        }
        r.level_sums.push_back(level);
        r.level_caps.push_back(std::pow(ratio, n));
        r.partial_sum += level;
        // Relative slack for the rounding of the level sums.
        if (level > r.level_caps.back() * (1 + 1e-12)) r.holds = false;
    }
    r.geometric_bound = ratio < 1 ? 1.0 / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    if (r.partial_sum > r.geometric_bound * (1 + 1e-12)) r.holds = false;
    return r;
}

LinOp<double> qderiv_matrix(const FockSpace<double>& space, int j, const NCPoly<double>& p)
{
    const LinOp<double> x = eval_poly(p, space);
    const LinOp<double> r = op_create_right(space, j);
    return {x.matrix * r.matrix - r.matrix * x.matrix, std::nullopt};
}

NCTensor<double> qderiv_tensor(int j, const NCPoly<double>& p, const NCTensor<double>& xi_j)
{
    NCTensor<double> out;
    for (const auto& [w, c] : p.terms()) {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] != j) continue;
            const Word a = w.sub(0, k);
            const Word b = w.sub(k + 1);
            for (const auto& [key, x] : xi_j.terms()) out.add(a + key.first, key.second + b, c * x);
        }
    }
    return out;
}

NCPoly<double> qderiv_adjoint_contraction(int j, const NCPoly<double>& a, const NCPoly<double>& b,
                                          const NCTensor<double>& xi_j, const VacuumStates<double>& states)
{
    NCPoly<double> out = a * NCPoly<double>::generator(j) * b;
    const NCTensor<double> db = qderiv_tensor(j, b, xi_j);
    for (const auto& [key, c] : db.terms()) {
        const double t = c * states.moment(key.first);
        if (t != 0.0) out -= a * NCPoly<double>::monomial(key.second, t);
    }
    const NCTensor<double> da = qderiv_tensor(j, a, xi_j);
    for (const auto& [key, c] : da.terms()) {
        const double t = c * states.moment(key.second);
        if (t != 0.0) out -= NCPoly<double>::monomial(key.first, t) * b;
    }
    return out;
}

QDerivation::QDerivation(const FockSpace<double>& space, const WickTable<double>& table)
    : space_(&space), table_(&table), states_(space), left_(space.n_generators()), right_(space.n_generators())
{
    if (table.depth() < space.depth()) throw std::invalid_argument("QDerivation: Wick table shallower than the Fock space");
}

const NCPoly<double>& QDerivation::left_contraction(int j, const Word& prefix) const
{
    auto& memo = left_.at(j);
    if (auto it = memo.find(prefix); it != memo.end()) return it->second;
    const Vec<double>& v = states_(prefix.reversed());
    NCPoly<double> out;
    const auto& basis = space_->basis();
    for (int n = 0; n <= static_cast<int>(prefix.size()); ++n) {
        for (std::size_t k = 0; k < basis.level_size(n); ++k) {
            const std::size_t idx = basis.offset(n) + k;
            if (v(idx) == 0.0) continue;
            const double c = q_class(j, basis.word(idx), space_->qspec()) * v(idx);
            if (c != 0.0) out += star(table_->at_index(idx)) * c;
        }
    }
    return memo.emplace(prefix, std::move(out)).first->second;
}

const NCPoly<double>& QDerivation::right_contraction(int j, const Word& suffix) const
{
    auto& memo = right_.at(j);
    if (auto it = memo.find(suffix); it != memo.end()) return it->second;
    const Vec<double>& v = states_(suffix);
    NCPoly<double> out;
    const auto& basis = space_->basis();
    for (int n = 0; n <= static_cast<int>(suffix.size()); ++n) {
        for (std::size_t k = 0; k < basis.level_size(n); ++k) {
            const std::size_t idx = basis.offset(n) + k;
            if (v(idx) == 0.0) continue;
            const double c = q_class(j, basis.word(idx), space_->qspec()) * v(idx);
            if (c != 0.0) out += table_->at_index(idx) * c;
        }
    }
    return memo.emplace(suffix, std::move(out)).first->second;
}

void QDerivation::accumulate_adjoint(int j, const Word& a, const Word& b, double c, NCPoly<double>& out) const
{
    out.add(a + Word{j} + b, c);
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (b[k] != j) continue;
        const Word tail = b.sub(k + 1);
        for (const auto& [w, x] : left_contraction(j, b.sub(0, k)).terms()) out.add(a + w + tail, -c * x);
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] != j) continue;
        const Word head = a.sub(0, k);
        for (const auto& [w, x] : right_contraction(j, a.sub(k + 1)).terms()) out.add(head + w + b, -c * x);
    }
}

NCPoly<double> QDerivation::adjoint(int j, const NCPoly<double>& a, const NCPoly<double>& b) const
{
    NCPoly<double> out;
    for (const auto& [u, cu] : a.terms())
        for (const auto& [v, cv] : b.terms()) accumulate_adjoint(j, u, v, cu * cv, out);
    return out;
}

OrthonormalFrame::OrthonormalFrame(const FockSpace<double>& space)
    : u_(Mat<double>::Zero(space.dim(), space.dim())), u_inv_(Mat<double>::Zero(space.dim(), space.dim()))
{
    const auto& basis = space.basis();
    for (int n = 0; n <= space.depth(); ++n) {
        const GramSpectrum spec(space, n);
        const auto off = static_cast<Eigen::Index>(basis.offset(n));
        const auto len = static_cast<Eigen::Index>(basis.level_size(n));
        u_.block(off, off, len, len) = spec.inverse_sqrt();
        u_inv_.block(off, off, len, len) = spec.sqrt();
    }
}

Mat<double> OrthonormalFrame::to_orthonormal(const Mat<double>& a) const { return u_inv_ * a * u_; }

double OrthonormalFrame::hs_inner(const Mat<double>& a, const Mat<double>& b) const
{
    return (to_orthonormal(a).array() * to_orthonormal(b).array()).sum();
}

double OrthonormalFrame::hs_norm(const Mat<double>& a) const { return to_orthonormal(a).norm(); }

} // namespace mqg
