#include "qfc/cmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qfc {

namespace {

void check_dim(int dim) {
    if (dim != 2 && dim != 4) {
        throw std::invalid_argument("CMat dimension must be 2 or 4, got " + std::to_string(dim));
    }
}

} // namespace

CMat::CMat(int dim) : dim_(dim), e_(static_cast<size_t>(dim) * dim, cx{0.0, 0.0}) {
    check_dim(dim);
}

CMat CMat::identity(int dim) {
    CMat m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = cx{1.0, 0.0};
    return m;
}

CMat CMat::from_rows(std::initializer_list<cx> entries) {
    return from_rows(std::vector<cx>(entries));
}

CMat CMat::from_rows(const std::vector<cx>& entries) {
    int dim = 0;
    if (entries.size() == 4) dim = 2;
    else if (entries.size() == 16) dim = 4;
    else throw std::invalid_argument("CMat::from_rows needs 4 or 16 entries");
    CMat m(dim);
    std::copy(entries.begin(), entries.end(), &m.at(0, 0));
    return m;
}

CMat CMat::adjoint() const {
    CMat r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r.at(j, i) = std::conj(at(i, j));
    return r;
}

cx CMat::trace() const {
    cx t{0.0, 0.0};
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
}

double CMat::max_abs() const {
    double m = 0.0;
    for (const auto& v : e_) m = std::max(m, std::abs(v));
    return m;
}

bool CMat::is_hermitian(double tol) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
    return true;
}

CMat& CMat::operator+=(const CMat& o) {
    if (dim_ != o.dim_) throw std::invalid_argument("CMat dimension mismatch in +");
    for (size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

CMat& CMat::operator-=(const CMat& o) {
    if (dim_ != o.dim_) throw std::invalid_argument("CMat dimension mismatch in -");
    for (size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

CMat& CMat::operator*=(cx s) {
    for (auto& v : e_) v *= s;
    return *this;
}

CMat operator+(CMat a, const CMat& b) { return a += b; }
CMat operator-(CMat a, const CMat& b) { return a -= b; }
CMat operator*(cx s, CMat a) { return a *= s; }

CMat operator*(const CMat& a, const CMat& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("CMat dimension mismatch in *");
    const int n = a.dim();
    CMat r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cx aik = a.at(i, k);
            if (aik == cx{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) r.at(i, j) += aik * b.at(k, j);
        }
    return r;
}

double max_abs_diff(const CMat& a, const CMat& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("CMat dimension mismatch in max_abs_diff");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a.at(i, j) - b.at(i, j)));
    return m;
}

CMat kron(const CMat& a, const CMat& b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw std::invalid_argument("kron supports only 2x2 factors");
    }
    CMat r(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    r.at(2 * i + k, 2 * j + l) = a.at(i, j) * b.at(k, l);
    return r;
}

CMat partial_trace(const CMat& m, int keep_slot) {
    if (m.dim() != 4) throw std::invalid_argument("partial_trace needs a 4x4 matrix");
    if (keep_slot != 0 && keep_slot != 1) throw std::invalid_argument("keep_slot must be 0 or 1");
    CMat r(2);
    for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap) {
            cx s{0.0, 0.0};
            for (int b = 0; b < 2; ++b) {
                if (keep_slot == 0) s += m.at(2 * a + b, 2 * ap + b);
                else s += m.at(2 * b + a, 2 * b + ap);
            }
            r.at(a, ap) = s;
        }
    return r;
}

CMat swap_slots(const CMat& m) {
    if (m.dim() != 4) throw std::invalid_argument("swap_slots needs a 4x4 matrix");
    auto perm = [](int i) { return 2 * (i % 2) + i / 2; };
    CMat r(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(perm(i), perm(j)) = m.at(i, j);
    return r;
}

namespace {

// One Givens-like complex rotation zeroing h[p][q]; accumulates into vecs.
void jacobi_rotate(CMat& h, CMat& vecs, int p, int q) {
    const cx hpq = h.at(p, q);
    const double r = std::abs(hpq);
    if (r == 0.0) return;
    const cx phase = hpq / r; // e^{i alpha}
    const double app = h.at(p, p).real();
    const double aqq = h.at(q, q).real();
    const double theta = 0.5 * std::atan2(2.0 * r, app - aqq);
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    const int n = h.dim();
    // Column update: B = H * U, U columns (c, s e^{-ia}) and (-s e^{ia}, c).
    for (int i = 0; i < n; ++i) {
        const cx hip = h.at(i, p);
        const cx hiq = h.at(i, q);
        h.at(i, p) = c * hip + s * std::conj(phase) * hiq;
        h.at(i, q) = -s * phase * hip + c * hiq;
    }
    // Row update: A' = U^dagger * B.
    for (int j = 0; j < n; ++j) {
        const cx hpj = h.at(p, j);
        const cx hqj = h.at(q, j);
        h.at(p, j) = c * hpj + s * phase * hqj;
        h.at(q, j) = -s * std::conj(phase) * hpj + c * hqj;
    }
    for (int i = 0; i < n; ++i) {
        const cx vip = vecs.at(i, p);
        const cx viq = vecs.at(i, q);
        vecs.at(i, p) = c * vip + s * std::conj(phase) * viq;
        vecs.at(i, q) = -s * phase * vip + c * viq;
    }
}

double offdiag_norm(const CMat& h) {
    double s = 0.0;
    for (int i = 0; i < h.dim(); ++i)
        for (int j = 0; j < h.dim(); ++j)
            if (i != j) s += std::norm(h.at(i, j));
    return std::sqrt(s);
}

EigenSystem sort_ascending(std::vector<double> vals, CMat vecs) {
    const int n = vecs.dim();
    std::vector<int> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    EigenSystem out;
    out.vectors = CMat(n);
    for (int k = 0; k < n; ++k) {
        out.values.push_back(vals[order[k]]);
        for (int i = 0; i < n; ++i) out.vectors.at(i, k) = vecs.at(i, order[k]);
    }
    return out;
}

EigenSystem eigensystem_2x2(const CMat& h) {
    const double a = h.at(0, 0).real();
    const double d = h.at(1, 1).real();
    const cx b = h.at(0, 1);
    const double m = 0.5 * (a + d);
    const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    const double lo = m - r, hi = m + r;

    CMat vecs = CMat::identity(2);
    if (std::abs(b) > 0.0 || a != d) {
        auto vec_for = [&](double lam, int col) {
            // Two null-space formulations of (H - lam); take the better
            // conditioned one. For diagonal matrices one of them vanishes.
            const cx u0 = b, u1 = cx{lam - a, 0.0};
            const cx w0 = cx{lam - d, 0.0}, w1 = std::conj(b);
            const double nu = std::norm(u0) + std::norm(u1);
            const double nw = std::norm(w0) + std::norm(w1);
            cx v0 = nu >= nw ? u0 : w0;
            cx v1 = nu >= nw ? u1 : w1;
            const double n = std::sqrt(std::max(nu, nw));
            if (n == 0.0) { // degenerate pair, keep canonical axis
                vecs.at(0, col) = col == 0 ? 1.0 : 0.0;
                vecs.at(1, col) = col == 0 ? 0.0 : 1.0;
                return;
            }
            vecs.at(0, col) = v0 / n;
            vecs.at(1, col) = v1 / n;
        };
        vec_for(lo, 0);
        vec_for(hi, 1);
    }
    return sort_ascending({lo, hi}, vecs);
}

} // namespace

EigenSystem hermitian_eigensystem(const CMat& h) {
    if (!h.is_hermitian(1e-9 * std::max(1.0, h.max_abs()))) {
        throw std::invalid_argument("hermitian_eigensystem: matrix is not Hermitian");
    }
    if (h.dim() == 2) return eigensystem_2x2(h);

    CMat a = h;
    // Symmetrize exactly so rotations stay consistent.
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            const cx v = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
            a.at(i, j) = v;
            a.at(j, i) = std::conj(v);
        }
    CMat vecs = CMat::identity(4);
    const double scale = std::max(1.0, a.max_abs());
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (offdiag_norm(a) < 1e-12 * scale) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) jacobi_rotate(a, vecs, p, q);
    }
    std::vector<double> vals;
    for (int i = 0; i < 4; ++i) vals.push_back(a.at(i, i).real());
    return sort_ascending(vals, vecs);
}

std::vector<double> hermitian_eigenvalues(const CMat& h) {
    return hermitian_eigensystem(h).values;
}

} // namespace qfc
