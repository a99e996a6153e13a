#include "qfc/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qfc {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kEigFloor = -1e-9;
constexpr double kNormTol = 1e-10;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

} // namespace

PureState::PureState(std::vector<cx> amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() != 2 && amp_.size() != 4) {
        throw std::invalid_argument("PureState dimension must be 2 or 4");
    }
    double n2 = 0.0;
    for (const auto& a : amp_) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > kNormTol) {
        throw std::invalid_argument("PureState amplitudes are not normalized (|norm^2 - 1| = " +
                                    std::to_string(std::abs(n2 - 1.0)) + ")");
    }
}

DensityMatrix DensityMatrix::from_matrix(const CMat& m) {
    if (m.dim() != 2 && m.dim() != 4) {
        throw std::invalid_argument("DensityMatrix dimension must be 2 or 4");
    }
    if (!m.is_hermitian(kHermTol)) {
        throw std::invalid_argument("DensityMatrix is not Hermitian within 1e-10");
    }
    const cx tr = m.trace();
    if (std::abs(tr - cx{1.0, 0.0}) > kTraceTol) {
        throw std::invalid_argument("DensityMatrix trace differs from 1 by more than 1e-10");
    }
    CMat h(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) h.at(i, j) = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
    const double tre = h.trace().real();
    h *= cx{1.0 / tre, 0.0};
    const auto eigs = hermitian_eigenvalues(h);
    if (eigs.front() < kEigFloor) {
        throw std::invalid_argument("DensityMatrix has eigenvalue " + std::to_string(eigs.front()) +
                                    " below -1e-9");
    }
    return DensityMatrix(std::move(h));
}

Basis basis_from_label(std::string_view label) {
    if (label == "H") return Basis::H;
    if (label == "V") return Basis::V;
    if (label == "D") return Basis::D;
    if (label == "A") return Basis::A;
    if (label == "R") return Basis::R;
    if (label == "L") return Basis::L;
    throw std::invalid_argument("unknown basis label '" + std::string(label) +
                                "' (expected one of H,V,D,A,R,L)");
}

std::string_view basis_label(Basis b) {
    switch (b) {
        case Basis::H: return "H";
        case Basis::V: return "V";
        case Basis::D: return "D";
        case Basis::A: return "A";
        case Basis::R: return "R";
        case Basis::L: return "L";
    }
    return "?";
}

PureState basis_state(Basis b) {
    switch (b) {
        case Basis::H: return PureState({{1.0, 0.0}, {0.0, 0.0}});
        case Basis::V: return PureState({{0.0, 0.0}, {1.0, 0.0}});
        case Basis::D: return PureState({{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}});
        case Basis::A: return PureState({{kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}});
        case Basis::R: return PureState({{kInvSqrt2, 0.0}, {0.0, kInvSqrt2}});
        case Basis::L: return PureState({{kInvSqrt2, 0.0}, {0.0, -kInvSqrt2}});
    }
    throw std::invalid_argument("invalid basis enum value");
}

PureState bell_phi_plus() {
    return PureState({{kInvSqrt2, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {kInvSqrt2, 0.0}});
}

DensityMatrix dm_from_pure(const PureState& psi) {
    const int n = psi.dim();
    CMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = psi.amp(i) * std::conj(psi.amp(j));
    return DensityMatrix::from_matrix(m);
}

DensityMatrix werner_state(double f) {
    if (f < 0.25 || f > 1.0) {
        throw std::invalid_argument("werner_state fidelity must lie in [0.25, 1], got " +
                                    std::to_string(f));
    }
    const double p = (4.0 * f - 1.0) / 3.0;
    const auto bell = dm_from_pure(bell_phi_plus());
    CMat m = cx{p, 0.0} * bell.mat() + cx{(1.0 - p) / 4.0, 0.0} * CMat::identity(4);
    return DensityMatrix::from_matrix(m);
}

DensityMatrix werner_from_visibility(double v) {
    if (v < 0.0 || v > 1.0) {
        throw std::invalid_argument("werner_from_visibility needs v in [0, 1]");
    }
    return werner_state((3.0 * v + 1.0) / 4.0);
}

double fidelity(const DensityMatrix& rho, const PureState& psi) {
    if (rho.dim() != psi.dim()) {
        throw std::invalid_argument("fidelity dimension mismatch");
    }
    cx f{0.0, 0.0};
    for (int i = 0; i < rho.dim(); ++i)
        for (int j = 0; j < rho.dim(); ++j)
            f += std::conj(psi.amp(i)) * rho.mat().at(i, j) * psi.amp(j);
    return std::clamp(f.real(), 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
    return (rho.mat() * rho.mat()).trace().real();
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw std::invalid_argument("tensor supports only 2x2 factors");
    }
    return DensityMatrix::from_matrix(kron(a.mat(), b.mat()));
}

CMat tensor(const CMat& a, const CMat& b) { return kron(a, b); }

double born_probability(const DensityMatrix& rho, const CMat& effect) {
    if (rho.dim() != effect.dim()) {
        throw std::invalid_argument("born_probability dimension mismatch");
    }
    if (!effect.is_hermitian(1e-9)) {
        throw std::invalid_argument("measurement effect is not Hermitian");
    }
    const auto eigs = hermitian_eigenvalues(effect);
    if (eigs.front() < -1e-9 || eigs.back() > 1.0 + 1e-9) {
        throw std::invalid_argument("measurement effect eigenvalues outside [0, 1]");
    }
    const double p = (effect * rho.mat()).trace().real();
    return std::clamp(p, 0.0, 1.0);
}

double trace_distance(const CMat& a, const CMat& b) {
    const CMat d = a - b;
    double s = 0.0;
    for (double lam : hermitian_eigenvalues(d)) s += std::abs(lam);
    return 0.5 * s;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_distance(a.mat(), b.mat());
}

DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix::from_matrix(cx{1.0 / dim, 0.0} * CMat::identity(dim));
}

DensityMatrix psd_project(const CMat& hermitian) {
    const auto es = hermitian_eigensystem(hermitian);
    const int n = hermitian.dim();
    double total = 0.0;
    for (double lam : es.values) total += std::max(lam, 0.0);
    if (total <= 0.0) {
        throw std::invalid_argument("psd_project: matrix has no positive part");
    }
    CMat m(n);
    for (int k = 0; k < n; ++k) {
        const double lam = std::max(es.values[static_cast<size_t>(k)], 0.0) / total;
        if (lam == 0.0) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m.at(i, j) += cx{lam, 0.0} * es.vectors.at(i, k) * std::conj(es.vectors.at(j, k));
    }
    return DensityMatrix::from_matrix(m);
}

} // namespace qfc
