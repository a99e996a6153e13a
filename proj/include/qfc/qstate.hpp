// Polarization-qubit state primitives: pure states, density matrices, the
// standard six-state basis, the entangled pair state, and the metrics used by
// every downstream module.
//
// Conventions (fixed once, used everywhere):
//   single qubit basis order (H, V); pair order (HH, HV, VH, VV);
//   basis states carry a real-positive first nonzero amplitude.

#pragma once

#include <string_view>
#include <vector>

#include "qfc/cmat.hpp"

namespace qfc {

class PureState {
public:
    // amplitudes must be normalized within 1e-10; dim 2 or 4.
    explicit PureState(std::vector<cx> amplitudes);

    int dim() const { return static_cast<int>(amp_.size()); }
    const cx& amp(int i) const { return amp_[static_cast<size_t>(i)]; }
    const std::vector<cx>& amplitudes() const { return amp_; }

private:
    std::vector<cx> amp_;
};

// Physical state: Hermitian within 1e-10, unit trace within 1e-10, and all
// eigenvalues >= -1e-9. Construction validates and then stores an exactly
// hermitized, exactly trace-one copy.
class DensityMatrix {
public:
    DensityMatrix() = default; // empty placeholder; assign a validated state before use
    static DensityMatrix from_matrix(const CMat& m);

    int dim() const { return m_.dim(); }
    const CMat& mat() const { return m_; }

private:
    explicit DensityMatrix(CMat m) : m_(std::move(m)) {}
    CMat m_;
};

enum class Basis { H, V, D, A, R, L };

Basis basis_from_label(std::string_view label); // throws on anything but H,V,D,A,R,L
std::string_view basis_label(Basis b);

// The six standard polarization states: D=(H+V)/sqrt2, A=(H-V)/sqrt2,
// R=(H+iV)/sqrt2, L=(H-iV)/sqrt2.
PureState basis_state(Basis b);

// (|HH> + |VV>)/sqrt2.
PureState bell_phi_plus();

DensityMatrix dm_from_pure(const PureState& psi);

// Isotropic mixture p|psi><psi| + (1-p) I/4 with <psi|rho|psi> = f,
// p = (4f - 1)/3; f must lie in [0.25, 1].
DensityMatrix werner_state(double f);

// Same family parameterized by its two-photon fringe visibility v = p.
DensityMatrix werner_from_visibility(double v);

// <psi|rho|psi>, clamped to [0,1].
double fidelity(const DensityMatrix& rho, const PureState& psi);

// Tr(rho^2).
double purity(const DensityMatrix& rho);

// Kronecker products; both inputs must be 2x2.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
CMat tensor(const CMat& a, const CMat& b);

// Tr(E rho) for a measurement effect E (PSD, eigenvalues <= 1 within 1e-9).
double born_probability(const DensityMatrix& rho, const CMat& effect);

// (1/2) sum |eig(a - b)| for Hermitian a, b.
double trace_distance(const CMat& a, const CMat& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

DensityMatrix maximally_mixed(int dim);

// Clip negative eigenvalues to zero and renormalize the trace. Used to turn a
// linear-inversion estimate into a physical state.
DensityMatrix psd_project(const CMat& hermitian);

} // namespace qfc
