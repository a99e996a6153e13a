// Small dense complex matrices (dim 2 or 4) with a Hermitian eigensolver.
// Row-major storage, value semantics. Everything here is dimension-checked;
// the rest of the library never touches raw indices outside this file.

#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace qfc {

using cx = std::complex<double>;

class CMat {
public:
    CMat() = default;
    explicit CMat(int dim); // zero matrix; dim must be 2 or 4

    static CMat identity(int dim);
    // Row-major entries; size must be 4 (dim 2) or 16 (dim 4).
    static CMat from_rows(std::initializer_list<cx> entries);
    static CMat from_rows(const std::vector<cx>& entries);

    int dim() const { return dim_; }
    cx& at(int r, int c) { return e_[static_cast<size_t>(r) * dim_ + c]; }
    const cx& at(int r, int c) const { return e_[static_cast<size_t>(r) * dim_ + c]; }

    CMat adjoint() const;
    cx trace() const;
    double max_abs() const;
    bool is_hermitian(double tol) const;

    CMat& operator+=(const CMat& o);
    CMat& operator-=(const CMat& o);
    CMat& operator*=(cx s);

private:
    int dim_ = 0;
    std::vector<cx> e_;
};

CMat operator+(CMat a, const CMat& b);
CMat operator-(CMat a, const CMat& b);
CMat operator*(cx s, CMat a);
CMat operator*(const CMat& a, const CMat& b);

// Largest entrywise |a - b|.
double max_abs_diff(const CMat& a, const CMat& b);

// Kronecker product of two 2x2 matrices (first factor on the left slot).
CMat kron(const CMat& a, const CMat& b);

// Partial trace of a 4x4 two-qubit matrix; keep_slot 0 keeps the first qubit.
CMat partial_trace(const CMat& m, int keep_slot);

// Exchange the two qubit slots of a 4x4 matrix.
CMat swap_slots(const CMat& m);

struct EigenSystem {
    std::vector<double> values; // ascending
    CMat vectors;               // columns, matching order
};

// Hermitian eigendecomposition: closed form for dim 2, cyclic complex Jacobi
// for dim 4 (off-diagonal norm driven below 1e-12 * scale).
EigenSystem hermitian_eigensystem(const CMat& h);
std::vector<double> hermitian_eigenvalues(const CMat& h);

} // namespace qfc
