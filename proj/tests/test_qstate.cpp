#include <doctest.h>

#include <cmath>

#include "qfc/qstate.hpp"
#include "test_support.hpp"

using namespace qfc;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("basis states match their definitions") {
    const PureState h = basis_state(Basis::H);
    CHECK(h.amp(0) == cx{1.0, 0.0});
    CHECK(h.amp(1) == cx{0.0, 0.0});

    const PureState d = basis_state(Basis::D);
    CHECK(d.amp(0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-14));
    CHECK(d.amp(1).real() == doctest::Approx(kInvSqrt2).epsilon(1e-14));

    // <R|L> = 0
    const PureState r = basis_state(Basis::R);
    const PureState l = basis_state(Basis::L);
    cx overlap{0.0, 0.0};
    for (int i = 0; i < 2; ++i) overlap += std::conj(r.amp(i)) * l.amp(i);
    CHECK(std::abs(overlap) < 1e-14);

    CHECK_THROWS_AS(basis_from_label("X"), std::invalid_argument);
    CHECK(basis_from_label("R") == Basis::R);
}

TEST_CASE("bell state amplitudes, norm, and reduced states") {
    const PureState bell = bell_phi_plus();
    CHECK(bell.dim() == 4);
    CHECK(bell.amp(0).real() == doctest::Approx(kInvSqrt2).epsilon(1e-14));
    CHECK(std::abs(bell.amp(1)) == 0.0);
    CHECK(std::abs(bell.amp(2)) == 0.0);
    CHECK(bell.amp(3).real() == doctest::Approx(kInvSqrt2).epsilon(1e-14));

    double n2 = 0.0;
    for (int i = 0; i < 4; ++i) n2 += std::norm(bell.amp(i));
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-14));

    const DensityMatrix rho = dm_from_pure(bell);
    const CMat half = cx{0.5, 0.0} * CMat::identity(2);
    CHECK(max_abs_diff(partial_trace(rho.mat(), 0), half) < 1e-10);
    CHECK(max_abs_diff(partial_trace(rho.mat(), 1), half) < 1e-10);
}

TEST_CASE("dm_from_pure forms the outer product and is idempotent") {
    CHECK(max_abs_diff(dm_from_pure(basis_state(Basis::H)).mat(),
                       CMat::from_rows({cx{1, 0}, cx{0, 0}, cx{0, 0}, cx{0, 0}})) < 1e-14);

    const CMat d = dm_from_pure(basis_state(Basis::D)).mat();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(d.at(i, j).real() == doctest::Approx(0.5).epsilon(1e-12));

    // Oracle: outer product computed by hand for the pair state.
    const PureState bell = bell_phi_plus();
    CMat outer(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) outer.at(i, j) = bell.amp(i) * std::conj(bell.amp(j));
    const CMat rho = dm_from_pure(bell).mat();
    CHECK(max_abs_diff(rho, outer) < 1e-14);
    CHECK(rho.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho.at(0, 3).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho.at(3, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho.at(3, 3).real() == doctest::Approx(0.5).epsilon(1e-12));

    Rng rng(11);
    for (int k = 0; k < 20; ++k) {
        const DensityMatrix p = dm_from_pure(test::random_pure(rng, k % 2 ? 2 : 4));
        CHECK(max_abs_diff(p.mat() * p.mat(), p.mat()) < 1e-10); // rho^2 = rho
    }

    CHECK_THROWS_AS(PureState({cx{1.0, 0.0}, cx{0.5, 0.0}}), std::invalid_argument);
}

TEST_CASE("werner family endpoints and mixing weight") {
    CHECK(max_abs_diff(werner_state(1.0).mat(), dm_from_pure(bell_phi_plus()).mat()) < 1e-12);
    CHECK(max_abs_diff(werner_state(0.25).mat(), cx{0.25, 0.0} * CMat::identity(4)) < 1e-12);

    // p = (4 * 0.989 - 1) / 3
    const double p = (4.0 * 0.989 - 1.0) / 3.0;
    CHECK(p == doctest::Approx(0.98533333333333).epsilon(1e-12));
    const CMat expect = cx{p, 0.0} * dm_from_pure(bell_phi_plus()).mat() +
                        cx{(1.0 - p) / 4.0, 0.0} * CMat::identity(4);
    CHECK(max_abs_diff(werner_state(0.989).mat(), expect) < 1e-12);

    CHECK_THROWS_AS(werner_state(0.2), std::invalid_argument);
    CHECK_THROWS_AS(werner_state(1.1), std::invalid_argument);
}

TEST_CASE("werner fidelity round-trips for 100 random targets") {
    Rng rng(17);
    const PureState bell = bell_phi_plus();
    for (int k = 0; k < 100; ++k) {
        const double f = 0.25 + 0.75 * rng.uniform();
        CHECK(std::abs(fidelity(werner_state(f), bell) - f) < 1e-10);
    }
}

TEST_CASE("fidelity basics") {
    CHECK(fidelity(dm_from_pure(basis_state(Basis::H)), basis_state(Basis::H)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(23);
    for (int k = 0; k < 10; ++k) {
        CHECK(fidelity(maximally_mixed(2), test::random_pure(rng, 2)) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(fidelity(werner_state(0.989), bell_phi_plus()) == doctest::Approx(0.989).epsilon(1e-12));
    CHECK_THROWS_AS(fidelity(maximally_mixed(2), bell_phi_plus()), std::invalid_argument);
}

TEST_CASE("fidelity is linear in the state") {
    Rng rng(29);
    for (int k = 0; k < 50; ++k) {
        const DensityMatrix r1 = test::random_density(rng, 2);
        const DensityMatrix r2 = test::random_density(rng, 2);
        const PureState psi = test::random_pure(rng, 2);
        const double alpha = rng.uniform();
        const DensityMatrix mix = DensityMatrix::from_matrix(
            cx{alpha, 0.0} * r1.mat() + cx{1.0 - alpha, 0.0} * r2.mat());
        const double lhs = fidelity(mix, psi);
        const double rhs = alpha * fidelity(r1, psi) + (1.0 - alpha) * fidelity(r2, psi);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("purity endpoints and brute-force oracle") {
    CHECK(purity(dm_from_pure(basis_state(Basis::D))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(purity(maximally_mixed(2)) == doctest::Approx(0.5).epsilon(1e-12));

    // Oracle: square the matrix entry by entry and take the diagonal sum.
    const DensityMatrix w = werner_state(0.989);
    cx tr{0.0, 0.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) tr += w.mat().at(i, j) * w.mat().at(j, i);
    CHECK(purity(w) == doctest::Approx(tr.real()).epsilon(1e-12));
    CHECK(purity(w) == doctest::Approx(0.9781613333333333).epsilon(1e-10));
}

TEST_CASE("tensor products") {
    CHECK(max_abs_diff(tensor(CMat::identity(2), CMat::identity(2)), CMat::identity(4)) < 1e-14);

    const DensityMatrix hv = tensor(dm_from_pure(basis_state(Basis::H)),
                                    dm_from_pure(basis_state(Basis::V)));
    const DensityMatrix hv_direct =
        dm_from_pure(PureState({cx{0, 0}, cx{1, 0}, cx{0, 0}, cx{0, 0}})); // |HV>
    CHECK(max_abs_diff(hv.mat(), hv_direct.mat()) < 1e-14);

    Rng rng(31);
    for (int k = 0; k < 50; ++k) {
        const CMat a = test::random_hermitian(rng, 2);
        const CMat b = test::random_hermitian(rng, 2);
        const cx expect = a.trace() * b.trace();
        CHECK(std::abs(tensor(a, b).trace() - expect) < 1e-10 * (1.0 + std::abs(expect)));
    }

    CHECK_THROWS_AS(tensor(CMat::identity(4), CMat::identity(2)), std::invalid_argument);
}

TEST_CASE("born probabilities and effect completeness") {
    const CMat ph = dm_from_pure(basis_state(Basis::H)).mat();
    CHECK(born_probability(dm_from_pure(basis_state(Basis::H)), ph) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(born_probability(dm_from_pure(basis_state(Basis::D)), ph) ==
          doctest::Approx(0.5).epsilon(1e-12));

    Rng rng(37);
    for (int k = 0; k < 50; ++k) {
        const DensityMatrix rho = test::random_density(rng, 2);
        const CMat e = dm_from_pure(test::random_pure(rng, 2)).mat();
        const CMat complement = CMat::identity(2) - e;
        CHECK(born_probability(rho, e) + born_probability(rho, complement) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }

    // A Hermitian matrix with a negative eigenvalue is not an effect.
    CHECK_THROWS_AS(
        born_probability(maximally_mixed(2),
                         CMat::from_rows({cx{1, 0}, cx{0, 0}, cx{0, 0}, cx{-0.2, 0}})),
        std::invalid_argument);
}

TEST_CASE("density matrix invariants are enforced") {
    CMat not_herm = CMat::from_rows({cx{0.5, 0}, cx{0.3, 0}, cx{0.1, 0}, cx{0.5, 0}});
    CHECK_THROWS_AS(DensityMatrix::from_matrix(not_herm), std::invalid_argument);

    CMat bad_trace = cx{0.6, 0.0} * CMat::identity(2);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(bad_trace), std::invalid_argument);

    CMat neg = CMat::from_rows({cx{1.2, 0}, cx{0, 0}, cx{0, 0}, cx{-0.2, 0}});
    CHECK_THROWS_AS(DensityMatrix::from_matrix(neg), std::invalid_argument);
}

TEST_CASE("eigensolver reconstructs random Hermitian matrices") {
    Rng rng(41);
    for (int k = 0; k < 50; ++k) {
        const int dim = k % 2 ? 2 : 4;
        const CMat h = test::random_hermitian(rng, dim);
        const EigenSystem es = hermitian_eigensystem(h);
        CMat rebuilt(dim);
        for (int c = 0; c < dim; ++c)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    rebuilt.at(i, j) += cx{es.values[static_cast<size_t>(c)], 0.0} *
                                        es.vectors.at(i, c) * std::conj(es.vectors.at(j, c));
        CHECK(max_abs_diff(rebuilt, h) < 1e-9);
        for (size_t c = 1; c < es.values.size(); ++c) CHECK(es.values[c] >= es.values[c - 1]);
    }
}

TEST_CASE("psd projection clips and renormalizes") {
    // Eigenvalues 1.1 and -0.1 -> clip to (1, 0) and renormalize.
    const CMat m = CMat::from_rows({cx{1.1, 0}, cx{0, 0}, cx{0, 0}, cx{-0.1, 0}});
    const DensityMatrix p = psd_project(m);
    CHECK(p.mat().at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(p.mat().at(1, 1)) < 1e-12);

    Rng rng(43);
    for (int k = 0; k < 20; ++k) {
        const DensityMatrix rho = test::random_density(rng, 2);
        CHECK(trace_distance(psd_project(rho.mat()), rho) < 1e-10); // no-op on physical states
    }
}

TEST_CASE("trace distance basics") {
    CHECK(trace_distance(maximally_mixed(2), maximally_mixed(2)) < 1e-14);
    const double d = trace_distance(dm_from_pure(basis_state(Basis::H)),
                                    dm_from_pure(basis_state(Basis::V)));
    CHECK(d == doctest::Approx(1.0).epsilon(1e-12)); // orthogonal pure states
}
