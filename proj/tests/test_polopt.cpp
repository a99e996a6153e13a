#include <doctest.h>

#include <cmath>

#include "qfc/polopt.hpp"
#include "qfc/qstate.hpp"
#include "test_support.hpp"

using namespace qfc;

namespace {

CMat apply_to_ket(const CMat& op, const PureState& psi) {
    CMat rho = dm_from_pure(psi).mat();
    return op * rho * op.adjoint();
}

} // namespace

TEST_CASE("half-wave plate action on |H>") {
    const PureState h = basis_state(Basis::H);

    // HWP(0)|H> = |H> up to phase: compare projectors.
    CHECK(max_abs_diff(apply_to_ket(waveplate_operator({WaveplateKind::half, 0.0}), h),
                       dm_from_pure(h).mat()) < 1e-12);

    // HWP(22.5)|H> = |D>.
    CHECK(max_abs_diff(apply_to_ket(waveplate_operator({WaveplateKind::half, 22.5}), h),
                       dm_from_pure(basis_state(Basis::D)).mat()) < 1e-12);
}

TEST_CASE("waveplate operators are unitary") {
    Rng rng(47);
    for (int k = 0; k < 100; ++k) {
        const double angle = 360.0 * rng.uniform() - 90.0;
        const WaveplateKind kind = k % 2 ? WaveplateKind::half : WaveplateKind::quarter;
        const CMat w = waveplate_operator({kind, angle});
        CHECK(max_abs_diff(w.adjoint() * w, CMat::identity(2)) < 1e-12);
    }
}

TEST_CASE("projector_for basics") {
    CHECK(max_abs_diff(projector_for({std::nullopt, 0.0, PbsPort::transmit}),
                       dm_from_pure(basis_state(Basis::H)).mat()) < 1e-12);
    CHECK(max_abs_diff(projector_for({std::nullopt, 22.5, PbsPort::transmit}),
                       dm_from_pure(basis_state(Basis::D)).mat()) < 1e-12);

    Rng rng(53);
    for (int k = 0; k < 50; ++k) {
        MeasurementSetting m;
        m.hwp_deg = 180.0 * rng.uniform();
        if (k % 2) m.qwp_deg = 180.0 * rng.uniform();
        m.port = k % 3 ? PbsPort::transmit : PbsPort::reflect;
        const CMat p = projector_for(m);
        CHECK(std::abs(p.trace() - cx{1.0, 0.0}) < 1e-10); // rank 1
        CHECK(max_abs_diff(p * p, p) < 1e-10);             // idempotent

        MeasurementSetting other = m;
        other.port = m.port == PbsPort::transmit ? PbsPort::reflect : PbsPort::transmit;
        CHECK(max_abs_diff(p + projector_for(other), CMat::identity(2)) < 1e-10);
    }
}

TEST_CASE("HWP projectors have period 90 degrees") {
    Rng rng(59);
    for (int k = 0; k < 50; ++k) {
        MeasurementSetting m{std::nullopt, 180.0 * rng.uniform(), PbsPort::transmit};
        MeasurementSetting shifted = m;
        shifted.hwp_deg = m.hwp_deg + 90.0;
        CHECK(max_abs_diff(projector_for(m), projector_for(shifted)) < 1e-10);
    }
}

TEST_CASE("six settings project onto the six basis states in order") {
    const auto settings = six_settings();
    CHECK(settings.size() == 6);
    const Basis order[6] = {Basis::H, Basis::V, Basis::D, Basis::A, Basis::R, Basis::L};
    for (int i = 0; i < 6; ++i) {
        CHECK(max_abs_diff(projector_for(settings[static_cast<size_t>(i)]),
                           dm_from_pure(basis_state(order[i])).mat()) < 1e-10);
    }
    // Complementary pairs sum to the identity.
    CHECK(max_abs_diff(projector_for(settings[0]) + projector_for(settings[1]),
                       CMat::identity(2)) < 1e-10);
}

TEST_CASE("fringe settings") {
    const auto one = fringe_settings(Basis::H, {0.0});
    REQUIRE(one.size() == 1);
    CHECK(max_abs_diff(projector_for(one[0].converted),
                       dm_from_pure(basis_state(Basis::H)).mat()) < 1e-12);

    std::vector<double> grid;
    for (int i = 0; i < 36; ++i) grid.push_back(5.0 * i);
    CHECK(fringe_settings(Basis::D, grid).size() == 36);

    // Analyzer D, theta = 22.5: joint projector on the ideal pair state gives
    // the fringe maximum of 1/2.
    const auto at_max = fringe_settings(Basis::D, {22.5});
    const double p = born_probability(dm_from_pure(bell_phi_plus()),
                                      kron(projector_for(at_max[0].unconverted),
                                           projector_for(at_max[0].converted)));
    CHECK(p == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(fringe_settings(Basis::H, {}), std::invalid_argument);
    CHECK_THROWS_AS(fringe_settings(Basis::R, {0.0}), std::invalid_argument);
}
