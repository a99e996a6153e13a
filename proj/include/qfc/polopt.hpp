// Jones-calculus waveplate operators and the measurement settings used by the
// tomography and fringe pipelines.
//
// A detection setting is light passing QWP (optional) then HWP then a PBS
// port, so the measured projector is P = W^dagger Pi_port W with
// W = HWP(h) * QWP(q). Plate angles are fast-axis angles from horizontal in
// degrees at the API boundary, radians internally.
//
// Retardance convention: QWP(theta) = R(theta) diag(1, i) R(-theta). With it,
// (qwp 45, hwp 0, transmit) measures |R> and (qwp 45, hwp 45, transmit)
// measures |L>, matching R=(H+iV)/sqrt2 and L=(H-iV)/sqrt2.

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qfc/cmat.hpp"
#include "qfc/qstate.hpp"

namespace qfc {

enum class WaveplateKind { half, quarter };

struct WaveplateSetting {
    WaveplateKind kind = WaveplateKind::half;
    double angle_deg = 0.0; // normalized to [0, 180) by waveplate_operator
};

enum class PbsPort { transmit, reflect };

struct MeasurementSetting {
    std::optional<double> qwp_deg; // absent when no quarter-wave plate is inserted
    double hwp_deg = 0.0;
    PbsPort port = PbsPort::transmit;
};

// Unitary 2x2 Jones matrix. HWP(theta) has rows (cos2t, sin2t; sin2t, -cos2t).
CMat waveplate_operator(const WaveplateSetting& s);

// Rank-1 projector of the setting; transmit + reflect of the same plates sum
// to the identity.
CMat projector_for(const MeasurementSetting& m);

// The six analysis settings whose projectors are |H><H| ... |L><L| in the
// order H, V, D, A, R, L.
std::array<MeasurementSetting, 6> six_settings();

struct FringeSettingPair {
    MeasurementSetting converted;   // fixed analyzer on the converted photon
    MeasurementSetting unconverted; // HWP at theta, transmit
    double theta_deg = 0.0;
};

// Two-arm settings for a coincidence fringe scan: the converted arm is fixed
// at analyzer H or D, the unconverted arm HWP steps through the grid.
std::vector<FringeSettingPair> fringe_settings(Basis analyzer,
                                               const std::vector<double>& theta_grid_deg);

} // namespace qfc
