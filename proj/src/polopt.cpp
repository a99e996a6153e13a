#include "qfc/polopt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfc {

namespace {

double normalize_deg(double angle_deg) {
    double a = std::fmod(angle_deg, 180.0);
    if (a < 0.0) a += 180.0;
    return a;
}

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

CMat pbs_projector(PbsPort port) {
    CMat p(2);
    if (port == PbsPort::transmit) p.at(0, 0) = 1.0;
    else p.at(1, 1) = 1.0;
    return p;
}

} // namespace

CMat waveplate_operator(const WaveplateSetting& s) {
    if (!std::isfinite(s.angle_deg)) throw std::invalid_argument("waveplate angle must be finite");
    const double t = to_rad(normalize_deg(s.angle_deg));
    if (s.kind == WaveplateKind::half) {
        const double c = std::cos(2.0 * t), sn = std::sin(2.0 * t);
        return CMat::from_rows({cx{c, 0}, cx{sn, 0}, cx{sn, 0}, cx{-c, 0}});
    }
    // R(t) diag(1, i) R(-t)
    const double c = std::cos(t), sn = std::sin(t);
    const cx i{0.0, 1.0};
    return CMat::from_rows({cx{c * c, 0} + i * (sn * sn), cx{sn * c, 0} * (cx{1, 0} - i),
                            cx{sn * c, 0} * (cx{1, 0} - i), cx{sn * sn, 0} + i * (c * c)});
}

CMat projector_for(const MeasurementSetting& m) {
    CMat w = waveplate_operator({WaveplateKind::half, m.hwp_deg});
    if (m.qwp_deg) {
        w = w * waveplate_operator({WaveplateKind::quarter, *m.qwp_deg});
    }
    return w.adjoint() * pbs_projector(m.port) * w;
}

std::array<MeasurementSetting, 6> six_settings() {
    return {
        MeasurementSetting{std::nullopt, 0.0, PbsPort::transmit},  // H
        MeasurementSetting{std::nullopt, 45.0, PbsPort::transmit}, // V
        MeasurementSetting{std::nullopt, 22.5, PbsPort::transmit}, // D
        MeasurementSetting{std::nullopt, 67.5, PbsPort::transmit}, // A
        MeasurementSetting{45.0, 0.0, PbsPort::transmit},          // R
        MeasurementSetting{45.0, 45.0, PbsPort::transmit},         // L
    };
}

std::vector<FringeSettingPair> fringe_settings(Basis analyzer,
                                               const std::vector<double>& theta_grid_deg) {
    if (theta_grid_deg.empty()) {
        throw std::invalid_argument("fringe_settings needs a nonempty angle grid");
    }
    double analyzer_hwp = 0.0;
    if (analyzer == Basis::H) analyzer_hwp = 0.0;
    else if (analyzer == Basis::D) analyzer_hwp = 22.5;
    else throw std::invalid_argument("fringe analyzer must be H or D");

    std::vector<FringeSettingPair> out;
    out.reserve(theta_grid_deg.size());
    for (double theta : theta_grid_deg) {
        out.push_back({MeasurementSetting{std::nullopt, analyzer_hwp, PbsPort::transmit},
                       MeasurementSetting{std::nullopt, theta, PbsPort::transmit}, theta});
    }
    return out;
}

} // namespace qfc
