#include "qfc/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qfc/errors.hpp"

namespace qfc {

namespace {

void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " +
                                    std::to_string(v));
    }
}

} // namespace

void ChannelParams::validate() const {
    check_unit_interval(eta_h, "channel.eta_h");
    check_unit_interval(eta_v, "channel.eta_v");
    check_unit_interval(noise_admixture, "channel.noise_admixture");
    check_unit_interval(internal_efficiency, "channel.internal_efficiency");
    if (!std::isfinite(phase_rad)) throw std::invalid_argument("channel.phase_rad must be finite");
    if (!(phase_jitter_rad >= 0.0) || !std::isfinite(phase_jitter_rad)) {
        throw std::invalid_argument("channel.phase_jitter_rad must be >= 0");
    }
    for (const auto& e : loss_budget_db) {
        if (!(e.db >= 0.0)) {
            throw std::invalid_argument("loss entry '" + e.label + "' must be >= 0 dB");
        }
    }
}

void CavitySpec::validate() const {
    if (!(fsr_ghz > 0.0)) throw std::invalid_argument("cavity.fsr_ghz must be > 0");
    if (!(bandwidth_mhz > 0.0)) throw std::invalid_argument("cavity.bandwidth_mhz must be > 0");
    if (!(conversion_band_ghz > 0.0)) {
        throw std::invalid_argument("cavity.conversion_band_ghz must be > 0");
    }
    if (!(bandwidth_mhz / 1000.0 < fsr_ghz)) {
        throw std::invalid_argument("cavity bandwidth must be smaller than the free spectral range");
    }
    if (!(fsr_ghz > conversion_band_ghz)) {
        throw std::invalid_argument(
            "cavity.fsr_ghz must exceed the conversion band for a single transmission peak");
    }
    if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) {
        throw std::invalid_argument("cavity.duty_cycle must lie in (0, 1]");
    }
}

CMat conversion_map(const ChannelParams& params) {
    params.validate();
    CMat k(2);
    k.at(0, 0) = std::sqrt(params.eta_h);
    k.at(1, 1) = std::polar(std::sqrt(params.eta_v), params.phase_rad);
    return k;
}

namespace {

double jitter_damping(double sigma) { return std::exp(-0.5 * sigma * sigma); }

// K rho K^dagger on one slot of a dim-2 or dim-4 matrix, with the jitter
// damping applied to coherences in that slot's index.
CMat apply_map_on_slot(const CMat& rho, const ChannelParams& params, int slot) {
    const CMat k2 = conversion_map(params);
    CMat k = k2;
    if (rho.dim() == 4) {
        k = slot == 0 ? kron(k2, CMat::identity(2)) : kron(CMat::identity(2), k2);
    }
    CMat m = k * rho * k.adjoint();
    const double gamma = jitter_damping(params.phase_jitter_rad);
    if (gamma < 1.0) {
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) {
                const int bi = rho.dim() == 2 ? i : (slot == 0 ? i / 2 : i % 2);
                const int bj = rho.dim() == 2 ? j : (slot == 0 ? j / 2 : j % 2);
                if (bi != bj) m.at(i, j) *= gamma;
            }
    }
    return m;
}

} // namespace

ChannelOutput apply_channel_one_qubit(const DensityMatrix& rho, const ChannelParams& params) {
    if (rho.dim() != 2) throw std::invalid_argument("apply_channel_one_qubit needs a 2x2 state");
    CMat m = apply_map_on_slot(rho.mat(), params, 0);
    const double s = m.trace().real();
    if (s <= 0.0) {
        throw DegenerateChannelError("channel success probability is zero for this input");
    }
    m *= cx{1.0 / s, 0.0};
    const double p = params.noise_admixture;
    const CMat mixed = cx{1.0 - p, 0.0} * m + cx{p / 2.0, 0.0} * CMat::identity(2);
    return {DensityMatrix::from_matrix(mixed), s};
}

ChannelOutput apply_channel_to_pair(const DensityMatrix& rho, const ChannelParams& params,
                                    PairSlot which) {
    if (rho.dim() != 4) throw std::invalid_argument("apply_channel_to_pair needs a 4x4 state");
    const int slot = which == PairSlot::first ? 0 : 1;
    CMat m = apply_map_on_slot(rho.mat(), params, slot);
    const double s = m.trace().real();
    if (s <= 0.0) {
        throw DegenerateChannelError("channel success probability is zero for this input");
    }
    m *= cx{1.0 / s, 0.0};

    const double p = params.noise_admixture;
    if (p > 0.0) {
        const CMat keep_marginal = partial_trace(m, slot == 0 ? 1 : 0);
        const CMat half = cx{0.5, 0.0} * CMat::identity(2);
        const CMat noise = slot == 0 ? kron(half, keep_marginal) : kron(keep_marginal, half);
        m = cx{1.0 - p, 0.0} * m + cx{p, 0.0} * noise;
    }
    return {DensityMatrix::from_matrix(m), s};
}

double device_efficiency(double internal_efficiency, const std::vector<LossEntry>& losses) {
    check_unit_interval(internal_efficiency, "internal_efficiency");
    double total_db = 0.0;
    for (const auto& e : losses) {
        if (!(e.db >= 0.0)) {
            throw std::invalid_argument("loss entry '" + e.label + "' must be >= 0 dB");
        }
        total_db += e.db;
    }
    return internal_efficiency * std::pow(10.0, -total_db / 10.0);
}

double device_efficiency(const ChannelParams& params) {
    return device_efficiency(params.internal_efficiency, params.loss_budget_db);
}

double raman_suppression(const CavitySpec& cavity) {
    cavity.validate();
    return (cavity.conversion_band_ghz * 1000.0) / cavity.bandwidth_mhz;
}

double calibrate_noise(double target_fidelity_drop, const DensityMatrix& base) {
    if (base.dim() != 4) throw std::invalid_argument("calibrate_noise needs a two-qubit base state");
    const double f_base = fidelity(base, bell_phi_plus());
    if (!(target_fidelity_drop >= 0.0)) {
        throw std::invalid_argument("calibrate_noise drop must be >= 0");
    }
    if (target_fidelity_drop > f_base - 0.5) {
        throw std::invalid_argument("calibrate_noise drop " + std::to_string(target_fidelity_drop) +
                                    " exceeds the reachable range " + std::to_string(f_base - 0.5));
    }
    if (target_fidelity_drop == 0.0) return 0.0;

    // Single-photon surrogate with the same fidelity; the noise-only channel
    // takes it to (1-p) F + p/2 exactly.
    const DensityMatrix surrogate = DensityMatrix::from_matrix(
        CMat::from_rows({cx{f_base, 0}, cx{0, 0}, cx{0, 0}, cx{1.0 - f_base, 0}}));
    const PureState target = basis_state(Basis::H);
    const double want = f_base - target_fidelity_drop;

    auto fid_at = [&](double p) {
        ChannelParams noise_only;
        noise_only.noise_admixture = p;
        return fidelity(apply_channel_one_qubit(surrogate, noise_only).state, target);
    };

    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (fid_at(mid) > want) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double calibrate_phase_jitter(double target_fidelity_drop) {
    if (!(target_fidelity_drop >= 0.0 && target_fidelity_drop < 0.5)) {
        throw std::invalid_argument("calibrate_phase_jitter drop must lie in [0, 0.5)");
    }
    if (target_fidelity_drop == 0.0) return 0.0;
    return std::sqrt(-2.0 * std::log(1.0 - 2.0 * target_fidelity_drop));
}

} // namespace qfc
