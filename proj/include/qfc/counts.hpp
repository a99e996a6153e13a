// Photon-counting statistics: expected singles/coincidence rates, accidental
// coincidences, seeded Monte Carlo count records, and their CSV form.
//
// Rate conventions: all returned rates are wall-clock (the cavity duty cycle
// is already folded in where it applies); detector A is the unconverted arm,
// detector B the converted arm behind the channel.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfc/channel.hpp"
#include "qfc/cmat.hpp"
#include "qfc/polopt.hpp"
#include "qfc/qstate.hpp"

namespace qfc {

struct DetectorParams {
    double efficiency = 0.5;
    double dark_rate_hz = 0.0;
    double window_s = 10e-9; // coincidence / gate window

    void validate() const;
    bool operator==(const DetectorParams&) const = default;
};

struct SourceDrive {
    double mean_photons_per_pulse = 0.5; // n-bar
    double pulse_rate_hz = 1e6;
    double pulse_width_s = 10e-9;

    void validate() const;
    bool operator==(const SourceDrive&) const = default;
};

struct CountRecord {
    std::string setting_id;
    std::optional<double> theta_deg;
    std::int64_t singles_a = 0;
    std::optional<std::int64_t> singles_b;
    std::optional<std::int64_t> coincidences;
    double integration_s = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const CountRecord&) const = default;
};

struct SinglesRates {
    double signal_hz = 0.0;     // nbar * pulse_rate * eta * det_eff * duty
    double background_hz = 0.0; // dark_rate * window * pulse_rate * duty
    double total_hz() const { return signal_hz + background_hz; }
};

SinglesRates expected_single_rate(const SourceDrive& drive, double channel_eta,
                                  const DetectorParams& det, double duty);

// Signal counts over noise counts in the same gated integration; linear in
// nbar. noise_rate_hz is the photonic background photon rate at the detector
// input (scaled by detector efficiency; dark counts are not). Returns nullopt
// when total noise is zero (infinite SNR).
std::optional<double> snr(const SourceDrive& drive, double noise_rate_hz, double channel_eta,
                          const DetectorParams& det, double duty);

// Photonic noise rate that makes snr() equal slope * nbar.
double snr_noise_rate_for_slope(double slope, double channel_eta, const DetectorParams& det);

struct CoincidenceRates {
    double true_hz = 0.0;
    double accidental_hz = 0.0; // singles_a * singles_b * window, singles incl. darks
    double singles_a_hz = 0.0;
    double singles_b_hz = 0.0;
};

CoincidenceRates expected_coincidence_rate(const DensityMatrix& rho, double pair_rate_hz,
                                           const CMat& proj_a, const CMat& proj_b,
                                           const DetectorParams& det_a,
                                           const DetectorParams& det_b, double channel_eta,
                                           double duty);

struct ExpectedRates {
    double singles_a_hz = 0.0;
    std::optional<double> singles_b_hz;
    std::optional<double> coincidence_hz;
};

// Poisson realization of the expected rates. Coincidences are drawn first and
// added into each singles stream, so coincidences <= min(singles) holds by
// construction. Identical (rates, integration, seed) give identical records.
CountRecord sample_record(const ExpectedRates& rates, double integration_s, std::uint64_t seed,
                          std::string setting_id, std::optional<double> theta_deg = std::nullopt);

struct FringeScanParams {
    double pair_rate_hz = 1e4;
    double integration_s = 1.0;               // wall-clock per grid point
    double noise_coincidence_rate_hz = 0.0;   // gated background pairs per usable second
    double duty = 1.0;
    DetectorParams det_a;
    DetectorParams det_b;
};

// One record per grid point for a coincidence fringe scan of `source` through
// the channel (converted photon on the second slot). Points are sampled with
// per-index sub-seeds, so the output is independent of worker scheduling.
std::vector<CountRecord> simulate_fringe_scan(const DensityMatrix& source,
                                              const ChannelParams& channel,
                                              const std::vector<FringeSettingPair>& settings,
                                              const FringeScanParams& params,
                                              std::uint64_t master_seed);

// CSV schema: setting_id,theta_deg,singles_a,singles_b,coincidences,integration_s,seed
// Header always full; fields absent from a run stay empty.
std::string count_records_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> count_records_from_csv(const std::string& text);

} // namespace qfc
