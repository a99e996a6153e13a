// Run configuration: flat dotted-key text files, validated defaults, and the
// paper-calibrated preset every experiment starts from. Unknown keys are
// rejected by name; parse errors carry line numbers.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qfc/channel.hpp"
#include "qfc/counts.hpp"

namespace qfc {

enum class Experiment { tomography, fringes, snr_sweep, budget, efficiency };

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

struct RunConfig {
    Experiment experiment = Experiment::tomography;

    // entangled / attenuated source
    double source_fidelity = 0.989;
    double source_pair_rate_hz = 1.0e4;
    double source_nbar = 0.5;
    double source_pulse_rate_hz = 1.0e6;
    double source_pulse_width_s = 1.0e-8;

    ChannelParams channel;
    CavitySpec cavity;

    DetectorParams det_a; // unconverted arm
    DetectorParams det_b; // converted arm, behind the interface

    double noise_coincidence_rate_hz = 0.02;
    double noise_snr_photon_rate_hz = 0.0; // default derived from snr.reference_slope

    // tomography experiment
    double tomo_shots_per_setting = 1.0e6;
    double tomo_noise_admixture = 0.0;
    double tomo_phase_jitter_rad = 0.0;
    int tomo_bootstrap_resamples = 500;
    double tomo_reference_mean_fidelity = 0.965;

    // fringe experiment
    double fringe_source_visibility = 0.978;
    double fringe_noise_admixture = 0.0;
    double fringe_phase_jitter_rad = 0.0;
    double fringe_theta_start_deg = 0.0;
    double fringe_theta_step_deg = 5.0;
    int fringe_theta_count = 36;
    double fringe_integration_s = 2400.0;
    int fringe_bootstrap_resamples = 500;
    double fringe_reference_visibility_h = 0.949;
    double fringe_reference_visibility_d = 0.952;

    // SNR sweep
    std::vector<double> snr_nbar_grid;
    double snr_integration_s = 300.0;
    double snr_reference_slope = 243.0;

    // fidelity budget
    double budget_f_initial = 0.989;
    double budget_f_net = 0.976;
    std::vector<std::pair<std::string, double>> budget_drops;
    std::vector<double> budget_visibilities;
    double budget_reference_f_trans = 0.956;

    // efficiency ledger
    double efficiency_reference_eta = 0.036;

    std::uint64_t master_seed = 1560795;
    std::string output_dir = "qfcbench-out";

    SourceDrive source_drive() const;
    std::vector<double> fringe_theta_grid() const;

    // Throws ConfigError naming the violated key/invariant.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

// The paper-calibrated preset (what an empty config file yields).
RunConfig default_config(Experiment e);

// Apply `key = value` lines on top of the defaults for `e`, then validate.
RunConfig parse_config(Experiment e, const std::string& text);

// Complete default config, one commented line per key; parses back to
// default_config(e) exactly.
std::string print_defaults(Experiment e);

} // namespace qfc
