#include "qfc/config.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "qfc/errors.hpp"
#include "qfc/textio.hpp"

namespace qfc {

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::tomography: return "tomography";
        case Experiment::fringes: return "fringes";
        case Experiment::snr_sweep: return "snr-sweep";
        case Experiment::budget: return "budget";
        case Experiment::efficiency: return "efficiency";
    }
    return "?";
}

Experiment experiment_from_name(const std::string& name) {
    for (Experiment e : {Experiment::tomography, Experiment::fringes, Experiment::snr_sweep,
                         Experiment::budget, Experiment::efficiency}) {
        if (experiment_name(e) == name) return e;
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

SourceDrive RunConfig::source_drive() const {
    return {source_nbar, source_pulse_rate_hz, source_pulse_width_s};
}

std::vector<double> RunConfig::fringe_theta_grid() const {
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(fringe_theta_count));
    for (int i = 0; i < fringe_theta_count; ++i) {
        grid.push_back(fringe_theta_start_deg + i * fringe_theta_step_deg);
    }
    return grid;
}

namespace {

// Jitter and admixture presets reproduce the published error ledger:
// 1.3% from alignment, 1.6% from dark counts, 1.5% from photonic background,
// each converted through the per-photon 1/2 overlap anchor F(p) = (1-p)F + p/2.
constexpr double kFidelityInitial = 0.989;
constexpr double kDropAlignment = 0.013;
constexpr double kDropDark = 0.016;
constexpr double kDropRaman = 0.015;

double ledger_admixture(double drop) { return drop / (kFidelityInitial - 0.5); }

std::vector<std::pair<std::string, double>> parse_labeled_list(const std::string& value,
                                                               int line) {
    std::vector<std::pair<std::string, double>> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("expected 'label:number' in list, got '" + item + "'", line);
        }
        const std::string label = trim(item.substr(0, colon));
        const auto num = parse_double(trim(item.substr(colon + 1)));
        if (label.empty() || !num) {
            throw ConfigError("expected 'label:number' in list, got '" + item + "'", line);
        }
        out.emplace_back(label, *num);
    }
    if (out.empty()) throw ConfigError("list value is empty", line);
    return out;
}

std::string fmt_decimal(double v) {
    std::string s = fmt_roundtrip(v);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string format_labeled_list(const std::vector<std::pair<std::string, double>>& list) {
    std::string out;
    for (const auto& [label, v] : list) {
        if (!out.empty()) out += ", ";
        out += label + ":" + fmt_decimal(v);
    }
    return out;
}

std::vector<double> parse_number_list(const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto num = parse_double(item);
        if (!num) throw ConfigError("expected a number in list, got '" + item + "'", line);
        out.push_back(*num);
    }
    if (out.empty()) throw ConfigError("list value is empty", line);
    return out;
}

std::string format_number_list(const std::vector<double>& list) {
    std::string out;
    for (double v : list) {
        if (!out.empty()) out += ", ";
        out += fmt_decimal(v);
    }
    return out;
}

struct KeySpec {
    const char* key;
    const char* comment;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, int)> set;
};

KeySpec num_key(const char* key, const char* comment, double RunConfig::* field) {
    return {key, comment, [field](const RunConfig& c) { return fmt_roundtrip(c.*field); },
            [key, field](RunConfig& c, const std::string& v, int line) {
                const auto num = parse_double(v);
                if (!num) throw ConfigError(std::string("key '") + key + "' expects a number", line);
                c.*field = *num;
            }};
}

KeySpec int_key(const char* key, const char* comment, int RunConfig::* field) {
    return {key, comment,
            [field](const RunConfig& c) { return std::to_string(c.*field); },
            [key, field](RunConfig& c, const std::string& v, int line) {
                const auto num = parse_i64(v);
                if (!num) throw ConfigError(std::string("key '") + key + "' expects an integer",
                                            line);
                c.*field = static_cast<int>(*num);
            }};
}

template <typename Sub>
KeySpec sub_num_key(const char* key, const char* comment, Sub RunConfig::* sub,
                    double Sub::* field) {
    return {key, comment,
            [sub, field](const RunConfig& c) { return fmt_roundtrip(c.*sub.*field); },
            [key, sub, field](RunConfig& c, const std::string& v, int line) {
                const auto num = parse_double(v);
                if (!num) throw ConfigError(std::string("key '") + key + "' expects a number", line);
                c.*sub.*field = *num;
            }};
}

std::vector<KeySpec> key_table() {
    std::vector<KeySpec> t;

    t.push_back(num_key("source.fidelity",
                        "entangled-pair state fidelity of the source (isotropic model)",
                        &RunConfig::source_fidelity));
    t.push_back(num_key("source.pair_rate_hz", "pair rate reaching the analyzers",
                        &RunConfig::source_pair_rate_hz));
    t.push_back(num_key("source.nbar", "mean photons per carved pulse for single-photon runs",
                        &RunConfig::source_nbar));
    t.push_back(num_key("source.pulse_rate_hz", "pulse carving rate",
                        &RunConfig::source_pulse_rate_hz));
    t.push_back(num_key("source.pulse_width_s", "carved pulse width",
                        &RunConfig::source_pulse_width_s));

    t.push_back(sub_num_key("channel.eta_h", "full-device conversion efficiency, H arm",
                            &RunConfig::channel, &ChannelParams::eta_h));
    t.push_back(sub_num_key("channel.eta_v", "full-device conversion efficiency, V arm",
                            &RunConfig::channel, &ChannelParams::eta_v));
    t.push_back(sub_num_key("channel.phase_rad", "static interferometer phase between the arms",
                            &RunConfig::channel, &ChannelParams::phase_rad));
    t.push_back(sub_num_key("channel.phase_jitter_rad",
                            "std dev of residual phase noise (base channel)",
                            &RunConfig::channel, &ChannelParams::phase_jitter_rad));
    t.push_back(sub_num_key("channel.noise_admixture",
                            "unpolarized background admixture (base channel)",
                            &RunConfig::channel, &ChannelParams::noise_admixture));
    t.push_back(sub_num_key("channel.internal_efficiency",
                            "internal conversion efficiency of the waveguides",
                            &RunConfig::channel, &ChannelParams::internal_efficiency));
    t.push_back({"channel.losses", "optical loss ledger in dB, label:value pairs",
                 [](const RunConfig& c) {
                     std::vector<std::pair<std::string, double>> pairs;
                     for (const auto& e : c.channel.loss_budget_db) {
                         pairs.emplace_back(e.label, e.db);
                     }
                     return format_labeled_list(pairs);
                 },
                 [](RunConfig& c, const std::string& v, int line) {
                     c.channel.loss_budget_db.clear();
                     for (auto& [label, db] : parse_labeled_list(v, line)) {
                         c.channel.loss_budget_db.push_back({label, db});
                     }
                 }});

    t.push_back(sub_num_key("cavity.fsr_ghz", "free spectral range of the noise filter cavity",
                            &RunConfig::cavity, &CavitySpec::fsr_ghz));
    t.push_back(sub_num_key("cavity.bandwidth_mhz", "cavity transmission bandwidth",
                            &RunConfig::cavity, &CavitySpec::bandwidth_mhz));
    t.push_back(sub_num_key("cavity.conversion_band_ghz",
                            "spectral conversion bandwidth of the waveguides",
                            &RunConfig::cavity, &CavitySpec::conversion_band_ghz));
    t.push_back(sub_num_key("cavity.duty_cycle",
                            "fraction of time the stabilized cavity passes signal",
                            &RunConfig::cavity, &CavitySpec::duty_cycle));

    t.push_back(sub_num_key("detector_a.efficiency", "unconverted-arm detector efficiency",
                            &RunConfig::det_a, &DetectorParams::efficiency));
    t.push_back(sub_num_key("detector_a.dark_rate_hz", "unconverted-arm dark count rate",
                            &RunConfig::det_a, &DetectorParams::dark_rate_hz));
    t.push_back(sub_num_key("detector_a.window_s", "unconverted-arm gate window",
                            &RunConfig::det_a, &DetectorParams::window_s));
    t.push_back(sub_num_key("detector_b.efficiency", "converted-arm detector efficiency",
                            &RunConfig::det_b, &DetectorParams::efficiency));
    t.push_back(sub_num_key("detector_b.dark_rate_hz", "converted-arm dark count rate",
                            &RunConfig::det_b, &DetectorParams::dark_rate_hz));
    t.push_back(sub_num_key("detector_b.window_s", "converted-arm gate window",
                            &RunConfig::det_b, &DetectorParams::window_s));

    t.push_back(num_key("noise.coincidence_rate_hz",
                        "background coincidences per usable second after gating",
                        &RunConfig::noise_coincidence_rate_hz));
    t.push_back(num_key("noise.snr_photon_rate_hz",
                        "photonic noise photon rate at the converted-arm detector; "
                        "default solves snr.reference_slope",
                        &RunConfig::noise_snr_photon_rate_hz));

    t.push_back(num_key("tomography.shots_per_setting",
                        "expected detected events per analysis setting",
                        &RunConfig::tomo_shots_per_setting));
    t.push_back(num_key("tomography.noise_admixture",
                        "admixture for the tomography run; default calibrated from the "
                        "1.6% + 1.5% noise drops",
                        &RunConfig::tomo_noise_admixture));
    t.push_back(num_key("tomography.phase_jitter_rad",
                        "phase jitter for the tomography run; default calibrated from the "
                        "1.3% alignment drop",
                        &RunConfig::tomo_phase_jitter_rad));
    t.push_back(int_key("tomography.bootstrap_resamples", "0 disables bootstrap error bars",
                        &RunConfig::tomo_bootstrap_resamples));
    t.push_back(num_key("tomography.reference_mean_fidelity",
                        "reference mean reconstructed fidelity for the report",
                        &RunConfig::tomo_reference_mean_fidelity));

    t.push_back(num_key("fringes.source_visibility",
                        "source fringe visibility 2F-1 implied by the ledger",
                        &RunConfig::fringe_source_visibility));
    t.push_back(num_key("fringes.noise_admixture",
                        "admixture for the fringe run; default calibrated from the 1.3% "
                        "alignment drop (net-fringe convention)",
                        &RunConfig::fringe_noise_admixture));
    t.push_back(num_key("fringes.phase_jitter_rad", "phase jitter for the fringe run",
                        &RunConfig::fringe_phase_jitter_rad));
    t.push_back(num_key("fringes.theta_start_deg", "first HWP angle of the scan",
                        &RunConfig::fringe_theta_start_deg));
    t.push_back(num_key("fringes.theta_step_deg", "HWP angle step",
                        &RunConfig::fringe_theta_step_deg));
    t.push_back(int_key("fringes.theta_count", "number of scan angles",
                        &RunConfig::fringe_theta_count));
    t.push_back(num_key("fringes.integration_s", "wall-clock integration per angle",
                        &RunConfig::fringe_integration_s));
    t.push_back(int_key("fringes.bootstrap_resamples", "0 disables bootstrap error bars",
                        &RunConfig::fringe_bootstrap_resamples));
    t.push_back(num_key("fringes.reference_visibility_h", "reference visibility, H analyzer",
                        &RunConfig::fringe_reference_visibility_h));
    t.push_back(num_key("fringes.reference_visibility_d", "reference visibility, D analyzer",
                        &RunConfig::fringe_reference_visibility_d));

    t.push_back({"snr.nbar_grid", "mean photon numbers for the sweep",
                 [](const RunConfig& c) { return format_number_list(c.snr_nbar_grid); },
                 [](RunConfig& c, const std::string& v, int line) {
                     c.snr_nbar_grid = parse_number_list(v, line);
                 }});
    t.push_back(num_key("snr.integration_s", "wall-clock integration per sweep point",
                        &RunConfig::snr_integration_s));
    t.push_back(num_key("snr.reference_slope", "reference SNR-per-nbar slope",
                        &RunConfig::snr_reference_slope));

    t.push_back(num_key("budget.f_initial", "source fidelity entering the ledger",
                        &RunConfig::budget_f_initial));
    t.push_back(num_key("budget.f_net", "net (noise-subtracted) fidelity entering the ledger",
                        &RunConfig::budget_f_net));
    t.push_back({"budget.drops", "noise fidelity drops, label:value pairs",
                 [](const RunConfig& c) { return format_labeled_list(c.budget_drops); },
                 [](RunConfig& c, const std::string& v, int line) {
                     c.budget_drops = parse_labeled_list(v, line);
                 }});
    t.push_back({"budget.visibilities", "measured fringe visibilities feeding (mean+1)/2",
                 [](const RunConfig& c) { return format_number_list(c.budget_visibilities); },
                 [](RunConfig& c, const std::string& v, int line) {
                     c.budget_visibilities = parse_number_list(v, line);
                 }});
    t.push_back(num_key("budget.reference_f_trans", "reference transfer fidelity for the report",
                        &RunConfig::budget_reference_f_trans));

    t.push_back(num_key("efficiency.reference_eta",
                        "reference full-device efficiency for the report",
                        &RunConfig::efficiency_reference_eta));

    t.push_back({"run.master_seed", "master seed; every sample derives from (seed, index)",
                 [](const RunConfig& c) { return fmt_u64(c.master_seed); },
                 [](RunConfig& c, const std::string& v, int line) {
                     const auto num = parse_u64(v);
                     if (!num) {
                         throw ConfigError("key 'run.master_seed' expects a non-negative integer",
                                           line);
                     }
                     c.master_seed = *num;
                 }});
    t.push_back({"run.output_dir", "where counts.csv/result.json/report.txt are written",
                 [](const RunConfig& c) { return c.output_dir; },
                 [](RunConfig& c, const std::string& v, int line) {
                     if (v.empty()) throw ConfigError("key 'run.output_dir' must not be empty",
                                                      line);
                     c.output_dir = v;
                 }});
    return t;
}

const std::vector<KeySpec>& keys() {
    static const std::vector<KeySpec> table = key_table();
    return table;
}

void check_range(bool ok, const std::string& key, const std::string& requirement) {
    if (!ok) throw ConfigError("key '" + key + "' " + requirement);
}

} // namespace

void RunConfig::validate() const {
    try {
        channel.validate();
        cavity.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    try {
        det_a.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("detector_a: ") + e.what());
    }
    try {
        det_b.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("detector_b: ") + e.what());
    }
    try {
        source_drive().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("source: ") + e.what());
    }

    check_range(source_fidelity >= 0.25 && source_fidelity <= 1.0, "source.fidelity",
                "must lie in [0.25, 1]");
    check_range(source_pair_rate_hz > 0.0, "source.pair_rate_hz", "must be > 0");
    check_range(noise_coincidence_rate_hz >= 0.0, "noise.coincidence_rate_hz", "must be >= 0");
    check_range(noise_snr_photon_rate_hz >= 0.0, "noise.snr_photon_rate_hz", "must be >= 0");

    check_range(tomo_shots_per_setting > 0.0, "tomography.shots_per_setting", "must be > 0");
    check_range(tomo_noise_admixture >= 0.0 && tomo_noise_admixture <= 1.0,
                "tomography.noise_admixture", "must lie in [0, 1]");
    check_range(tomo_phase_jitter_rad >= 0.0, "tomography.phase_jitter_rad", "must be >= 0");
    check_range(tomo_bootstrap_resamples >= 0, "tomography.bootstrap_resamples", "must be >= 0");

    check_range(fringe_source_visibility >= 0.0 && fringe_source_visibility <= 1.0,
                "fringes.source_visibility", "must lie in [0, 1]");
    check_range(fringe_noise_admixture >= 0.0 && fringe_noise_admixture <= 1.0,
                "fringes.noise_admixture", "must lie in [0, 1]");
    check_range(fringe_phase_jitter_rad >= 0.0, "fringes.phase_jitter_rad", "must be >= 0");
    check_range(fringe_theta_step_deg > 0.0, "fringes.theta_step_deg", "must be > 0");
    check_range(fringe_theta_count >= 4, "fringes.theta_count", "must be >= 4");
    check_range(fringe_integration_s > 0.0, "fringes.integration_s", "must be > 0");
    check_range(fringe_bootstrap_resamples >= 0, "fringes.bootstrap_resamples", "must be >= 0");

    check_range(!snr_nbar_grid.empty(), "snr.nbar_grid", "must not be empty");
    for (double v : snr_nbar_grid) {
        check_range(v > 0.0, "snr.nbar_grid", "entries must be > 0");
    }
    check_range(snr_integration_s > 0.0, "snr.integration_s", "must be > 0");
    check_range(snr_reference_slope > 0.0, "snr.reference_slope", "must be > 0");

    check_range(budget_f_initial > 0.0 && budget_f_initial <= 1.0, "budget.f_initial",
                "must lie in (0, 1]");
    check_range(budget_f_net >= 0.0 && budget_f_net <= budget_f_initial, "budget.f_net",
                "must lie in [0, budget.f_initial]");
    for (const auto& [label, drop] : budget_drops) {
        check_range(drop >= 0.0, "budget.drops", "entry '" + label + "' must be >= 0");
    }
    for (double v : budget_visibilities) {
        check_range(v >= 0.0 && v <= 1.0, "budget.visibilities", "entries must lie in [0, 1]");
    }
}

RunConfig default_config(Experiment e) {
    RunConfig c;
    c.experiment = e;

    c.channel.eta_h = 0.036;
    c.channel.eta_v = 0.036;
    c.channel.internal_efficiency = 0.273;
    c.channel.loss_budget_db = {
        {"wdm", 3.0}, {"path", 3.7}, {"cavity", 1.1}, {"fiber", 1.0}};

    c.det_a = {0.5, 250.0, 1.0e-8};
    c.det_b = {0.5, 120.0, 1.0e-8};

    c.noise_snr_photon_rate_hz =
        snr_noise_rate_for_slope(c.snr_reference_slope, c.channel.eta_h, c.det_b);

    c.tomo_noise_admixture = ledger_admixture(kDropDark + kDropRaman);
    c.tomo_phase_jitter_rad = calibrate_phase_jitter(kDropAlignment);

    c.fringe_source_visibility = 2.0 * kFidelityInitial - 1.0;
    c.fringe_noise_admixture = ledger_admixture(kDropAlignment);
    c.fringe_phase_jitter_rad = 0.0;

    for (int i = 1; i <= 10; ++i) c.snr_nbar_grid.push_back(0.1 * i);

    c.budget_drops = {{"dark", kDropDark}, {"raman", kDropRaman}};
    c.budget_visibilities = {0.949, 0.952};
    return c;
}

RunConfig parse_config(Experiment e, const std::string& text) {
    RunConfig cfg = default_config(e);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line_no);
        if (value.empty()) throw ConfigError("missing value for key '" + key + "'", line_no);

        bool found = false;
        for (const auto& spec : keys()) {
            if (key == spec.key) {
                spec.set(cfg, value, line_no);
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError("unknown key '" + key + "'", line_no);
    }
    cfg.validate();
    return cfg;
}

std::string print_defaults(Experiment e) {
    const RunConfig cfg = default_config(e);
    std::string out;
    out += "# qfcbench defaults for the '" + experiment_name(e) + "' experiment.\n";
    out += "# Every key below may be overridden; unknown keys are rejected.\n\n";
    for (const auto& spec : keys()) {
        out += "# ";
        out += spec.comment;
        out += "\n";
        out += spec.key;
        out += " = ";
        out += spec.get(cfg);
        out += "\n";
    }
    return out;
}

} // namespace qfc
