#include "qfc/experiments.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "qfc/analysis.hpp"
#include "qfc/errors.hpp"
#include "qfc/polopt.hpp"
#include "qfc/rng.hpp"
#include "qfc/textio.hpp"

namespace qfc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<Basis, 6> kSixInputs = {Basis::H, Basis::V, Basis::D,
                                             Basis::A, Basis::R, Basis::L};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

struct OutputSet {
    fs::path csv, json, report;
    std::vector<std::string> names() const {
        return {csv.string(), json.string(), report.string()};
    }
    void remove_partial() const {
        std::error_code ec;
        fs::remove(csv, ec);
        fs::remove(json, ec);
        fs::remove(report, ec);
    }
};

OutputSet output_paths(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return {dir / "counts.csv", dir / "result.json", dir / "report.txt"};
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

void put(ordered_json& j, const std::string& key, double v) { j[key] = fmt12(v); }
void put(ordered_json& j, const std::string& key, const std::string& v) { j[key] = v; }
void put_bool(ordered_json& j, const std::string& key, bool v) {
    j[key] = v ? "true" : "false";
}

ordered_json result_header(const RunConfig& cfg) {
    ordered_json j;
    put(j, "experiment", experiment_name(cfg.experiment));
    j["master_seed"] = fmt_u64(cfg.master_seed);
    return j;
}

std::string compare_line(const std::string& what, double value, double reference) {
    std::ostringstream os;
    os << "  " << what << ": " << fmt12(value) << "  (reference " << fmt12(reference)
       << ", delta " << fmt12(value - reference) << ")\n";
    return os.str();
}

// ---------------------------------------------------------------- tomography

ChannelParams tomography_channel(const RunConfig& cfg) {
    ChannelParams ch = cfg.channel;
    ch.noise_admixture = cfg.tomo_noise_admixture;
    ch.phase_jitter_rad = cfg.tomo_phase_jitter_rad;
    return ch;
}

RunResult run_tomography(const RunConfig& cfg, const OutputSet& out) {
    const ChannelParams ch = tomography_channel(cfg);
    const auto settings = six_settings();

    std::vector<CountRecord> all_records;
    ordered_json j = result_header(cfg);
    std::string report = "tomography: six-state transfer through the interface\n";
    double fid_sum = 0.0, fid_min = 1.0, fid_max = 0.0;
    bool all_converged = true;

    for (size_t s_idx = 0; s_idx < kSixInputs.size(); ++s_idx) {
        const Basis input = kSixInputs[s_idx];
        const std::string label(basis_label(input));
        const DensityMatrix rho_in = dm_from_pure(basis_state(input));
        const ChannelOutput sent = apply_channel_one_qubit(rho_in, ch);

        std::vector<CountRecord> recs;
        for (size_t m = 0; m < settings.size(); ++m) {
            const double p = born_probability(sent.state, projector_for(settings[m]));
            ExpectedRates rates;
            rates.singles_a_hz = cfg.tomo_shots_per_setting * p;
            recs.push_back(sample_record(rates, 1.0,
                                         derive_seed(cfg.master_seed, s_idx * 6 + m),
                                         "input=" + label + ";meas=" +
                                             std::string(basis_label(kSixInputs[m]))));
        }
        const TomoCounts counts = tomo_counts_from_records(recs);
        const LinearInversionResult lin = linear_inversion(counts);

        MleOptions opts;
        opts.target = basis_state(input);
        TomographyResult res = mle_reconstruct(counts, opts);
        if (!res.converged) {
            return {3, out.names(), "MLE did not converge for input " + label};
        }
        if (cfg.tomo_bootstrap_resamples > 0) {
            const PureState target = basis_state(input);
            res.bootstrap_sigma = bootstrap_sigma(
                recs,
                [&target](const std::vector<CountRecord>& rs) {
                    MleOptions o;
                    o.target = target;
                    return mle_reconstruct(tomo_counts_from_records(rs), o).fidelity_to_target;
                },
                cfg.tomo_bootstrap_resamples, derive_seed(cfg.master_seed, 100 + s_idx));
        }

        fid_sum += res.fidelity_to_target;
        fid_min = std::min(fid_min, res.fidelity_to_target);
        fid_max = std::max(fid_max, res.fidelity_to_target);
        all_converged = all_converged && res.converged;

        put(j, label + ".fidelity", res.fidelity_to_target);
        put(j, label + ".purity", res.purity);
        put(j, label + ".log_likelihood", res.log_likelihood);
        j[label + ".iterations"] = std::to_string(res.iterations);
        put_bool(j, label + ".converged", res.converged);
        put_bool(j, label + ".linear_inversion_positive", lin.positive);
        if (res.bootstrap_sigma) put(j, label + ".fidelity_sigma", *res.bootstrap_sigma);

        report += "  input " + label + ": fidelity " + fmt12(res.fidelity_to_target);
        if (res.bootstrap_sigma) report += " +/- " + fmt12(*res.bootstrap_sigma);
        report += ", purity " + fmt12(res.purity) + "\n";

        all_records.insert(all_records.end(), recs.begin(), recs.end());
    }

    const double mean = fid_sum / 6.0;
    put(j, "mean_fidelity", mean);
    put(j, "min_fidelity", fid_min);
    put(j, "max_fidelity", fid_max);
    put_bool(j, "all_converged", all_converged);
    report += compare_line("mean fidelity", mean, cfg.tomo_reference_mean_fidelity);

    write_file(out.csv, count_records_to_csv(all_records));
    write_file(out.json, json_text(j));
    write_file(out.report, report);
    return {0, out.names(), ""};
}

// ------------------------------------------------------------------- fringes

ChannelParams fringe_channel(const RunConfig& cfg) {
    ChannelParams ch = cfg.channel;
    ch.noise_admixture = cfg.fringe_noise_admixture;
    ch.phase_jitter_rad = cfg.fringe_phase_jitter_rad;
    return ch;
}

RunResult run_fringes(const RunConfig& cfg, const OutputSet& out) {
    const DensityMatrix source = werner_from_visibility(cfg.fringe_source_visibility);
    const ChannelParams ch = fringe_channel(cfg);
    const ChannelOutput sent = apply_channel_to_pair(source, ch, PairSlot::second);
    const auto grid = cfg.fringe_theta_grid();

    FringeScanParams scan;
    scan.pair_rate_hz = cfg.source_pair_rate_hz;
    scan.integration_s = cfg.fringe_integration_s;
    scan.noise_coincidence_rate_hz = cfg.noise_coincidence_rate_hz;
    scan.duty = cfg.cavity.duty_cycle;
    scan.det_a = cfg.det_a;
    scan.det_b = cfg.det_b;

    std::vector<CountRecord> all_records;
    ordered_json j = result_header(cfg);
    std::string report = "fringes: two-photon coincidence scans after conversion\n";
    std::vector<double> net_visibilities;

    const std::array<Basis, 2> analyzers = {Basis::H, Basis::D};
    for (size_t a_idx = 0; a_idx < analyzers.size(); ++a_idx) {
        const Basis analyzer = analyzers[a_idx];
        const std::string label(basis_label(analyzer));
        const auto pair_settings = fringe_settings(analyzer, grid);
        auto recs = simulate_fringe_scan(source, ch, pair_settings, scan,
                                         derive_seed(cfg.master_seed, 500 + a_idx));
        for (auto& r : recs) r.setting_id = "analyzer=" + label + ";" + r.setting_id;

        // Known background floor per point: accidentals plus the gated
        // background coincidence rate. Subtracting it is the net-visibility
        // convention; the raw fit keeps it.
        std::vector<double> floor_counts(recs.size());
        for (size_t i = 0; i < recs.size(); ++i) {
            const CoincidenceRates cr = expected_coincidence_rate(
                sent.state, scan.pair_rate_hz, projector_for(pair_settings[i].unconverted),
                projector_for(pair_settings[i].converted), scan.det_a, scan.det_b,
                sent.success_prob, scan.duty);
            floor_counts[i] =
                (cr.accidental_hz + scan.noise_coincidence_rate_hz * scan.duty) *
                scan.integration_s;
        }

        std::vector<std::pair<double, double>> raw_points, net_points;
        for (size_t i = 0; i < recs.size(); ++i) {
            const double c = static_cast<double>(recs[i].coincidences.value_or(0));
            raw_points.emplace_back(grid[i], c);
            net_points.emplace_back(grid[i], c - floor_counts[i]);
        }
        const FringeFit raw = fringe_fit(raw_points);
        const FringeFit net = fringe_fit(net_points);
        net_visibilities.push_back(net.visibility);

        double vis_sigma = 0.0;
        if (cfg.fringe_bootstrap_resamples > 0) {
            vis_sigma = bootstrap_sigma(
                recs,
                [&grid, &floor_counts](const std::vector<CountRecord>& rs) {
                    std::vector<std::pair<double, double>> pts;
                    for (size_t i = 0; i < rs.size(); ++i) {
                        pts.emplace_back(grid[i],
                                         static_cast<double>(rs[i].coincidences.value_or(0)) -
                                             floor_counts[i]);
                    }
                    return fringe_fit(pts).visibility;
                },
                cfg.fringe_bootstrap_resamples, derive_seed(cfg.master_seed, 600 + a_idx));
        }

        put(j, label + ".visibility", net.visibility);
        put(j, label + ".visibility_raw", raw.visibility);
        put(j, label + ".offset", net.offset_a);
        put(j, label + ".cos", net.cos_b);
        put(j, label + ".sin", net.sin_c);
        put(j, label + ".phase_deg", net.phase_deg);
        put(j, label + ".rms_residual", net.rms_residual);
        put(j, label + ".visibility_fit_sigma", net.visibility_sigma);
        if (cfg.fringe_bootstrap_resamples > 0) {
            put(j, label + ".visibility_bootstrap_sigma", vis_sigma);
        }
        put_bool(j, label + ".clamped", net.clamped);

        const double reference = analyzer == Basis::H ? cfg.fringe_reference_visibility_h
                                                      : cfg.fringe_reference_visibility_d;
        report += "  analyzer " + label + ":\n";
        report += compare_line("net visibility", net.visibility, reference);
        report += "    raw visibility " + fmt12(raw.visibility) + ", rms residual " +
                  fmt12(net.rms_residual) + "\n";

        all_records.insert(all_records.end(), recs.begin(), recs.end());
    }

    const double f_net = fidelity_from_visibility(net_visibilities);
    put(j, "mean_visibility", 0.5 * (net_visibilities[0] + net_visibilities[1]));
    put(j, "f_net", f_net);
    report += compare_line("f_net = (mean visibility + 1)/2", f_net,
                           (0.5 * (cfg.fringe_reference_visibility_h +
                                   cfg.fringe_reference_visibility_d) +
                            1.0) /
                               2.0);

    write_file(out.csv, count_records_to_csv(all_records));
    write_file(out.json, json_text(j));
    write_file(out.report, report);
    return {0, out.names(), ""};
}

// ----------------------------------------------------------------- snr-sweep

RunResult run_snr_sweep(const RunConfig& cfg, const OutputSet& out) {
    const double duty = cfg.cavity.duty_cycle;
    const double eta = cfg.channel.eta_h;
    const DetectorParams det = cfg.det_b;

    // Detected noise rate: photonic background through the detector plus
    // darks, gated per pulse.
    const double noise_hz =
        (cfg.noise_snr_photon_rate_hz * det.efficiency + det.dark_rate_hz) * det.window_s *
        cfg.source_pulse_rate_hz * duty;

    std::vector<CountRecord> all_records;
    ordered_json j = result_header(cfg);
    std::string report = "snr-sweep: conversion efficiency and SNR vs mean photon number\n";

    double sxy = 0.0, sxx = 0.0;
    std::vector<double> nbars, snrs, etas;
    for (size_t i = 0; i < cfg.snr_nbar_grid.size(); ++i) {
        const double nbar = cfg.snr_nbar_grid[i];
        SourceDrive drive = cfg.source_drive();
        drive.mean_photons_per_pulse = nbar;
        const SinglesRates sig = expected_single_rate(drive, eta, det, duty);

        ExpectedRates sig_run;
        sig_run.singles_a_hz = sig.signal_hz + noise_hz;
        ExpectedRates bg_run;
        bg_run.singles_a_hz = noise_hz;
        const CountRecord rec_sig =
            sample_record(sig_run, cfg.snr_integration_s, derive_seed(cfg.master_seed, 2 * i),
                          "nbar=" + fmt12(nbar) + ";run=signal");
        const CountRecord rec_bg =
            sample_record(bg_run, cfg.snr_integration_s, derive_seed(cfg.master_seed, 2 * i + 1),
                          "nbar=" + fmt12(nbar) + ";run=background");
        all_records.push_back(rec_sig);
        all_records.push_back(rec_bg);

        const double net = static_cast<double>(rec_sig.singles_a - rec_bg.singles_a);
        const double bg = std::max(static_cast<double>(rec_bg.singles_a), 1.0);
        const double snr_meas = net / bg;
        const double eta_meas = net / (nbar * cfg.source_pulse_rate_hz * duty *
                                       cfg.snr_integration_s * det.efficiency);
        nbars.push_back(nbar);
        snrs.push_back(snr_meas);
        etas.push_back(eta_meas);
        sxy += nbar * snr_meas;
        sxx += nbar * nbar;

        const std::string idx = std::to_string(i);
        put(j, "points." + idx + ".nbar", nbar);
        put(j, "points." + idx + ".snr", snr_meas);
        put(j, "points." + idx + ".eta", eta_meas);
    }

    const double slope = sxy / sxx;
    double mean_y = 0.0;
    for (double y : snrs) mean_y += y;
    mean_y /= static_cast<double>(snrs.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < snrs.size(); ++i) {
        ss_res += (snrs[i] - slope * nbars[i]) * (snrs[i] - slope * nbars[i]);
        ss_tot += (snrs[i] - mean_y) * (snrs[i] - mean_y);
    }
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    SourceDrive unit_drive = cfg.source_drive();
    unit_drive.mean_photons_per_pulse = 1.0;
    const auto theory =
        snr(unit_drive, cfg.noise_snr_photon_rate_hz, eta, det, duty);

    put(j, "slope", slope);
    put(j, "r_squared", r2);
    put(j, "theory_slope", theory.value_or(std::numeric_limits<double>::infinity()));
    double eta_mean = 0.0;
    for (double e : etas) eta_mean += e;
    eta_mean /= static_cast<double>(etas.size());
    put(j, "eta_mean", eta_mean);

    report += compare_line("fitted SNR slope", slope, cfg.snr_reference_slope);
    report += "  linearity R^2: " + fmt12(r2) + "\n";
    report += compare_line("mean measured efficiency", eta_mean, cfg.efficiency_reference_eta);

    write_file(out.csv, count_records_to_csv(all_records));
    write_file(out.json, json_text(j));
    write_file(out.report, report);
    return {0, out.names(), ""};
}

// -------------------------------------------------------------------- budget

RunResult run_budget(const RunConfig& cfg, const OutputSet& out) {
    const FidelityBudget b = budget(cfg.budget_f_initial, cfg.budget_f_net, cfg.budget_drops);
    const double f_from_vis = fidelity_from_visibility(cfg.budget_visibilities);

    ordered_json j = result_header(cfg);
    put(j, "f_initial", b.f_initial);
    put(j, "f_net", b.f_net);
    put(j, "f_net_from_visibilities", f_from_vis);
    put(j, "f_raw", b.f_raw);
    for (const auto& [label, drop] : b.contributions) put(j, "drop." + label, drop);
    put(j, "f_trans", b.f_trans);
    put(j, "f_trans_optimal", b.f_trans_optimal);

    std::string report = "budget: fidelity ledger through the interface\n";
    report += "  f_initial " + fmt12(b.f_initial) + " -> f_net " + fmt12(b.f_net) +
              " -> f_raw " + fmt12(b.f_raw) + "\n";
    for (const auto& [label, drop] : b.contributions) {
        report += "    drop " + label + ": " + fmt12(drop) + "\n";
    }
    report += compare_line("f_trans = f_raw / f_initial", b.f_trans,
                           cfg.budget_reference_f_trans);
    report += "  f_trans_optimal " + fmt12(b.f_trans_optimal) + "\n";
    report += "  (mean visibility + 1)/2 from configured visibilities: " + fmt12(f_from_vis) +
              "\n";

    write_file(out.csv, count_records_to_csv({}));
    write_file(out.json, json_text(j));
    write_file(out.report, report);
    return {0, out.names(), ""};
}

// ---------------------------------------------------------------- efficiency

RunResult run_efficiency(const RunConfig& cfg, const OutputSet& out) {
    const double eta = device_efficiency(cfg.channel);
    double total_db = 0.0;
    for (const auto& e : cfg.channel.loss_budget_db) total_db += e.db;

    ordered_json j = result_header(cfg);
    put(j, "eta_device", eta);
    put(j, "eta_internal", cfg.channel.internal_efficiency);
    put(j, "loss_total_db", total_db);
    for (const auto& e : cfg.channel.loss_budget_db) {
        put(j, "loss." + e.label + "_db", e.db);
        std::vector<LossEntry> rest;
        for (const auto& o : cfg.channel.loss_budget_db) {
            if (o.label != e.label) rest.push_back(o);
        }
        put(j, "eta_without." + e.label,
            device_efficiency(cfg.channel.internal_efficiency, rest));
    }
    const double supp = raman_suppression(cfg.cavity);
    put(j, "raman_suppression", supp);

    std::string report = "efficiency: device conversion efficiency ledger\n";
    report += compare_line("eta_device", eta, cfg.efficiency_reference_eta);
    report += "  internal efficiency " + fmt12(cfg.channel.internal_efficiency) +
              ", total loss " + fmt12(total_db) + " dB\n";
    report += "  broadband noise suppression factor " + fmt12(supp) + "\n";

    write_file(out.csv, count_records_to_csv({}));
    write_file(out.json, json_text(j));
    write_file(out.report, report);
    return {0, out.names(), ""};
}

} // namespace

RunResult run_experiment(const RunConfig& cfg) {
    OutputSet out;
    try {
        cfg.validate();
        out = output_paths(cfg);
    } catch (const ConfigError& e) {
        return {2, {}, e.what()};
    } catch (const std::exception& e) {
        return {2, {}, e.what()};
    }

    RunResult result;
    try {
        switch (cfg.experiment) {
            case Experiment::tomography: result = run_tomography(cfg, out); break;
            case Experiment::fringes: result = run_fringes(cfg, out); break;
            case Experiment::snr_sweep: result = run_snr_sweep(cfg, out); break;
            case Experiment::budget: result = run_budget(cfg, out); break;
            case Experiment::efficiency: result = run_efficiency(cfg, out); break;
        }
    } catch (const ConfigError& e) {
        out.remove_partial();
        return {2, {}, e.what()};
    } catch (const std::exception& e) {
        out.remove_partial();
        return {3, {}, e.what()};
    }
    if (result.exit_code != 0) {
        out.remove_partial();
        result.files.clear();
        return result;
    }
    for (const auto& f : result.files) {
        if (!fs::exists(f)) {
            out.remove_partial();
            return {3, {}, "output file missing after run: " + f};
        }
    }
    return result;
}

} // namespace qfc
