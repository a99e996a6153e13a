#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qfc/analysis.hpp"
#include "qfc/counts.hpp"
#include "qfc/experiments.hpp"
#include "qfc/polopt.hpp"

using namespace qfc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qfcbench_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json result_json(const fs::path& dir) {
    return nlohmann::json::parse(slurp(dir / "result.json"));
}

double num(const nlohmann::json& j, const std::string& key) {
    return std::stod(j.at(key).get<std::string>());
}

} // namespace

TEST_CASE("efficiency experiment writes the ledger") {
    RunConfig cfg = default_config(Experiment::efficiency);
    cfg.output_dir = fresh_dir("eff").string();
    const RunResult res = run_experiment(cfg);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.files.size() == 3);
    for (const auto& f : res.files) CHECK(fs::exists(f));

    const auto j = result_json(cfg.output_dir);
    CHECK(num(j, "eta_device") == doctest::Approx(0.0359884).epsilon(1e-4));
    CHECK(num(j, "raman_suppression") == doctest::Approx(168.0).epsilon(1e-10));
    CHECK(num(j, "loss_total_db") == doctest::Approx(8.8).epsilon(1e-12));
}

TEST_CASE("budget experiment reproduces the ledger numbers") {
    RunConfig cfg = default_config(Experiment::budget);
    cfg.output_dir = fresh_dir("budget").string();
    REQUIRE(run_experiment(cfg).exit_code == 0);
    const auto j = result_json(cfg.output_dir);
    CHECK(num(j, "f_raw") == doctest::Approx(0.945).epsilon(1e-10));
    CHECK(num(j, "f_trans") == doctest::Approx(0.9555).epsilon(2e-3));
    CHECK(num(j, "f_trans_optimal") == doctest::Approx(0.9848).epsilon(2e-3));
    CHECK(num(j, "f_net_from_visibilities") == doctest::Approx(0.97525).epsilon(1e-10));
}

TEST_CASE("snr sweep fits the configured slope") {
    RunConfig cfg = default_config(Experiment::snr_sweep);
    cfg.output_dir = fresh_dir("snr").string();
    REQUIRE(run_experiment(cfg).exit_code == 0);
    const auto j = result_json(cfg.output_dir);
    CHECK(std::abs(num(j, "slope") - 243.0) < 12.0);
    CHECK(num(j, "r_squared") > 0.99);
    CHECK(num(j, "theory_slope") == doctest::Approx(243.0).epsilon(1e-9));

    const auto records = count_records_from_csv(slurp(fs::path(cfg.output_dir) / "counts.csv"));
    CHECK(records.size() == 2 * cfg.snr_nbar_grid.size());
}

TEST_CASE("tomography experiment, reduced statistics smoke run") {
    RunConfig cfg = default_config(Experiment::tomography);
    cfg.output_dir = fresh_dir("tomo").string();
    cfg.tomo_shots_per_setting = 2e4;
    cfg.tomo_bootstrap_resamples = 120;
    REQUIRE(run_experiment(cfg).exit_code == 0);

    const auto j = result_json(cfg.output_dir);
    for (const std::string s : {"H", "V", "D", "A", "R", "L"}) {
        CHECK(num(j, s + ".fidelity") > 0.9);
        CHECK(num(j, s + ".fidelity") <= 1.0);
        CHECK(j.at(s + ".converged").get<std::string>() == "true");
    }
    CHECK(num(j, "mean_fidelity") > 0.9);

    const auto records = count_records_from_csv(slurp(fs::path(cfg.output_dir) / "counts.csv"));
    CHECK(records.size() == 36);
}

TEST_CASE("fringes experiment, reduced statistics smoke run") {
    RunConfig cfg = default_config(Experiment::fringes);
    cfg.output_dir = fresh_dir("fringes").string();
    cfg.fringe_integration_s = 120.0;
    cfg.fringe_bootstrap_resamples = 120;
    REQUIRE(run_experiment(cfg).exit_code == 0);

    const auto j = result_json(cfg.output_dir);
    for (const std::string s : {"H", "D"}) {
        CHECK(num(j, s + ".visibility") > 0.85);
        CHECK(num(j, s + ".visibility") <= 1.0);
    }
    CHECK(num(j, "f_net") > 0.9);

    const auto records = count_records_from_csv(slurp(fs::path(cfg.output_dir) / "counts.csv"));
    CHECK(records.size() == 72);
    for (const auto& r : records) {
        REQUIRE(r.theta_deg.has_value());
        REQUIRE(r.coincidences.has_value());
    }
}

TEST_CASE("runs replay bit-identically across worker counts") {
    RunConfig cfg = default_config(Experiment::fringes);
    cfg.fringe_integration_s = 60.0;
    cfg.fringe_bootstrap_resamples = 100;

    cfg.output_dir = fresh_dir("replay_a").string();
    REQUIRE(run_experiment(cfg).exit_code == 0);
    const fs::path a = cfg.output_dir;

    setenv("QFCBENCH_THREADS", "1", 1);
    cfg.output_dir = fresh_dir("replay_b").string();
    REQUIRE(run_experiment(cfg).exit_code == 0);
    const fs::path b = cfg.output_dir;

    setenv("QFCBENCH_THREADS", "5", 1);
    cfg.output_dir = fresh_dir("replay_c").string();
    REQUIRE(run_experiment(cfg).exit_code == 0);
    const fs::path c = cfg.output_dir;
    unsetenv("QFCBENCH_THREADS");

    for (const char* f : {"counts.csv", "result.json", "report.txt"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f) == slurp(c / f));
    }
}

TEST_CASE("fringe preset visibility chain is exact in expectation") {
    // Net fringe visibility of the calibrated preset: source visibility 0.978
    // scaled by (1 - p) with p = 0.013/0.489, which lands exactly on
    // 0.978 - 0.026 = 0.952.
    const RunConfig cfg = default_config(Experiment::fringes);
    const DensityMatrix source = werner_from_visibility(cfg.fringe_source_visibility);
    ChannelParams ch = cfg.channel;
    ch.noise_admixture = cfg.fringe_noise_admixture;
    ch.phase_jitter_rad = cfg.fringe_phase_jitter_rad;
    const ChannelOutput sent = apply_channel_to_pair(source, ch, PairSlot::second);

    for (Basis analyzer : {Basis::H, Basis::D}) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : fringe_settings(analyzer, cfg.fringe_theta_grid())) {
            const CoincidenceRates cr = expected_coincidence_rate(
                sent.state, cfg.source_pair_rate_hz, projector_for(s.unconverted),
                projector_for(s.converted), cfg.det_a, cfg.det_b, sent.success_prob,
                cfg.cavity.duty_cycle);
            pts.emplace_back(s.theta_deg, cr.true_hz * cfg.fringe_integration_s);
        }
        const double v = fringe_fit(pts).visibility;
        CHECK(v == doctest::Approx(cfg.fringe_source_visibility *
                                   (1.0 - cfg.fringe_noise_admixture))
                       .epsilon(1e-9));
        CHECK(v == doctest::Approx(0.952).epsilon(1e-9));
    }
}

TEST_CASE("tomography preset fidelities have their closed forms in expectation") {
    const RunConfig cfg = default_config(Experiment::tomography);
    ChannelParams ch = cfg.channel;
    ch.noise_admixture = cfg.tomo_noise_admixture;
    ch.phase_jitter_rad = cfg.tomo_phase_jitter_rad;

    const double p = cfg.tomo_noise_admixture;
    const double gamma = std::exp(-0.5 * ch.phase_jitter_rad * ch.phase_jitter_rad);
    const double f_pole = 1.0 - p / 2.0;                            // H, V
    const double f_coh = (1.0 - p) * (1.0 + gamma) / 2.0 + p / 2.0; // D, A, R, L

    for (Basis b : {Basis::H, Basis::V}) {
        const double f =
            fidelity(apply_channel_one_qubit(dm_from_pure(basis_state(b)), ch).state,
                     basis_state(b));
        CHECK(f == doctest::Approx(f_pole).epsilon(1e-12));
    }
    for (Basis b : {Basis::D, Basis::A, Basis::R, Basis::L}) {
        const double f =
            fidelity(apply_channel_one_qubit(dm_from_pure(basis_state(b)), ch).state,
                     basis_state(b));
        CHECK(f == doctest::Approx(f_coh).epsilon(1e-12));
    }
    // gamma = 1 - 2 * 0.013 by the jitter calibration.
    CHECK(gamma == doctest::Approx(0.974).epsilon(1e-12));
    const double mean = (2.0 * f_pole + 4.0 * f_coh) / 6.0;
    CHECK(mean > 0.945);
    CHECK(mean < 0.985);
}

TEST_CASE("validation failures exit 2 without leaving outputs") {
    RunConfig cfg = default_config(Experiment::tomography);
    cfg.output_dir = fresh_dir("invalid").string();
    cfg.channel.eta_h = 2.0;
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 2);
    CHECK(res.message.find("eta_h") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "result.json"));
}

TEST_CASE("numerical failures exit 3 and remove partial outputs") {
    // 90-degree steps alias every angle mod 90: the fringe fit is ill posed.
    RunConfig cfg = default_config(Experiment::fringes);
    cfg.output_dir = fresh_dir("illposed").string();
    cfg.fringe_theta_step_deg = 90.0;
    cfg.fringe_integration_s = 30.0;
    cfg.fringe_bootstrap_resamples = 0;
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 3);
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "counts.csv"));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "result.json"));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "report.txt"));

    // Budget drops exceeding the net fidelity are a numerical failure too.
    RunConfig bad = default_config(Experiment::budget);
    bad.output_dir = fresh_dir("badbudget").string();
    bad.budget_f_net = 0.02;
    bad.budget_f_initial = 0.03;
    CHECK(run_experiment(bad).exit_code == 3);
}

TEST_CASE("every emitted CSV parses under its own schema") {
    for (Experiment e : {Experiment::tomography, Experiment::fringes, Experiment::snr_sweep,
                         Experiment::budget, Experiment::efficiency}) {
        RunConfig cfg = default_config(e);
        cfg.tomo_shots_per_setting = 1e4;
        cfg.tomo_bootstrap_resamples = 0;
        cfg.fringe_integration_s = 30.0;
        cfg.fringe_bootstrap_resamples = 0;
        cfg.snr_integration_s = 10.0;
        cfg.output_dir = fresh_dir("csv_" + experiment_name(e)).string();
        REQUIRE(run_experiment(cfg).exit_code == 0);
        (void)count_records_from_csv(slurp(fs::path(cfg.output_dir) / "counts.csv"));
    }
}
