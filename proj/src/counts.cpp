#include "qfc/counts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qfc/parallel.hpp"
#include "qfc/rng.hpp"
#include "qfc/textio.hpp"

namespace qfc {

void DetectorParams::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw std::invalid_argument("detector efficiency must lie in [0, 1]");
    }
    if (!(dark_rate_hz >= 0.0)) throw std::invalid_argument("detector dark rate must be >= 0");
    if (!(window_s > 0.0)) throw std::invalid_argument("detector window must be > 0");
}

void SourceDrive::validate() const {
    if (!(mean_photons_per_pulse >= 0.0)) {
        throw std::invalid_argument("source.nbar must be >= 0");
    }
    if (!(pulse_rate_hz > 0.0)) throw std::invalid_argument("source.pulse_rate_hz must be > 0");
    if (!(pulse_width_s > 0.0)) throw std::invalid_argument("source.pulse_width_s must be > 0");
}

namespace {

void check_duty(double duty) {
    if (!(duty > 0.0 && duty <= 1.0)) throw std::invalid_argument("duty must lie in (0, 1]");
}

} // namespace

SinglesRates expected_single_rate(const SourceDrive& drive, double channel_eta,
                                  const DetectorParams& det, double duty) {
    drive.validate();
    det.validate();
    check_duty(duty);
    if (!(channel_eta >= 0.0 && channel_eta <= 1.0)) {
        throw std::invalid_argument("channel_eta must lie in [0, 1]");
    }
    SinglesRates r;
    r.signal_hz =
        drive.mean_photons_per_pulse * drive.pulse_rate_hz * channel_eta * det.efficiency * duty;
    r.background_hz = det.dark_rate_hz * det.window_s * drive.pulse_rate_hz * duty;
    return r;
}

std::optional<double> snr(const SourceDrive& drive, double noise_rate_hz, double channel_eta,
                          const DetectorParams& det, double duty) {
    if (!(noise_rate_hz >= 0.0)) throw std::invalid_argument("noise_rate_hz must be >= 0");
    const SinglesRates s = expected_single_rate(drive, channel_eta, det, duty);
    const double noise_hz =
        (noise_rate_hz * det.efficiency + det.dark_rate_hz) * det.window_s * drive.pulse_rate_hz *
        duty;
    if (noise_hz <= 0.0) return std::nullopt; // infinite SNR, not a crash
    return s.signal_hz / noise_hz;
}

double snr_noise_rate_for_slope(double slope, double channel_eta, const DetectorParams& det) {
    det.validate();
    if (!(slope > 0.0)) throw std::invalid_argument("snr slope must be > 0");
    if (!(det.efficiency > 0.0)) throw std::invalid_argument("detector efficiency must be > 0");
    // Solve (x * eff + dark) * window = eta * eff / slope for x.
    const double x =
        (channel_eta * det.efficiency / (slope * det.window_s) - det.dark_rate_hz) /
        det.efficiency;
    if (x < 0.0) {
        throw std::invalid_argument("dark counts alone already exceed the requested SNR slope");
    }
    return x;
}

CoincidenceRates expected_coincidence_rate(const DensityMatrix& rho, double pair_rate_hz,
                                           const CMat& proj_a, const CMat& proj_b,
                                           const DetectorParams& det_a,
                                           const DetectorParams& det_b, double channel_eta,
                                           double duty) {
    if (rho.dim() != 4) throw std::invalid_argument("expected_coincidence_rate needs a pair state");
    if (!(pair_rate_hz >= 0.0)) throw std::invalid_argument("pair rate must be >= 0");
    det_a.validate();
    det_b.validate();
    check_duty(duty);

    const double p_joint = born_probability(rho, kron(proj_a, proj_b));
    const double p_a = born_probability(rho, kron(proj_a, CMat::identity(2)));
    const double p_b = born_probability(rho, kron(CMat::identity(2), proj_b));

    CoincidenceRates r;
    r.true_hz =
        pair_rate_hz * p_joint * channel_eta * det_a.efficiency * det_b.efficiency * duty;
    r.singles_a_hz = pair_rate_hz * p_a * det_a.efficiency * duty + det_a.dark_rate_hz * duty;
    r.singles_b_hz =
        pair_rate_hz * p_b * channel_eta * det_b.efficiency * duty + det_b.dark_rate_hz * duty;
    const double window = 0.5 * (det_a.window_s + det_b.window_s);
    r.accidental_hz = r.singles_a_hz * r.singles_b_hz * window;
    return r;
}

CountRecord sample_record(const ExpectedRates& rates, double integration_s, std::uint64_t seed,
                          std::string setting_id, std::optional<double> theta_deg) {
    if (!(integration_s > 0.0)) throw std::invalid_argument("integration must be > 0");
    if (!(rates.singles_a_hz >= 0.0) || (rates.singles_b_hz && !(*rates.singles_b_hz >= 0.0)) ||
        (rates.coincidence_hz && !(*rates.coincidence_hz >= 0.0))) {
        throw std::invalid_argument("expected rates must be >= 0");
    }
    Rng rng(seed);
    CountRecord rec;
    rec.setting_id = std::move(setting_id);
    rec.theta_deg = theta_deg;
    rec.integration_s = integration_s;
    rec.seed = seed;

    // Fixed draw order: coincidences, then the non-coincident remainder of
    // each singles stream. Coincident events are counted in both singles.
    std::int64_t coinc = 0;
    if (rates.coincidence_hz) {
        coinc = poisson(rng, *rates.coincidence_hz * integration_s);
        rec.coincidences = coinc;
    }
    const double lam_a = rates.singles_a_hz * integration_s;
    const double lam_c = rates.coincidence_hz.value_or(0.0) * integration_s;
    rec.singles_a = coinc + poisson(rng, std::max(lam_a - lam_c, 0.0));
    if (rates.singles_b_hz) {
        const double lam_b = *rates.singles_b_hz * integration_s;
        rec.singles_b = coinc + poisson(rng, std::max(lam_b - lam_c, 0.0));
    }
    return rec;
}

std::vector<CountRecord> simulate_fringe_scan(const DensityMatrix& source,
                                              const ChannelParams& channel,
                                              const std::vector<FringeSettingPair>& settings,
                                              const FringeScanParams& params,
                                              std::uint64_t master_seed) {
    if (settings.empty()) throw std::invalid_argument("fringe scan needs at least one setting");
    const ChannelOutput ch = apply_channel_to_pair(source, channel, PairSlot::second);

    std::vector<CountRecord> records(settings.size());
    parallel_for(settings.size(), [&](std::size_t i) {
        const auto& s = settings[i];
        const CoincidenceRates cr = expected_coincidence_rate(
            ch.state, params.pair_rate_hz, projector_for(s.unconverted),
            projector_for(s.converted), params.det_a, params.det_b, ch.success_prob, params.duty);
        ExpectedRates rates;
        rates.singles_a_hz = cr.singles_a_hz;
        rates.singles_b_hz = cr.singles_b_hz;
        rates.coincidence_hz =
            cr.true_hz + cr.accidental_hz + params.noise_coincidence_rate_hz * params.duty;
        std::ostringstream id;
        id << "theta=" << fmt12(s.theta_deg);
        records[i] = sample_record(rates, params.integration_s, derive_seed(master_seed, i),
                                   id.str(), s.theta_deg);
    });
    return records;
}

std::string count_records_to_csv(const std::vector<CountRecord>& records) {
    std::string out = "setting_id,theta_deg,singles_a,singles_b,coincidences,integration_s,seed\n";
    for (const auto& r : records) {
        if (r.setting_id.find(',') != std::string::npos) {
            throw std::invalid_argument("setting_id must not contain commas");
        }
        out += r.setting_id;
        out += ',';
        if (r.theta_deg) out += fmt12(*r.theta_deg);
        out += ',';
        out += fmt_i64(r.singles_a);
        out += ',';
        if (r.singles_b) out += fmt_i64(*r.singles_b);
        out += ',';
        if (r.coincidences) out += fmt_i64(*r.coincidences);
        out += ',';
        out += fmt12(r.integration_s);
        out += ',';
        out += fmt_u64(r.seed);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

std::vector<CountRecord> count_records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    if (trim(line) != "setting_id,theta_deg,singles_a,singles_b,coincidences,integration_s,seed") {
        throw std::invalid_argument("unexpected CSV header: " + line);
    }
    std::vector<CountRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(trim(line));
        if (f.size() != 7) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) +
                                        ": expected 7 fields, got " + std::to_string(f.size()));
        }
        CountRecord r;
        r.setting_id = f[0];
        auto bad = [&](const char* what) {
            return std::invalid_argument("CSV line " + std::to_string(line_no) + ": bad " + what);
        };
        if (!f[1].empty()) {
            auto v = parse_double(f[1]);
            if (!v) throw bad("theta_deg");
            r.theta_deg = *v;
        }
        auto sa = parse_i64(f[2]);
        if (!sa || *sa < 0) throw bad("singles_a");
        r.singles_a = *sa;
        if (!f[3].empty()) {
            auto v = parse_i64(f[3]);
            if (!v || *v < 0) throw bad("singles_b");
            r.singles_b = *v;
        }
        if (!f[4].empty()) {
            auto v = parse_i64(f[4]);
            if (!v || *v < 0) throw bad("coincidences");
            r.coincidences = *v;
        }
        auto ti = parse_double(f[5]);
        if (!ti || !(*ti > 0.0)) throw bad("integration_s");
        r.integration_s = *ti;
        auto sd = parse_u64(f[6]);
        if (!sd) throw bad("seed");
        r.seed = *sd;
        if (r.coincidences) {
            std::int64_t min_singles = r.singles_a;
            if (r.singles_b) min_singles = std::min(min_singles, *r.singles_b);
            if (*r.coincidences > min_singles) {
                throw std::invalid_argument("CSV line " + std::to_string(line_no) +
                                            ": coincidences exceed singles");
            }
        }
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace qfc
