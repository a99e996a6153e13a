#include "qfc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "qfc/errors.hpp"
#include "qfc/parallel.hpp"
#include "qfc/polopt.hpp"
#include "qfc/rng.hpp"

namespace qfc {

TomoCounts tomo_counts_from_records(const std::vector<CountRecord>& records) {
    if (records.size() != 6) {
        throw std::invalid_argument("tomography needs exactly six records (H,V,D,A,R,L)");
    }
    TomoCounts c;
    for (size_t i = 0; i < 6; ++i) c.n[i] = static_cast<double>(records[i].singles_a);
    return c;
}

LinearInversionResult linear_inversion(const TomoCounts& counts) {
    for (double v : counts.n) {
        if (!(v >= 0.0)) throw std::invalid_argument("tomography counts must be >= 0");
    }
    const double n_h = counts.n[0], n_v = counts.n[1];
    const double n_d = counts.n[2], n_a = counts.n[3];
    const double n_r = counts.n[4], n_l = counts.n[5];
    if (n_h + n_v <= 0.0 || n_d + n_a <= 0.0 || n_r + n_l <= 0.0) {
        throw InsufficientDataError("a tomography basis pair has zero total counts");
    }
    const double s1 = (n_d - n_a) / (n_d + n_a); // sigma_x
    const double s2 = (n_r - n_l) / (n_r + n_l); // sigma_y
    const double s3 = (n_h - n_v) / (n_h + n_v); // sigma_z

    CMat rho(2);
    rho.at(0, 0) = cx{0.5 * (1.0 + s3), 0.0};
    rho.at(1, 1) = cx{0.5 * (1.0 - s3), 0.0};
    rho.at(0, 1) = cx{0.5 * s1, -0.5 * s2};
    rho.at(1, 0) = cx{0.5 * s1, 0.5 * s2};

    LinearInversionResult out{rho, hermitian_eigenvalues(rho).front() >= -1e-12};
    return out;
}

namespace {

std::array<CMat, 6> tomo_projectors() {
    std::array<CMat, 6> p{CMat(2), CMat(2), CMat(2), CMat(2), CMat(2), CMat(2)};
    const auto settings = six_settings();
    for (size_t i = 0; i < 6; ++i) p[i] = projector_for(settings[i]);
    return p;
}

double log_likelihood(const TomoCounts& counts, const std::array<double, 6>& probs) {
    double ll = 0.0;
    for (size_t i = 0; i < 6; ++i) {
        if (counts.n[i] > 0.0) ll += counts.n[i] * std::log(std::max(probs[i], 1e-300));
    }
    return ll;
}

std::array<double, 6> probabilities(const CMat& rho, const std::array<CMat, 6>& proj) {
    std::array<double, 6> p{};
    for (size_t i = 0; i < 6; ++i) p[i] = std::max((proj[i] * rho).trace().real(), 0.0);
    return p;
}

CMat normalized(CMat m) {
    const double tr = m.trace().real();
    m *= cx{1.0 / tr, 0.0};
    return m;
}

} // namespace

TomographyResult mle_reconstruct(const TomoCounts& counts, const MleOptions& options) {
    const auto proj = tomo_projectors();
    double total = 0.0;
    for (double v : counts.n) total += v;
    if (total <= 0.0) throw InsufficientDataError("tomography counts are all zero");

    CMat rho(2);
    if (options.seed_state) {
        rho = options.seed_state->mat();
    } else {
        rho = psd_project(linear_inversion(counts).rho).mat();
    }
    // The update preserves rank, so lift the seed off the boundary.
    rho = normalized(cx{1.0 - 1e-6, 0.0} * rho + cx{0.5e-6, 0.0} * CMat::identity(2));

    auto probs = probabilities(rho, proj);
    double ll = log_likelihood(counts, probs);

    TomographyResult result;
    result.likelihood_trace.push_back(ll);
    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        CMat r(2);
        for (size_t i = 0; i < 6; ++i) {
            if (counts.n[i] <= 0.0) continue;
            r += cx{counts.n[i] / (total * std::max(probs[i], 1e-300)), 0.0} * proj[i];
        }

        // Full R rho R step first, then dilute toward the identity until the
        // likelihood does not decrease.
        double new_ll = -std::numeric_limits<double>::infinity();
        CMat cand(2);
        std::array<double, 6> cand_probs{};
        bool accepted = false;
        for (double lambda = 1.0; lambda >= 1e-6; lambda *= 0.5) {
            CMat t = lambda == 1.0
                         ? r
                         : cx{1.0 / (1.0 + lambda), 0.0} *
                               (CMat::identity(2) + cx{lambda, 0.0} * r);
            cand = normalized(t * rho * t.adjoint());
            cand_probs = probabilities(cand, proj);
            new_ll = log_likelihood(counts, cand_probs);
            if (new_ll >= ll - 1e-12 * (1.0 + std::abs(ll))) {
                accepted = true;
                break;
            }
        }
        if (!accepted) { // no improving direction left
            converged = true;
            break;
        }
        const double gain = new_ll - ll;
        rho = cand;
        probs = cand_probs;
        ll = std::max(ll, new_ll);
        result.likelihood_trace.push_back(ll);
        if (gain < options.tol) {
            converged = true;
            ++iter;
            break;
        }
    }

    result.rho_hat = DensityMatrix::from_matrix(rho);
    result.purity = purity(result.rho_hat);
    result.log_likelihood = ll;
    result.iterations = iter;
    result.converged = converged;
    result.fidelity_to_target = options.target
                                    ? fidelity(result.rho_hat, *options.target)
                                    : std::numeric_limits<double>::quiet_NaN();
    return result;
}

namespace {

// Solve the symmetric 3x3 system S x = b in place; returns false if singular.
bool solve3(double s[3][3], double b[3], double x[3]) {
    int piv[3] = {0, 1, 2};
    double a[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] = s[i][j];
        a[i][3] = b[i];
    }
    double scale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0.0) return false;
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int rrow = col + 1; rrow < 3; ++rrow)
            if (std::abs(a[rrow][col]) > std::abs(a[best][col])) best = rrow;
        std::swap(a[col], a[best]);
        std::swap(piv[col], piv[best]);
        if (std::abs(a[col][col]) < 1e-12 * scale) return false;
        for (int rrow = col + 1; rrow < 3; ++rrow) {
            const double f = a[rrow][col] / a[col][col];
            for (int j = col; j < 4; ++j) a[rrow][j] -= f * a[col][j];
        }
    }
    for (int i = 2; i >= 0; --i) {
        double acc = a[i][3];
        for (int j = i + 1; j < 3; ++j) acc -= a[i][j] * x[j];
        x[i] = acc / a[i][i];
    }
    return true;
}

// Inverse of a symmetric positive definite 3x3 (adjugate form).
bool invert3(const double s[3][3], double inv[3][3]) {
    const double det = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) -
                       s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0]) +
                       s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
    if (std::abs(det) < 1e-300) return false;
    inv[0][0] = (s[1][1] * s[2][2] - s[1][2] * s[2][1]) / det;
    inv[0][1] = (s[0][2] * s[2][1] - s[0][1] * s[2][2]) / det;
    inv[0][2] = (s[0][1] * s[1][2] - s[0][2] * s[1][1]) / det;
    inv[1][0] = inv[0][1];
    inv[1][1] = (s[0][0] * s[2][2] - s[0][2] * s[2][0]) / det;
    inv[1][2] = (s[0][2] * s[1][0] - s[0][0] * s[1][2]) / det;
    inv[2][0] = inv[0][2];
    inv[2][1] = inv[1][2];
    inv[2][2] = (s[0][0] * s[1][1] - s[0][1] * s[1][0]) / det;
    return true;
}

} // namespace

FringeFit fringe_fit(const std::vector<std::pair<double, double>>& theta_deg_counts) {
    std::set<double> distinct;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [theta, c] : theta_deg_counts) {
        distinct.insert(theta);
        lo = std::min(lo, theta);
        hi = std::max(hi, theta);
        if (!std::isfinite(c)) throw std::invalid_argument("fringe counts must be finite");
    }
    if (distinct.size() < 4) {
        throw IllPosedFitError("fringe fit needs at least 4 distinct angles");
    }
    if (hi - lo < 90.0) {
        throw IllPosedFitError("fringe fit needs angles spanning at least 90 degrees");
    }

    double s[3][3] = {{0}};
    double b[3] = {0};
    for (const auto& [theta_deg, c] : theta_deg_counts) {
        const double t = 4.0 * theta_deg * std::numbers::pi / 180.0;
        const double row[3] = {1.0, std::cos(t), std::sin(t)};
        const double w = 1.0 / std::max(c, 1.0);
        for (int i = 0; i < 3; ++i) {
            b[i] += w * row[i] * c;
            for (int j = 0; j < 3; ++j) s[i][j] += w * row[i] * row[j];
        }
    }
    double x[3];
    if (!solve3(s, b, x)) {
        throw IllPosedFitError("fringe fit design is degenerate (angles aliased mod 90 degrees)");
    }
    const double a = x[0], cb = x[1], sc = x[2];
    if (!(a > 0.0)) {
        throw IllPosedFitError("fringe fit offset is not positive; data carry no fringe");
    }

    FringeFit fit;
    fit.offset_a = a;
    fit.cos_b = cb;
    fit.sin_c = sc;
    const double amp = std::hypot(cb, sc);
    const double v_raw = amp / a;

    double cov[3][3];
    if (invert3(s, cov)) {
        // Delta method on V = sqrt(b^2 + c^2) / a.
        const double eps = 1e-30;
        const double dv[3] = {-amp / (a * a), cb / std::max(amp, eps) / a,
                              sc / std::max(amp, eps) / a};
        double var = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) var += dv[i] * cov[i][j] * dv[j];
        fit.visibility_sigma = std::sqrt(std::max(var, 0.0));
    }
    fit.clamped = v_raw > 1.0;
    fit.visibility = std::clamp(v_raw, 0.0, 1.0);

    double phase = std::atan2(sc, cb) * 180.0 / std::numbers::pi / 4.0; // fringe maximum
    phase = std::fmod(phase, 90.0);
    if (phase < 0.0) phase += 90.0;
    fit.phase_deg = phase;

    double ss = 0.0;
    for (const auto& [theta_deg, c] : theta_deg_counts) {
        const double t = 4.0 * theta_deg * std::numbers::pi / 180.0;
        const double model = a + cb * std::cos(t) + sc * std::sin(t);
        ss += (c - model) * (c - model);
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(theta_deg_counts.size()));
    return fit;
}

double fidelity_from_visibility(const std::vector<double>& visibilities) {
    if (visibilities.empty()) {
        throw std::invalid_argument("fidelity_from_visibility needs at least one visibility");
    }
    double sum = 0.0;
    for (double v : visibilities) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("visibility must lie in [0, 1]");
        }
        sum += v;
    }
    return (sum / static_cast<double>(visibilities.size()) + 1.0) / 2.0;
}

FidelityBudget budget(double f_initial, double f_net,
                      const std::vector<std::pair<std::string, double>>& noise_drops) {
    if (!(f_initial > 0.0 && f_initial <= 1.0)) {
        throw std::invalid_argument("budget f_initial must lie in (0, 1]");
    }
    if (!(f_net >= 0.0) || f_net > f_initial + 1e-12) {
        throw std::invalid_argument("budget f_net must lie in [0, f_initial]");
    }
    double total_drop = 0.0;
    double raman_drop = 0.0;
    for (const auto& [label, drop] : noise_drops) {
        if (!(drop >= 0.0)) {
            throw std::invalid_argument("budget drop '" + label + "' must be >= 0");
        }
        total_drop += drop;
        if (label == "raman") raman_drop = drop;
    }
    FidelityBudget out;
    out.f_initial = f_initial;
    out.f_net = f_net;
    out.f_raw = f_net - total_drop;
    if (out.f_raw < 0.0) {
        throw InconsistentBudgetError("noise drops exceed the net fidelity");
    }
    out.contributions.emplace_back("alignment", f_initial - f_net);
    for (const auto& d : noise_drops) out.contributions.push_back(d);
    out.f_trans = out.f_raw / f_initial;
    out.f_trans_optimal = (f_initial - raman_drop) / f_initial;
    return out;
}

double bootstrap_sigma(const std::vector<CountRecord>& records,
                       const std::function<double(const std::vector<CountRecord>&)>& estimator,
                       int n_resamples, std::uint64_t seed) {
    if (n_resamples < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 resamples");
    }
    std::vector<double> estimates(static_cast<size_t>(n_resamples),
                                  std::numeric_limits<double>::quiet_NaN());
    parallel_for(static_cast<size_t>(n_resamples), [&](std::size_t k) {
        Rng rng(derive_seed(seed, k));
        std::vector<CountRecord> resampled = records;
        for (auto& r : resampled) {
            r.singles_a = poisson(rng, static_cast<double>(r.singles_a));
            if (r.singles_b) r.singles_b = poisson(rng, static_cast<double>(*r.singles_b));
            if (r.coincidences) {
                r.coincidences = poisson(rng, static_cast<double>(*r.coincidences));
            }
        }
        try {
            estimates[k] = estimator(resampled);
        } catch (const std::exception&) {
            // dropped and counted below
        }
    });

    std::vector<double> ok;
    ok.reserve(estimates.size());
    for (double e : estimates)
        if (std::isfinite(e)) ok.push_back(e);
    if (ok.size() < 0.9 * static_cast<double>(n_resamples)) {
        throw UnstableEstimateError("more than 10% of bootstrap resamples failed");
    }
    double mean = 0.0;
    for (double e : ok) mean += e;
    mean /= static_cast<double>(ok.size());
    double var = 0.0;
    for (double e : ok) var += (e - mean) * (e - mean);
    var /= static_cast<double>(ok.size() - 1);
    return std::sqrt(var);
}

} // namespace qfc
