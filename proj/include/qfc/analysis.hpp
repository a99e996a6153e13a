// Inverse problems: single-qubit state tomography (linear inversion and
// likelihood maximization), sinusoidal fringe fitting, the visibility ->
// fidelity estimate, the fidelity budget ledger, and parametric bootstrap
// error bars.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfc/cmat.hpp"
#include "qfc/counts.hpp"
#include "qfc/qstate.hpp"

namespace qfc {

// Transmit counts for the six analysis settings, in six_settings() order
// (H, V, D, A, R, L). Real-valued so exact expected counts can be fed through
// the same estimators.
struct TomoCounts {
    std::array<double, 6> n{};
};

TomoCounts tomo_counts_from_records(const std::vector<CountRecord>& records);

struct LinearInversionResult {
    CMat rho;      // Hermitian, unit trace; may have a negative eigenvalue
    bool positive; // min eigenvalue >= -1e-12
};

// Stokes reconstruction rho = (I + s1 sx + s2 sy + s3 sz)/2 from normalized
// count differences (D/A, R/L, H/V). Throws InsufficientDataError when a
// basis pair has no counts.
LinearInversionResult linear_inversion(const TomoCounts& counts);

struct MleOptions {
    int max_iter = 2000;
    double tol = 1e-12;                      // stop when the log-likelihood gain falls below
    std::optional<DensityMatrix> seed_state; // default: PSD-projected linear inversion
    std::optional<PureState> target;         // fills fidelity_to_target when present
};

struct TomographyResult {
    DensityMatrix rho_hat;
    double fidelity_to_target = 0.0; // NaN when no target was supplied
    double purity = 0.0;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<double> bootstrap_sigma;
    std::vector<double> likelihood_trace; // accepted steps, non-decreasing
};

// Damped R rho R fixed-point iteration for the six-setting likelihood
// sum_i n_i ln Tr(P_i rho). Steps that would lower the likelihood are diluted
// toward the identity until they do not; accepted log-likelihoods are
// non-decreasing. Non-convergence is reported via `converged`, not thrown.
TomographyResult mle_reconstruct(const TomoCounts& counts, const MleOptions& options = {});

struct FringeFit {
    double offset_a = 0.0;
    double cos_b = 0.0;
    double sin_c = 0.0;
    double visibility = 0.0; // sqrt(b^2+c^2)/a, clamped into [0, 1]
    double phase_deg = 0.0;  // HWP angle of the fitted fringe maximum, in [0, 90)
    double rms_residual = 0.0;
    double visibility_sigma = 0.0; // delta-method propagation of the fit covariance
    bool clamped = false;          // raw visibility exceeded 1
};

// Weighted linear least squares on C(theta) = a + b cos(4 theta) + c sin(4 theta)
// with Poisson weights 1/max(C, 1). Needs >= 4 distinct angles spanning >= 90
// degrees and not aliased mod 90; otherwise throws IllPosedFitError.
FringeFit fringe_fit(const std::vector<std::pair<double, double>>& theta_deg_counts);

// (mean(v) + 1) / 2; every v must lie in [0, 1].
double fidelity_from_visibility(const std::vector<double>& visibilities);

struct FidelityBudget {
    double f_initial = 0.0;
    double f_net = 0.0;
    double f_raw = 0.0; // f_net - sum of noise drops
    std::vector<std::pair<std::string, double>> contributions; // alignment first, then drops
    double f_trans = 0.0;         // f_raw / f_initial
    double f_trans_optimal = 0.0; // (f_initial - raman drop) / f_initial
};

FidelityBudget budget(double f_initial, double f_net,
                      const std::vector<std::pair<std::string, double>>& noise_drops);

// Parametric Poisson bootstrap: each resample redraws every count as
// Poisson(observed) and re-runs the estimator. Failed resamples are dropped;
// more than 10% failures throws UnstableEstimateError. Deterministic per seed
// and worker count.
double bootstrap_sigma(const std::vector<CountRecord>& records,
                       const std::function<double(const std::vector<CountRecord>&)>& estimator,
                       int n_resamples, std::uint64_t seed);

} // namespace qfc
