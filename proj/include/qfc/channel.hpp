// The conversion-interface channel: a dual-arm diagonal success operator with
// interferometer phase, unpolarized background admixture, a dB loss ledger,
// and the cavity noise-suppression arithmetic.

#pragma once

#include <string>
#include <vector>

#include "qfc/cmat.hpp"
#include "qfc/qstate.hpp"

namespace qfc {

struct LossEntry {
    std::string label;
    double db = 0.0;

    bool operator==(const LossEntry&) const = default;
};

struct ChannelParams {
    double eta_h = 1.0;            // arm conversion efficiency for H
    double eta_v = 1.0;            // arm conversion efficiency for V
    double phase_rad = 0.0;        // interferometer phase between the arms
    double phase_jitter_rad = 0.0; // std dev of residual phase noise
    double noise_admixture = 0.0;  // probability a detected converted photon is background
    std::vector<LossEntry> loss_budget_db;
    double internal_efficiency = 1.0;

    void validate() const; // throws std::invalid_argument naming the field
    bool operator==(const ChannelParams&) const = default;
};

struct CavitySpec {
    double fsr_ghz = 150.0;
    double bandwidth_mhz = 250.0;
    double conversion_band_ghz = 42.0;
    double duty_cycle = 0.06;

    void validate() const;
    bool operator==(const CavitySpec&) const = default;
};

// Trace-decreasing success operator K = diag(sqrt(eta_h), e^{i phase} sqrt(eta_v)).
CMat conversion_map(const ChannelParams& params);

struct ChannelOutput {
    DensityMatrix state;
    double success_prob = 0.0;
};

// rho' = (1-p) N[K rho K^dagger] + p I/2, where N normalizes and phase jitter
// damps the H-V coherence by exp(-jitter^2/2) (Gaussian ensemble average).
// Throws DegenerateChannelError when Tr(K rho K^dagger) = 0.
ChannelOutput apply_channel_one_qubit(const DensityMatrix& rho, const ChannelParams& params);

enum class PairSlot { first, second };

// Applies K (and jitter damping) on the chosen slot of a two-qubit state,
// renormalizes, then mixes unpolarized noise onto that slot only:
// (1-p) rho + p (marginal of the other slot) x I/2.
ChannelOutput apply_channel_to_pair(const DensityMatrix& rho, const ChannelParams& params,
                                    PairSlot which);

// internal_efficiency * 10^(-sum(dB)/10).
double device_efficiency(const ChannelParams& params);
double device_efficiency(double internal_efficiency, const std::vector<LossEntry>& losses);

// Broadband-noise suppression factor: conversion band / cavity bandwidth
// (unit-consistent); the passed fraction of in-band noise is its reciprocal.
double raman_suppression(const CavitySpec& cavity);

// Admixture p such that the fidelity ledger drops by target_drop from the
// base pair's fidelity F. Uses the per-detected-photon anchor: an unpolarized
// photon overlaps any pure polarization state with probability 1/2, so
// F(p) = (1-p) F + p/2. Solved by bisection over an actual channel
// application; agrees with p = drop / (F - 1/2) to 1e-9.
double calibrate_noise(double target_fidelity_drop, const DensityMatrix& base);

// Phase-jitter std dev that drops a coherence-carried state's fidelity by
// `drop` through the exp(-sigma^2/2) damping alone: sigma = sqrt(-2 ln(1-2 drop)).
double calibrate_phase_jitter(double target_fidelity_drop);

} // namespace qfc
