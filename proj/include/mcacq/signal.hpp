// Baseband signal synthesis: delayed-Doppler pilot replicas plus calibrated
// circularly-symmetric complex white Gaussian noise.

#pragma once

#include "mcacq/pilot.hpp"
#include "mcacq/types.hpp"

namespace mcacq {

struct SynthesisParams {
    int delay_samples = 0;        // integer delay on the Nyquist grid
    double doppler_hz = 0.0;
    cplx amplitude = {1.0, 0.0};
    double sample_period_s = 0.0;
    double noise_variance = 0.0;  // total complex variance, sigma^2/2 per component
    uint64_t rng_seed = 0;
};

// n i.i.d. complex Gaussian samples with total variance sigma2.
cvec awgn(double sigma2, size_t n, uint64_t seed);

// r[n] = amplitude * s[n-d] * exp(j*2*pi*doppler*n*Ts) + w[n] over [0, n_obs).
// The pilot is zero outside [d, d+N_s); requires n_obs >= N_s + d.
cvec synthesize_received(const Pilot& pilot, const SynthesisParams& p, size_t n_obs);

// Noise variance for a per-sample SNR relative to the mean pilot power over
// the pilot support: sigma^2 = P_s / 10^(snr_db/10).
double snr_to_noise_variance(double snr_db, const Pilot& pilot);

}  // namespace mcacq
