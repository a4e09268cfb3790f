#include "mcacq/signal.hpp"

#include <stdexcept>

namespace mcacq {

cvec awgn(double sigma2, size_t n, uint64_t seed) {
    if (sigma2 < 0.0) throw std::invalid_argument("awgn: negative noise variance");
    cvec out(n, cplx{0.0, 0.0});
    if (sigma2 == 0.0) return out;
    Rng64 rng(seed);
    const double scale = std::sqrt(sigma2 / 2.0);
    for (size_t i = 0; i < n; ++i) {
        double zr, zi;
        rng.next_gaussian_pair(zr, zi);
        out[i] = cplx{scale * zr, scale * zi};
    }
    return out;
}

cvec synthesize_received(const Pilot& pilot, const SynthesisParams& p, size_t n_obs) {
    if (p.delay_samples < 0) throw std::invalid_argument("synthesize_received: negative delay");
    if (p.sample_period_s <= 0.0) throw std::invalid_argument("synthesize_received: sample period must be positive");
    const size_t ns = pilot.length();
    if (n_obs < ns + static_cast<size_t>(p.delay_samples))
        throw std::invalid_argument("synthesize_received: n_obs too small for pilot length plus delay");

    cvec r = awgn(p.noise_variance, n_obs, p.rng_seed);
    const size_t d = static_cast<size_t>(p.delay_samples);
    const double w = kTwoPi * p.doppler_hz * p.sample_period_s;
    for (size_t k = 0; k < ns; ++k) {
        const size_t n = d + k;
        const double ph = w * static_cast<double>(n);
        r[n] += p.amplitude * pilot.samples[k] * cplx{std::cos(ph), std::sin(ph)};
    }
    return r;
}

double snr_to_noise_variance(double snr_db, const Pilot& pilot) {
    if (pilot.length() == 0 || pilot.energy() <= 0.0)
        throw std::invalid_argument("snr_to_noise_variance: pilot has no energy");
    return pilot.mean_power() / std::pow(10.0, snr_db / 10.0);
}

}  // namespace mcacq
