// Known reference waveforms: NR-style PSS/SSS mapped onto OFDM symbols, and a
// seeded QPSK pilot for standard-independent tests.

#pragma once

#include "mcacq/types.hpp"

#include <array>
#include <optional>
#include <string>

namespace mcacq {

struct NumerologyConfig {
    double sampling_frequency_hz = 3.84e6;
    int fft_size = 256;
    double subcarrier_spacing_hz = 15e3;
    // First mapped DFT bin. Default 192 places a 127-subcarrier block on bins
    // -64..+62 around DC (sync block re-centered into the FFT grid).
    int subcarrier_offset = 192;

    void validate() const;
};

struct Pilot {
    cvec samples;
    std::string label;
    std::optional<std::array<int, 2>> identity;  // {n_id1, n_id2} when NR-derived
    std::optional<NumerologyConfig> numerology;

    size_t length() const { return samples.size(); }
    double energy() const;
    double mean_power() const { return energy() / static_cast<double>(samples.size()); }
};

// Length-127 BPSK m-sequence with cyclic shift 43*n_id2; n_id2 in {0,1,2}.
std::vector<double> generate_pss(int n_id2);

// Length-127 BPSK product of two shifted m-sequences; n_id1 in [0,335].
std::vector<double> generate_sss(int n_id1, int n_id2);

// Unitary inverse DFT of freq_seq placed on bins (subcarrier_offset + i) mod
// fft_size; all other bins zero. freq_seq longer than the grid is rejected.
cvec ofdm_modulate(const cvec& freq_seq, const NumerologyConfig& cfg);

// Unitary forward DFT returning the full frequency grid.
cvec ofdm_demodulate(const cvec& time_symbol, const NumerologyConfig& cfg);

// Four OFDM symbols: PSS, zero, SSS, zero. No cyclic prefix.
Pilot build_nr_pilot(int n_id1, int n_id2, const NumerologyConfig& cfg);

// Single-symbol PSS-only replica for PSS-restricted acquisition.
Pilot build_nr_pss_pilot(int n_id2, const NumerologyConfig& cfg);

// Unit-magnitude pseudo-random QPSK pilot, deterministic in seed.
Pilot generate_synthetic_pilot(size_t length, uint64_t seed);

// Pilot file: label, identity, numerology, interleaved re/im sample list.
void save_pilot(const std::string& path, const Pilot& pilot);
Pilot load_pilot(const std::string& path);

}  // namespace mcacq
