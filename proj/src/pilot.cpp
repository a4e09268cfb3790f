#include "mcacq/pilot.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mcacq {

using json = nlohmann::json;

void NumerologyConfig::validate() const {
    if (fft_size < 1) throw ConfigError("numerology: fft_size must be >= 1");
    if (subcarrier_spacing_hz <= 0.0) throw ConfigError("numerology: subcarrier spacing must be positive");
    if (sampling_frequency_hz <= 0.0) throw ConfigError("numerology: sampling frequency must be positive");
    const double expected = static_cast<double>(fft_size) * subcarrier_spacing_hz;
    if (std::abs(sampling_frequency_hz - expected) > 1e-6 * expected)
        throw ConfigError("numerology: sampling frequency must equal fft_size * subcarrier spacing");
    if (subcarrier_offset < 0 || subcarrier_offset >= fft_size)
        throw ConfigError("numerology: subcarrier offset out of range");
}

double Pilot::energy() const {
    double e = 0.0;
    for (const cplx& v : samples) e += std::norm(v);
    return e;
}

namespace {

// 7-bit LFSR sequence x(i+7) = (x(i+tap) + x(i)) mod 2 over 127 steps.
std::vector<int> m_sequence(const std::array<int, 7>& init, int tap) {
    std::vector<int> x(127);
    for (int i = 0; i < 7; ++i) x[i] = init[i];
    for (int i = 0; i + 7 < 127; ++i) x[i + 7] = (x[i + tap] + x[i]) % 2;
    return x;
}

}  // namespace

std::vector<double> generate_pss(int n_id2) {
    if (n_id2 < 0 || n_id2 > 2) throw std::invalid_argument("generate_pss: n_id2 must be in {0,1,2}");
    // x(0..6) = 0,1,1,0,1,1,1
    const std::vector<int> x = m_sequence({0, 1, 1, 0, 1, 1, 1}, 4);
    std::vector<double> d(127);
    for (int n = 0; n < 127; ++n) {
        const int m = (n + 43 * n_id2) % 127;
        d[n] = 1.0 - 2.0 * x[m];
    }
    return d;
}

std::vector<double> generate_sss(int n_id1, int n_id2) {
    if (n_id1 < 0 || n_id1 > 335) throw std::invalid_argument("generate_sss: n_id1 must be in [0,335]");
    if (n_id2 < 0 || n_id2 > 2) throw std::invalid_argument("generate_sss: n_id2 must be in {0,1,2}");
    const std::vector<int> x0 = m_sequence({1, 0, 0, 0, 0, 0, 0}, 4);
    const std::vector<int> x1 = m_sequence({1, 0, 0, 0, 0, 0, 0}, 1);
    const int m0 = 15 * (n_id1 / 112) + 5 * n_id2;
    const int m1 = n_id1 % 112;
    std::vector<double> d(127);
    for (int n = 0; n < 127; ++n) {
        const double a = 1.0 - 2.0 * x0[(n + m0) % 127];
        const double b = 1.0 - 2.0 * x1[(n + m1) % 127];
        d[n] = a * b;
    }
    return d;
}

cvec ofdm_modulate(const cvec& freq_seq, const NumerologyConfig& cfg) {
    cfg.validate();
    const int n = cfg.fft_size;
    if (freq_seq.size() > static_cast<size_t>(n))
        throw std::invalid_argument("ofdm_modulate: sequence overflows the FFT grid");
    cvec time(n, cplx{0.0, 0.0});
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (size_t i = 0; i < freq_seq.size(); ++i) {
        const int bin = (cfg.subcarrier_offset + static_cast<int>(i)) % n;
        const cplx v = freq_seq[i];
        if (v == cplx{0.0, 0.0}) continue;
        const double w = kTwoPi * static_cast<double>(bin) / static_cast<double>(n);
        for (int t = 0; t < n; ++t) {
            const double ph = w * static_cast<double>(t);
            time[t] += v * cplx{std::cos(ph), std::sin(ph)};
        }
    }
    for (auto& v : time) v *= scale;
    return time;
}

cvec ofdm_demodulate(const cvec& time_symbol, const NumerologyConfig& cfg) {
    cfg.validate();
    const int n = cfg.fft_size;
    if (time_symbol.size() != static_cast<size_t>(n))
        throw std::invalid_argument("ofdm_demodulate: symbol length must equal fft_size");
    cvec grid(n, cplx{0.0, 0.0});
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        const double w = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        for (int t = 0; t < n; ++t) {
            const double ph = w * static_cast<double>(t);
            acc += time_symbol[t] * cplx{std::cos(ph), std::sin(ph)};
        }
        grid[k] = acc * scale;
    }
    return grid;
}

namespace {

cvec to_cvec(const std::vector<double>& real_seq) {
    cvec out(real_seq.size());
    for (size_t i = 0; i < real_seq.size(); ++i) out[i] = cplx{real_seq[i], 0.0};
    return out;
}

}  // namespace

Pilot build_nr_pilot(int n_id1, int n_id2, const NumerologyConfig& cfg) {
    cfg.validate();
    const cvec pss_sym = ofdm_modulate(to_cvec(generate_pss(n_id2)), cfg);
    const cvec sss_sym = ofdm_modulate(to_cvec(generate_sss(n_id1, n_id2)), cfg);
    const size_t n = static_cast<size_t>(cfg.fft_size);

    Pilot p;
    p.samples.assign(4 * n, cplx{0.0, 0.0});
    std::copy(pss_sym.begin(), pss_sym.end(), p.samples.begin());
    std::copy(sss_sym.begin(), sss_sym.end(), p.samples.begin() + 2 * n);
    p.label = "nr-ssb-" + std::to_string(n_id1) + "-" + std::to_string(n_id2);
    p.identity = {{n_id1, n_id2}};
    p.numerology = cfg;
    return p;
}

Pilot build_nr_pss_pilot(int n_id2, const NumerologyConfig& cfg) {
    cfg.validate();
    Pilot p;
    p.samples = ofdm_modulate(to_cvec(generate_pss(n_id2)), cfg);
    p.label = "nr-pss-" + std::to_string(n_id2);
    p.identity = {{0, n_id2}};
    p.numerology = cfg;
    return p;
}

Pilot generate_synthetic_pilot(size_t length, uint64_t seed) {
    if (length == 0) throw std::invalid_argument("generate_synthetic_pilot: length must be >= 1");
    static const cplx alphabet[4] = {
        {M_SQRT1_2, M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2}, {-M_SQRT1_2, M_SQRT1_2}, {-M_SQRT1_2, -M_SQRT1_2}};
    Rng64 rng(seed);
    Pilot p;
    p.samples.resize(length);
    for (size_t i = 0; i < length; ++i) p.samples[i] = alphabet[rng.next_below(3)];
    p.label = "qpsk-" + std::to_string(length) + "-" + std::to_string(seed);
    return p;
}

void save_pilot(const std::string& path, const Pilot& pilot) {
    json j;
    j["label"] = pilot.label;
    if (pilot.identity) {
        j["identity"] = {(*pilot.identity)[0], (*pilot.identity)[1]};
    } else {
        j["identity"] = nullptr;
    }
    if (pilot.numerology) {
        j["numerology"] = {{"sampling_frequency_hz", pilot.numerology->sampling_frequency_hz},
                           {"fft_size", pilot.numerology->fft_size},
                           {"subcarrier_spacing_hz", pilot.numerology->subcarrier_spacing_hz},
                           {"subcarrier_offset", pilot.numerology->subcarrier_offset}};
    } else {
        j["numerology"] = nullptr;
    }
    std::vector<double> interleaved;
    interleaved.reserve(2 * pilot.samples.size());
    for (const cplx& v : pilot.samples) {
        interleaved.push_back(v.real());
        interleaved.push_back(v.imag());
    }
    j["samples"] = interleaved;

    std::ofstream out(path);
    if (!out) throw DataError("save_pilot: cannot open " + path);
    out << j.dump(2) << "\n";
}

Pilot load_pilot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_pilot: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("load_pilot: " + path + ": " + e.what());
    }
    Pilot p;
    try {
        p.label = j.at("label").get<std::string>();
        if (!j.at("identity").is_null()) {
            p.identity = {{j["identity"].at(0).get<int>(), j["identity"].at(1).get<int>()}};
        }
        if (!j.at("numerology").is_null()) {
            NumerologyConfig cfg;
            cfg.sampling_frequency_hz = j["numerology"].at("sampling_frequency_hz").get<double>();
            cfg.fft_size = j["numerology"].at("fft_size").get<int>();
            cfg.subcarrier_spacing_hz = j["numerology"].at("subcarrier_spacing_hz").get<double>();
            cfg.subcarrier_offset = j["numerology"].at("subcarrier_offset").get<int>();
            p.numerology = cfg;
        }
        const auto& s = j.at("samples");
        if (s.size() % 2 != 0) throw DataError("load_pilot: odd interleaved sample count");
        p.samples.resize(s.size() / 2);
        for (size_t i = 0; i < p.samples.size(); ++i)
            p.samples[i] = cplx{s.at(2 * i).get<double>(), s.at(2 * i + 1).get<double>()};
    } catch (const json::exception& e) {
        throw DataError("load_pilot: " + path + ": " + e.what());
    }
    if (p.samples.empty() || p.energy() <= 0.0) throw DataError("load_pilot: pilot has no energy");
    return p;
}

}  // namespace mcacq
