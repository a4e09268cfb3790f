#include "mcacq/coset.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace mcacq {

void CosetPattern::validate() const {
    if (period < 1) throw std::invalid_argument("coset pattern: period must be >= 1");
    if (cosets.empty()) throw std::invalid_argument("coset pattern: at least one coset required");
    if (static_cast<int>(cosets.size()) > period)
        throw std::invalid_argument("coset pattern: more cosets than period");
    for (size_t i = 0; i < cosets.size(); ++i) {
        if (cosets[i] < 0 || cosets[i] >= period)
            throw std::invalid_argument("coset pattern: coset index out of [0, L)");
        if (i > 0 && cosets[i] <= cosets[i - 1])
            throw std::invalid_argument("coset pattern: cosets must be strictly increasing");
    }
}

std::string CosetPattern::label() const {
    if (period == 1 && kept() == 1) return "uniform";
    std::ostringstream os;
    os << period << "/" << kept() << ":[";
    for (size_t i = 0; i < cosets.size(); ++i) {
        if (i > 0) os << " ";
        os << cosets[i];
    }
    os << "]";
    return os.str();
}

SamplingMask make_mask(const CosetPattern& p, size_t n_obs) {
    p.validate();
    if (n_obs < 1) throw std::invalid_argument("make_mask: n_obs must be >= 1");
    std::vector<uint8_t> keep_residue(p.period, 0);
    for (int c : p.cosets) keep_residue[c] = 1;
    SamplingMask m;
    m.bits.resize(n_obs);
    for (size_t n = 0; n < n_obs; ++n) {
        m.bits[n] = keep_residue[n % p.period];
        m.retained_count += m.bits[n];
    }
    return m;
}

std::vector<int> retained_indices(const SamplingMask& mask) {
    std::vector<int> idx;
    idx.reserve(mask.retained_count);
    for (size_t n = 0; n < mask.bits.size(); ++n)
        if (mask.bits[n]) idx.push_back(static_cast<int>(n));
    return idx;
}

cvec subsample(const cvec& x, const SamplingMask& mask) {
    if (x.size() != mask.bits.size()) throw std::invalid_argument("subsample: mask/buffer length mismatch");
    cvec y;
    y.reserve(mask.retained_count);
    for (size_t n = 0; n < x.size(); ++n)
        if (mask.bits[n]) y.push_back(x[n]);
    return y;
}

double average_rate(const CosetPattern& p, double fs) {
    p.validate();
    if (fs <= 0.0) throw std::invalid_argument("average_rate: fs must be positive");
    return fs * static_cast<double>(p.kept()) / static_cast<double>(p.period);
}

uint64_t binomial(int l, int k) {
    if (k < 0 || k > l) return 0;
    if (k > l - k) k = l - k;
    uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        const uint64_t num = static_cast<uint64_t>(l - k + i);
        // result * num / i, watching for overflow
        if (result > UINT64_MAX / num) return UINT64_MAX;
        result = result * num / static_cast<uint64_t>(i);
    }
    return result;
}

PatternEnumerator::PatternEnumerator(int l, int k, uint64_t cap) : l_(l), k_(k) {
    if (k < 1 || k > l) throw std::invalid_argument("enumerate_patterns: require 1 <= K <= L");
    total_ = binomial(l, k);
    if (total_ > cap) {
        std::ostringstream os;
        os << "enumerate_patterns: search too large, C(" << l << "," << k << ") = " << total_
           << " exceeds cap " << cap;
        throw CapacityError(os.str());
    }
}

std::optional<CosetPattern> PatternEnumerator::next() {
    if (done_) return std::nullopt;
    if (!started_) {
        started_ = true;
        current_.resize(k_);
        for (int i = 0; i < k_; ++i) current_[i] = i;
        return CosetPattern{l_, current_};
    }
    // advance to the next lexicographic K-subset
    int i = k_ - 1;
    while (i >= 0 && current_[i] == l_ - k_ + i) --i;
    if (i < 0) {
        done_ = true;
        return std::nullopt;
    }
    ++current_[i];
    for (int j = i + 1; j < k_; ++j) current_[j] = current_[j - 1] + 1;
    return CosetPattern{l_, current_};
}

std::vector<CosetPattern> enumerate_patterns(int l, int k, uint64_t cap) {
    PatternEnumerator en(l, k, cap);
    std::vector<CosetPattern> out;
    out.reserve(en.total());
    while (auto p = en.next()) out.push_back(std::move(*p));
    return out;
}

}  // namespace mcacq
