// Coset pattern representation, binary retain/discard masks, and the
// subsampling operator that keeps K of every L Nyquist-grid samples.

#pragma once

#include "mcacq/types.hpp"

#include <optional>
#include <string>

namespace mcacq {

struct CosetPattern {
    int period = 1;            // L
    std::vector<int> cosets;   // strictly increasing subset of {0..L-1}

    int kept() const { return static_cast<int>(cosets.size()); }
    bool is_uniform() const { return kept() == period; }
    double keep_ratio() const { return static_cast<double>(kept()) / period; }
    void validate() const;

    // Compact id, e.g. "8/4:[2 3 4 5]"; the L=1 benchmark prints as "uniform".
    std::string label() const;

    bool operator==(const CosetPattern& o) const { return period == o.period && cosets == o.cosets; }
};

inline CosetPattern uniform_pattern() { return CosetPattern{1, {0}}; }

struct SamplingMask {
    std::vector<uint8_t> bits;
    size_t retained_count = 0;

    size_t size() const { return bits.size(); }
};

// m[n] = 1 iff (n mod L) in C, for n in [0, n_obs).
SamplingMask make_mask(const CosetPattern& p, size_t n_obs);

// Strictly increasing indices where m[n] = 1.
std::vector<int> retained_indices(const SamplingMask& mask);

// y = samples of x at the retained indices, in order.
cvec subsample(const cvec& x, const SamplingMask& mask);

// Average sampling rate fs * K / L.
double average_rate(const CosetPattern& p, double fs);

// C(L,K); saturates at UINT64_MAX on overflow.
uint64_t binomial(int l, int k);

inline constexpr uint64_t kDefaultEnumerationCap = 1000000;

// Lexicographic K-subset enumerator over {0..L-1}.
class PatternEnumerator {
  public:
    PatternEnumerator(int l, int k, uint64_t cap = kDefaultEnumerationCap);
    std::optional<CosetPattern> next();
    uint64_t total() const { return total_; }

  private:
    int l_;
    int k_;
    uint64_t total_;
    std::vector<int> current_;
    bool done_ = false;
    bool started_ = false;
};

// All C(L,K) patterns in lexicographic order; throws CapacityError above cap.
std::vector<CosetPattern> enumerate_patterns(int l, int k, uint64_t cap = kDefaultEnumerationCap);

}  // namespace mcacq
