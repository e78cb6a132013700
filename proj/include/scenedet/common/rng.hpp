#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace scenedet {

// Seeded random stream with portable derived draws. std::mt19937_64 output
// is fully specified by the standard; the distribution adapters below avoid
// std::*_distribution, whose results differ between standard libraries.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1).
    double next_double()
    {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    // Uniform in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound)
    {
        // Rejection sampling to stay unbiased.
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

    int next_int(int lo, int hi) // inclusive range
    {
        return lo + static_cast<int>(next_below(
                            static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform in [lo, hi).
    double next_range(double lo, double hi)
    {
        return lo + (hi - lo) * next_double();
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derives an independent child seed; advances this stream.
    std::uint64_t fork_seed()
    {
        std::uint64_t s = eng_();
        return s ^ 0x9e3779b97f4a7c15ull;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace scenedet
