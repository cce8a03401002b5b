#pragma once

// Counter-based RNG. Each draw hashes (seed, stream, substream, counter)
// through the SplitMix64 finalizer, so substreams (e.g. one per (run,
// patient)) are independent of evaluation order and thread scheduling.

#include <cstdint>
#include <vector>

namespace ddi {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0,
                        std::uint64_t substream = 0)
        : key_(derive_key(seed, stream, substream)) {}

    CounterRng substream(std::uint64_t stream, std::uint64_t substream = 0) const {
        return CounterRng(key_, stream, substream, 0);
    }

    std::uint64_t next_u64() {
        return detail::mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
    }

    // uniform in [0, n); n > 0. Debiased via rejection sampling.
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // uniform in [0, 1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // k distinct values from [0, n), ascending (partial Fisher-Yates over a
    // sparse index map would cost memory; Floyd's algorithm keeps it O(k)).
    std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t k) {
        std::vector<std::uint64_t> out;
        out.reserve(k);
        for (std::uint64_t j = n - k; j < n; ++j) {
            std::uint64_t t = next_below(j + 1);
            bool present = false;
            for (auto v : out)
                if (v == t) { present = true; break; }
            out.push_back(present ? j : t);
        }
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[next_below(i)]);
    }

private:
    CounterRng(std::uint64_t parent_key, std::uint64_t stream, std::uint64_t substream, int)
        : key_(derive_key(parent_key, stream, substream)) {}

    static std::uint64_t derive_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
        std::uint64_t k = detail::mix64(a ^ 0x6a09e667f3bcc909ULL);
        k = detail::mix64(k ^ detail::mix64(b ^ 0xbb67ae8584caa73bULL));
        k = detail::mix64(k ^ detail::mix64(c ^ 0x3c6ef372fe94f82bULL));
        return k;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ddi
