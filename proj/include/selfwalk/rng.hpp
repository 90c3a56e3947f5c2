#pragma once

#include <cstdint>

// Seeded random streams for the simulator. The generator is splitmix64 used
// in counter form: draw i of a stream with key s is mix64(s + (i+1)*GAMMA).
// Any draw is a pure function of (key, index), so runs are reproducible and
// independent of scheduling; per-run streams are derived by hashing
// (master_seed, run_index). The identifier below is embedded in all output
// file headers.

namespace selfwalk {

inline constexpr const char* kRngId = "splitmix64";

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    Rng() = default;
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

    friend bool operator==(const Rng& a, const Rng& b) { return a.state_ == b.state_; }

private:
    std::uint64_t state_ = 0;
};

// Stream for run `index` under `master`. Distinct indices give statistically
// independent streams.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + kGolden));
}

// Stateless hash of a composite key to a uniform double in [0,1).
inline double key_uniform(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c) {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (static_cast<std::uint64_t>(a) + kGolden));
    h = mix64(h ^ (static_cast<std::uint64_t>(b) + kGolden));
    h = mix64(h ^ (static_cast<std::uint64_t>(c) + kGolden));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace selfwalk
