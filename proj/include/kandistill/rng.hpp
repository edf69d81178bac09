#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace kandistill {

// Snapshot of an Rng, serializable for checkpoints.
struct RngState {
    std::string engine;          // mt19937_64 textual state
    bool has_spare = false;      // Box-Muller spare
    std::uint64_t spare_bits = 0;
};

// Deterministic RNG. mt19937_64 output is fully specified by the standard;
// the uniform/normal transforms are done by hand because the std
// distributions are implementation-defined and would break seed
// reproducibility across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

    // Standard normal via Box-Muller, caching the second deviate.
    double normal();

    RngState state() const;
    void restore(const RngState& s);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Seeded Fisher-Yates.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
        const std::size_t j = rng.below(i + 1);
        std::swap(items[i], items[j]);
    }
}

} // namespace kandistill
