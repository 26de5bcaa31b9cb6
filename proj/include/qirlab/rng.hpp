#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qirlab {

// All stochastic output in this project flows through NormalSampler so that
// runs are reproducible bit-for-bit from a single 64-bit seed. The mt19937-64
// stream is fixed by the standard; normals come from a hand-rolled Box-Muller
// transform rather than std::normal_distribution, whose output is
// implementation-defined.
inline constexpr const char* kGeneratorName = "mt19937-64/box-muller";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Child seed for stream `stream` of a master seed. Used to hand independent,
// schedule-invariant streams to Monte Carlo replications and bootstrap cells.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    // Uniform on (0, 1]; never returns 0 so log() below is safe.
    double uniform() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qirlab
