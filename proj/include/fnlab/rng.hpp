#pragma once

#include <cmath>
#include <cstdint>

namespace fnlab {

/// Deterministic splitmix64 generator. Used everywhere randomness is needed so
/// that artifacts are byte-reproducible across runs, platforms and thread counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Log-uniform over [a,b], a,b > 0.
    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Independent stream derived from this seed; does not advance the parent.
    Rng fork(std::uint64_t stream) const { return Rng(state_ ^ (0xd1342543de82ef95ULL * (stream + 1))); }

private:
    std::uint64_t state_;
};

} // namespace fnlab
