#ifndef GMNF_RNG_HPP
#define GMNF_RNG_HPP

#include <cstdint>
#include <random>

#include "gmnf/scalar.hpp"

namespace gmnf {

// Deterministic RNG. Uses the raw mt19937_64 stream only; the standard
// distributions are not portable across library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, k).
    int below(int k) { return k <= 1 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(k)); }

    bool coin() { return (next() & 1) != 0; }

    // Uniform over an inclusive small integer range.
    long range(long lo, long hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Rational on the grid {lo + k*(hi-lo)/steps : k = 0..steps}.
    Rat grid(const Rat& lo, const Rat& hi, int steps) {
        if (lo == hi || steps <= 0) return lo;
        return lo + (hi - lo) * make_rat(below(steps + 1), steps);
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace gmnf

#endif
