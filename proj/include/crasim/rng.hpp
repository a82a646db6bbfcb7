// SPDX-License-Identifier: Apache-2.0
//
// crasim — joint EM- and baseband-domain beamforming simulator for secure
// integrated sensing and communication with reconfigurable antenna arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CRASIM_RNG_HPP
#define CRASIM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace crasim
{

// Self-contained xoshiro256++ generator. The standard-library distributions
// are implementation-defined, so all stochastic draws go through this class
// to keep seeded runs bit-reproducible across toolchains.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed)
    {
        // SplitMix64 expansion of the seed into the full state.
        std::uint64_t x = seed;
        for (auto &word : state_)
        {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64()
    {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 bits of randomness.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) { return int(next_u64() % std::uint64_t(n)); }

    // Standard normal via Box-Muller. Each call consumes exactly two
    // uniforms so the stream layout does not depend on call history.
    double gaussian()
    {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Circularly-symmetric complex normal CN(0, 1).
    std::complex<double> cgaussian()
    {
        const double re = gaussian();
        const double im = gaussian();
        return {re * 0.7071067811865475244, im * 0.7071067811865475244};
    }

    // Unit-modulus complex number with uniform phase.
    std::complex<double> unit_phase()
    {
        const double phi = uniform(0.0, 6.283185307179586476925286766559);
        return {std::cos(phi), std::sin(phi)};
    }

    // Derives an independent stream label from (parent, index) pairs.
    static std::uint64_t derive(std::uint64_t parent, std::uint64_t index)
    {
        std::uint64_t z = parent ^ (0x9E3779B97F4A7C15ULL * (index + 0x632BE59BD9B4E019ULL));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
};

} // namespace crasim

#endif
