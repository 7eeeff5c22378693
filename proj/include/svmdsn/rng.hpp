// Copyright 2026 The svmdsn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace svmdsn {

// Deterministic seed derivation.  Every consumer of randomness (bootstrap
// resampling of group g in layer l, epoch shuffles, weight init, noise for
// synthetic data) derives its own stream from the single run seed plus a
// purpose tag, so adding or reordering consumers never perturbs the others.
//
// The mixer is the splitmix64 finalizer, which is fully specified --
// unlike std::seed_seq, whose output we do not rely on anywhere.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
    return mix_seed(mix_seed(seed, a, b), c);
}

// Thin wrapper around std::mt19937_64 (whose output sequence IS pinned by
// the standard) with hand-rolled distributions, because the std::
// distribution objects are implementation-defined and would break bitwise
// reproducibility across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1): 53-bit mantissa construction.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller.  One value per call, no cached
    // spare, so the draw count per sample is fixed and auditable.
    double gaussian() {
        double u1 = 1.0 - uniform();  // (0, 1]; keeps the log finite
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n).  Rejection-free multiply-shift; the bias
    // is < 2^-53 for every n used here.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Sample `count` indices from [0, n) with replacement (bootstrap).
    std::vector<std::uint32_t> bootstrap(std::size_t n, std::size_t count) {
        std::vector<std::uint32_t> idx(count);
        for (auto& i : idx) i = static_cast<std::uint32_t>(below(n));
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace svmdsn
