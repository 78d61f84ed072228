// SPDX-License-Identifier: Apache-2.0
//
// bdris: BS-side beyond-diagonal RIS massive MIMO simulation library
// Copyright (C) 2026 The bdris authors
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

#ifndef BDRIS_RNG_HPP
#define BDRIS_RNG_HPP

#include "bdris/types.hpp"

#include <cstdint>
#include <random>

namespace bdris
{
    // Stream tags used to derive independent sub-streams from one scenario seed.
    enum class StreamTag : std::uint64_t
    {
        user_drop = 1,
        training = 2,
        optimizer = 3,
        monte_carlo = 4,
        test = 99
    };

    // Seeded random stream. Sub-streams are derived from the construction seed only, so
    // substream(i) is the same no matter how many numbers were drawn from the parent.
    class RngStream
    {
    public:
        explicit RngStream(std::uint64_t seed);

        std::uint64_t seed() const { return seed_; }
        RngStream substream(std::uint64_t index) const;
        RngStream substream(StreamTag tag) const { return substream(static_cast<std::uint64_t>(tag)); }

        double uniform(double lo, double hi);
        double normal();
        cdouble complex_normal(); // CN(0, 1)
        CVector complex_normal_vector(Index n);
        CMatrix complex_normal_matrix(Index rows, Index cols);

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::uint64_t seed_;
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };

    std::uint64_t splitmix64(std::uint64_t x);
}

#endif
