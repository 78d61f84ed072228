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

#include "bdris/rng.hpp"

#include <cmath>

namespace bdris
{
    std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    RngStream RngStream::substream(std::uint64_t index) const
    {
        return RngStream(splitmix64(seed_ ^ splitmix64(index + 0x5851F42D4C957F2DULL)));
    }

    double RngStream::uniform(double lo, double hi)
    {
        std::uniform_real_distribution<double> dist(lo, hi);
        return dist(engine_);
    }

    double RngStream::normal() { return normal_(engine_); }

    cdouble RngStream::complex_normal()
    {
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }

    CVector RngStream::complex_normal_vector(Index n)
    {
        CVector v(n);
        for (Index i = 0; i < n; ++i)
            v(i) = complex_normal();
        return v;
    }

    CMatrix RngStream::complex_normal_matrix(Index rows, Index cols)
    {
        CMatrix m(rows, cols);
        for (Index c = 0; c < cols; ++c)
            for (Index r = 0; r < rows; ++r)
                m(r, c) = complex_normal();
        return m;
    }
}
