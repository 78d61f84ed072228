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

#include "bdris/ris_matrix.hpp"
#include "bdris/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace bdris
{
    std::string to_string(RisArchitecture arch)
    {
        return arch == RisArchitecture::beyond_diagonal ? "bd" : "d";
    }

    RisMatrix RisMatrix::identity(Index n, RisArchitecture arch)
    {
        return {CMatrix::Identity(n, n), arch};
    }

    RisMatrix RisMatrix::from_phases(const RVector &phases, RisArchitecture arch)
    {
        const Index n = phases.size();
        RisMatrix out{CMatrix::Zero(n, n), arch};
        for (Index i = 0; i < n; ++i)
            out.theta(i, i) = std::polar(1.0, phases(i));
        return out;
    }

    double RisMatrix::constraint_violation() const
    {
        if (architecture == RisArchitecture::beyond_diagonal)
            return linalg::unitarity_violation(theta);

        double worst = 0.0;
        for (Index c = 0; c < theta.cols(); ++c)
            for (Index r = 0; r < theta.rows(); ++r)
            {
                const double v = (r == c) ? std::abs(std::abs(theta(r, c)) - 1.0) : std::abs(theta(r, c));
                worst = std::max(worst, v);
            }
        return worst;
    }
}
