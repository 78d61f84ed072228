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

#ifndef BDRIS_RIS_MATRIX_HPP
#define BDRIS_RIS_MATRIX_HPP

#include "bdris/types.hpp"

#include <string>

namespace bdris
{
    enum class RisArchitecture
    {
        beyond_diagonal, // fully-connected, Theta unitary
        diagonal         // phase-only, Theta diagonal with unit-modulus entries
    };

    std::string to_string(RisArchitecture arch);

    // N x N reflection matrix tagged with its architecture.
    struct RisMatrix
    {
        CMatrix theta;
        RisArchitecture architecture = RisArchitecture::beyond_diagonal;

        Index size() const { return theta.rows(); }

        static RisMatrix identity(Index n, RisArchitecture arch = RisArchitecture::beyond_diagonal);
        static RisMatrix from_phases(const RVector &phases, RisArchitecture arch);

        // ||Theta^H Theta - I||_F for BD; for D the max of |off-diagonal| and ||theta_n| - 1|.
        double constraint_violation() const;
    };
}

#endif
