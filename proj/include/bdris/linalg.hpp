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

#ifndef BDRIS_LINALG_HPP
#define BDRIS_LINALG_HPP

#include "bdris/types.hpp"

namespace bdris::linalg
{
    // A = vectors * diag(values) * vectors^H, eigenvalues ascending. Only the lower triangle of
    // `a` is read. Throws NumericError when the solver does not converge.
    struct HermitianEigen
    {
        RVector values;
        CMatrix vectors;
    };
    HermitianEigen hermitian_eigen(const CMatrix &a);

    // L (N x r) with L L^H = A up to the eigenvalues below rel_tol * largest, which are dropped.
    CMatrix psd_factor(const CMatrix &a, double rel_tol = 1e-14);

    struct HermitianSqrt
    {
        CMatrix sqrt;
        double min_eigenvalue = 0.0; // before clamping
    };

    // Square root of a Hermitian PSD matrix; negative eigenvalues are clamped to zero.
    HermitianSqrt hermitian_sqrt(const CMatrix &a);

    // (A)^{-1/2} for Hermitian positive definite A. Throws NumericError if A is not PD.
    CMatrix hermitian_inverse_sqrt(const CMatrix &a);

    // Nearest unitary matrix in Frobenius norm (polar factor U V^H of the SVD).
    CMatrix nearest_unitary(const CMatrix &a);

    double min_hermitian_eigenvalue(const CMatrix &a);
    double max_hermitian_eigenvalue(const CMatrix &a);

    CMatrix hermitian_part(const CMatrix &a);

    // || A^H A - I ||_F
    double unitarity_violation(const CMatrix &a);

    // Standard Kronecker product, index (i_a * rows(b) + i_b).
    CMatrix kron(const CMatrix &a, const CMatrix &b);

    double relative_frobenius_error(const CMatrix &value, const CMatrix &reference);
}

#endif
