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

#include "bdris/linalg.hpp"

#include <lapacke.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <string>

namespace bdris::linalg
{
    HermitianEigen hermitian_eigen(const CMatrix &a)
    {
        if (a.rows() != a.cols())
            throw ModelError("hermitian_eigen: square input required");
        const lapack_int n = static_cast<lapack_int>(a.rows());
        HermitianEigen out{RVector(n), a};
        if (n == 0)
            return out;
        // zheevd (divide and conquer) is noticeably faster than Eigen's solver at N >= 64.
        const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                               reinterpret_cast<lapack_complex_double *>(out.vectors.data()), n,
                                               out.values.data());
        if (info != 0)
            throw NumericError("hermitian_eigen: zheevd failed with info " + std::to_string(info));
        return out;
    }

    CMatrix psd_factor(const CMatrix &a, double rel_tol)
    {
        const HermitianEigen eig = hermitian_eigen(hermitian_part(a));
        const Index n = eig.values.size();
        if (n == 0)
            return CMatrix(0, 0);
        const double top = eig.values(n - 1);
        Index keep = 0;
        if (top > 0.0)
            while (keep < n && eig.values(n - 1 - keep) > rel_tol * top)
                ++keep;
        CMatrix l(n, keep);
        for (Index c = 0; c < keep; ++c)
            l.col(c) = eig.vectors.col(n - 1 - c) * std::sqrt(eig.values(n - 1 - c));
        return l;
    }

    HermitianSqrt hermitian_sqrt(const CMatrix &a)
    {
        const HermitianEigen eig = hermitian_eigen(hermitian_part(a));
        HermitianSqrt out;
        out.min_eigenvalue = eig.values.size() > 0 ? eig.values.minCoeff() : 0.0;
        // Eigenvalues within rounding noise of zero are treated as zero, so rank-deficient inputs
        // keep their rank (sqrt(1e-16) would otherwise leak into the null space).
        const double top = eig.values.size() > 0 ? eig.values.cwiseAbs().maxCoeff() : 0.0;
        const double floor = 4.0 * static_cast<double>(eig.values.size()) * 2.2e-16 * top;
        const RVector root = (eig.values.array() > floor).select(eig.values.cwiseSqrt(), 0.0);
        out.sqrt = eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
        return out;
    }

    CMatrix hermitian_inverse_sqrt(const CMatrix &a)
    {
        const HermitianEigen eig = hermitian_eigen(hermitian_part(a));
        if (eig.values.size() > 0 && eig.values.minCoeff() <= 0.0)
            throw NumericError("hermitian_inverse_sqrt: matrix is not positive definite");
        const RVector inv_root = eig.values.cwiseSqrt().cwiseInverse();
        return eig.vectors * inv_root.asDiagonal() * eig.vectors.adjoint();
    }

    CMatrix nearest_unitary(const CMatrix &a)
    {
        // A (A^H A)^{-1/2} is the polar factor; an eigensolve is much cheaper than an SVD and
        // accurate when A is well conditioned, which is the common case near the manifold.
        if (a.rows() == a.cols() && a.rows() > 0)
        {
            const HermitianEigen eig = hermitian_eigen(hermitian_part(a.adjoint() * a));
            const RVector &w = eig.values;
            if (w.minCoeff() > 1e-4 * w.maxCoeff())
            {
                const RVector inv = w.cwiseSqrt().cwiseInverse();
                CMatrix u = a * (eig.vectors * inv.asDiagonal() * eig.vectors.adjoint());
                if (unitarity_violation(u) < 1e-12 * static_cast<double>(a.cols()))
                    return u;
            }
        }
        Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
        return svd.matrixU() * svd.matrixV().adjoint();
    }

    double min_hermitian_eigenvalue(const CMatrix &a) { return hermitian_eigen(hermitian_part(a)).values.minCoeff(); }

    double max_hermitian_eigenvalue(const CMatrix &a) { return hermitian_eigen(hermitian_part(a)).values.maxCoeff(); }

    CMatrix hermitian_part(const CMatrix &a) { return 0.5 * (a + a.adjoint()); }

    double unitarity_violation(const CMatrix &a)
    {
        return (a.adjoint() * a - CMatrix::Identity(a.cols(), a.cols())).norm();
    }

    CMatrix kron(const CMatrix &a, const CMatrix &b)
    {
        return Eigen::kroneckerProduct(a, b).eval();
    }

    double relative_frobenius_error(const CMatrix &value, const CMatrix &reference)
    {
        const double denom = reference.norm();
        const double diff = (value - reference).norm();
        return denom > 0.0 ? diff / denom : diff;
    }
}
