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

#ifndef BDRIS_RIS_OPTIMIZER_HPP
#define BDRIS_RIS_OPTIMIZER_HPP

#include "bdris/ris_matrix.hpp"
#include "bdris/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bdris
{
    // Statistical-CSI inputs of the inter-user cross-correlation cost: G = H^H H and the R_k.
    struct CostContext
    {
        CMatrix gram;
        std::vector<CMatrix> correlations;

        int num_users() const { return static_cast<int>(correlations.size()); }
        Index size() const { return gram.rows(); }
        void validate() const;
    };

    struct ArmijoSettings
    {
        double initial_step = 1.0;          // first trial step is initial_step / ||xi||_F
        double contraction = 0.5;
        double sufficient_decrease = 1e-4;
        int max_contractions = 50;
    };

    struct OptimizerSettings
    {
        int max_iterations = 1000;
        double relative_tolerance = 1e-6;   // stop when ||grad_M f|| < relative_tolerance * initial norm
        double gradient_tolerance = 0.0;    // absolute floor for the same test
        ArmijoSettings armijo;
        bool safeguard_reunitarize = true;
        std::uint64_t seed = 1;

        void validate() const;
    };

    enum class StopReason
    {
        gradient_tolerance,
        max_iterations,
        line_search_failed,
        zero_gradient
    };

    std::string to_string(StopReason reason);

    // Entry 0 describes the initial point; entry i the i-th accepted iterate.
    struct OptimizerTrace
    {
        std::vector<double> cost;
        std::vector<double> gradient_norm;
        std::vector<double> step;
        std::vector<double> constraint_violation;
        int iterations = 0;
        StopReason stop = StopReason::max_iterations;

        double final_cost() const { return cost.empty() ? 0.0 : cost.back(); }
        double max_constraint_violation() const;
    };

    struct OptimizerResult
    {
        RisMatrix theta;
        OptimizerTrace trace;
    };

    // f(Theta) = sum_{k<j} tr(R_k Theta^H G Theta R_j Theta^H G Theta). Throws NumericError when the
    // imaginary residue exceeds 1e-9 of the summed term magnitudes.
    double cost(const RisMatrix &theta, const CostContext &ctx);

    // grad f = sum_{k<j} 2 (Y R_j X R_k + Y R_k X R_j), Y = G Theta, X = Theta^H Y, with respect to the
    // real inner product Re tr(A^H B).
    CMatrix euclidean_gradient(const RisMatrix &theta, const CostContext &ctx);

    // Diagonal matrix carrying the diagonal of m.
    CMatrix chdiag(const CMatrix &m);

    // BD: Z - Theta chdiag(Theta^H Z). D: keeps the diagonal only and removes the radial part
    // Re{z_n conj(theta_n)} theta_n of every entry.
    CMatrix project_tangent(const RisMatrix &theta, const CMatrix &z);

    // Riemannian Polak-Ribiere coefficient; 0 when the previous gradient vanishes.
    double polak_ribiere(const CMatrix &current_grad, const CMatrix &previous_grad, const RisMatrix &theta);

    // BD: (Theta + d xi)(I + d^2 xi^H xi)^{-1/2}, replaced by its polar factor when `safeguard` is set
    // and the unitarity violation exceeds 1e-8. D: elementwise (theta_n + d xi_n) / |theta_n + d xi_n|,
    // keeping the previous phase when the sum vanishes.
    RisMatrix retract(const RisMatrix &theta, const CMatrix &direction, double step, bool safeguard = true);

    double real_inner(const CMatrix &a, const CMatrix &b);

    // Generic smooth objective over the RIS matrix (cost and Euclidean gradient).
    struct Objective
    {
        std::function<double(const CMatrix &)> cost;
        std::function<CMatrix(const CMatrix &)> gradient;
    };

    // Same cost and gradient as above, evaluated through low-rank factors of G and the R_k
    // (eigenvalues below 1e-14 of the largest dropped). The factors are computed once here.
    Objective make_objective(const CostContext &ctx);

    struct LineSearchResult
    {
        double step = 0.0;
        bool converged = false; // no acceptable step (or zero direction)
        RisMatrix theta;
        double cost = 0.0;
    };

    // Largest step initial_step * c^m / ||xi|| satisfying the Armijo condition with slope Re<grad, xi>.
    LineSearchResult backtracking_step(const RisMatrix &theta, double current_cost, const CMatrix &euclidean_grad,
                                       const CMatrix &direction, const Objective &objective,
                                       const ArmijoSettings &armijo, bool safeguard = true);

    LineSearchResult backtracking_step(const RisMatrix &theta, const CMatrix &direction, const CostContext &ctx,
                                       const ArmijoSettings &armijo, bool safeguard = true);

    // Riemannian conjugate gradient from `initial` on the manifold given by its architecture.
    OptimizerResult minimize(const Objective &objective, const RisMatrix &initial, const OptimizerSettings &settings);

    // Random-phase diagonal starting point drawn from `seed`.
    RisMatrix random_phase_initialization(Index n, RisArchitecture arch, std::uint64_t seed);

    OptimizerResult optimize(const CostContext &ctx, RisArchitecture arch, const OptimizerSettings &settings);
    OptimizerResult optimize_diagonal(const CostContext &ctx, const OptimizerSettings &settings);
}

#endif
