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

#include "bdris/ris_optimizer.hpp"
#include "bdris/linalg.hpp"
#include "bdris/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace bdris
{
    void CostContext::validate() const
    {
        if (gram.rows() != gram.cols())
            throw ModelError("CostContext: Gram matrix must be square");
        for (const auto &r : correlations)
            if (r.rows() != gram.rows() || r.cols() != gram.cols())
                throw ModelError("CostContext: correlation dimension differs from Gram matrix");
    }

    void OptimizerSettings::validate() const
    {
        if (max_iterations < 0)
            throw ConfigError("optimizer: max_iterations must be non-negative");
        if (!(relative_tolerance > 0.0) && !(gradient_tolerance > 0.0))
            throw ConfigError("optimizer: a positive gradient tolerance is required");
        if (!(armijo.contraction > 0.0 && armijo.contraction < 1.0))
            throw ConfigError("optimizer: Armijo contraction must lie in (0, 1)");
        if (!(armijo.sufficient_decrease > 0.0 && armijo.sufficient_decrease < 1.0))
            throw ConfigError("optimizer: Armijo sufficient-decrease constant must lie in (0, 1)");
        if (!(armijo.initial_step > 0.0))
            throw ConfigError("optimizer: Armijo initial step must be positive");
    }

    std::string to_string(StopReason reason)
    {
        switch (reason)
        {
        case StopReason::gradient_tolerance:
            return "gradient_tolerance";
        case StopReason::max_iterations:
            return "max_iterations";
        case StopReason::line_search_failed:
            return "line_search_failed";
        case StopReason::zero_gradient:
            return "zero_gradient";
        }
        return "unknown";
    }

    double OptimizerTrace::max_constraint_violation() const
    {
        return constraint_violation.empty() ? 0.0 : *std::max_element(constraint_violation.begin(), constraint_violation.end());
    }

    // ---------- Cost and gradient ----------

    double cost(const RisMatrix &theta, const CostContext &ctx)
    {
        const int k_users = ctx.num_users();
        if (k_users < 2)
            return 0.0;

        const CMatrix &t = theta.theta;
        const CMatrix a = t.adjoint() * ctx.gram * t; // X = Theta^H G Theta
        std::vector<CMatrix> c;
        c.reserve(static_cast<std::size_t>(k_users));
        for (const auto &r : ctx.correlations)
            c.push_back(r * a);

        // tr(C_k C_j) = sum_ab C_k(a,b) C_j(b,a); fixed pair order for reproducibility.
        cdouble total(0.0, 0.0);
        double magnitude = 0.0;
        for (int k = 0; k < k_users - 1; ++k)
            for (int j = k + 1; j < k_users; ++j)
            {
                const cdouble term = c[static_cast<std::size_t>(k)].cwiseProduct(c[static_cast<std::size_t>(j)].transpose()).sum();
                total += term;
                magnitude += std::abs(term);
            }

        if (std::abs(total.imag()) > 1e-9 * magnitude + 1e-300)
            throw NumericError("cost: imaginary residue " + std::to_string(total.imag()) + " is not negligible");
        return total.real();
    }

    CMatrix euclidean_gradient(const RisMatrix &theta, const CostContext &ctx)
    {
        const Index n = ctx.size();
        const int k_users = ctx.num_users();
        if (k_users < 2)
            return CMatrix::Zero(n, n);

        const CMatrix y = ctx.gram * theta.theta;
        const CMatrix x = theta.theta.adjoint() * y;

        // sum_{k<j} (R_j X R_k + R_k X R_j) = sum_{k != j} R_k X R_j = T X T - sum_k R_k X R_k, T = sum_k R_k.
        CMatrix total_r = CMatrix::Zero(n, n);
        for (const auto &r : ctx.correlations)
            total_r += r;
        CMatrix s = total_r * x * total_r;
        for (const auto &r : ctx.correlations)
            s.noalias() -= r * x * r;
        return 2.0 * y * s;
    }

    CMatrix chdiag(const CMatrix &m)
    {
        if (m.rows() != m.cols())
            throw ModelError("chdiag: square input required");
        return m.diagonal().asDiagonal();
    }

    CMatrix project_tangent(const RisMatrix &theta, const CMatrix &z)
    {
        const CMatrix &t = theta.theta;
        if (theta.architecture == RisArchitecture::beyond_diagonal)
        {
            const CVector d = (t.adjoint() * z).diagonal();
            return z - t * d.asDiagonal();
        }

        const Index n = t.rows();
        CMatrix out = CMatrix::Zero(n, n);
        for (Index i = 0; i < n; ++i)
        {
            const cdouble zn = z(i, i);
            const cdouble tn = t(i, i);
            out(i, i) = zn - (zn * std::conj(tn)).real() * tn;
        }
        return out;
    }

    double real_inner(const CMatrix &a, const CMatrix &b) { return (a.conjugate().cwiseProduct(b)).sum().real(); }

    double polak_ribiere(const CMatrix &current_grad, const CMatrix &previous_grad, const RisMatrix &theta)
    {
        const double denom = previous_grad.squaredNorm();
        if (!(denom > 0.0))
            return 0.0;
        const CMatrix transported = project_tangent(theta, previous_grad);
        return real_inner(current_grad, current_grad - transported) / denom;
    }

    namespace
    {
        // Retraction along one direction. The eigendecomposition of xi^H xi is shared by every
        // trial step of a line search: (I + d^2 xi^H xi)^{-1/2} = Q (1 + d^2 w)^{-1/2} Q^H.
        class Retraction
        {
        public:
            Retraction(const RisMatrix &theta, const CMatrix &direction) : theta_(theta), direction_(direction)
            {
                if (theta.architecture == RisArchitecture::beyond_diagonal)
                    metric_ = linalg::hermitian_eigen(direction.adjoint() * direction);
            }

            RisMatrix at(double step, bool safeguard) const
            {
                if (step < 0.0)
                    throw ModelError("retract: step must be non-negative");
                if (step == 0.0)
                    return theta_;

                const Index n = theta_.size();
                if (theta_.architecture == RisArchitecture::diagonal)
                {
                    RisMatrix out{CMatrix::Zero(n, n), RisArchitecture::diagonal};
                    for (Index i = 0; i < n; ++i)
                    {
                        const cdouble moved = theta_.theta(i, i) + step * direction_(i, i);
                        const double mag = std::abs(moved);
                        out.theta(i, i) = mag > 0.0 ? moved / mag : theta_.theta(i, i);
                    }
                    return out;
                }

                const RVector scale = (1.0 + step * step * metric_.values.cwiseMax(0.0).array()).rsqrt().matrix();
                const CMatrix inv_sqrt = metric_.vectors * scale.asDiagonal() * metric_.vectors.adjoint();
                RisMatrix out{(theta_.theta + step * direction_) * inv_sqrt, RisArchitecture::beyond_diagonal};
                if (safeguard && linalg::unitarity_violation(out.theta) > 1e-8)
                    out.theta = linalg::nearest_unitary(out.theta);
                return out;
            }

        private:
            const RisMatrix &theta_;
            const CMatrix &direction_;
            linalg::HermitianEigen metric_;
        };

        // Low-rank evaluation of the same cost and gradient: with G = F^H F, R_k = L_k L_k^H and
        // E_k = F Theta L_k, tr(R_k A R_j A) = ||E_k^H E_j||_F^2 and
        // sum_{k != j} R_k A R_j = L W L^H with blocks W_kj = E_k^H E_j (zero for k = j).
        struct FactoredCost
        {
            CMatrix f;                  // r x N
            CMatrix l;                  // N x sum(r_k)
            std::vector<Index> offset;  // column offset of L_k in l; back() is the total
            int users = 0;

            explicit FactoredCost(const CostContext &ctx) : users(ctx.num_users())
            {
                f = linalg::psd_factor(ctx.gram).adjoint();
                std::vector<CMatrix> parts;
                offset.push_back(0);
                for (const auto &r : ctx.correlations)
                {
                    parts.push_back(linalg::psd_factor(r));
                    offset.push_back(offset.back() + parts.back().cols());
                }
                l.resize(ctx.size(), offset.back());
                for (std::size_t k = 0; k < parts.size(); ++k)
                    l.middleCols(offset[k], parts[k].cols()) = parts[k];
            }

            Index width(int k) const { return offset[static_cast<std::size_t>(k) + 1] - offset[static_cast<std::size_t>(k)]; }
            Index start(int k) const { return offset[static_cast<std::size_t>(k)]; }

            double cost(const CMatrix &theta) const
            {
                if (users < 2)
                    return 0.0;
                const CMatrix e = (f * theta) * l;
                const CMatrix w = e.adjoint() * e;
                double total = 0.0;
                for (int k = 0; k < users - 1; ++k)
                    for (int j = k + 1; j < users; ++j)
                        total += w.block(start(k), start(j), width(k), width(j)).squaredNorm();
                return total;
            }

            CMatrix gradient(const CMatrix &theta) const
            {
                const Index n = theta.rows();
                if (users < 2)
                    return CMatrix::Zero(n, n);
                const CMatrix e = (f * theta) * l;
                CMatrix w = e.adjoint() * e;
                for (int k = 0; k < users; ++k)
                    w.block(start(k), start(k), width(k), width(k)).setZero();
                return 2.0 * (f.adjoint() * (e * w)) * l.adjoint();
            }
        };
    }

    RisMatrix retract(const RisMatrix &theta, const CMatrix &direction, double step, bool safeguard)
    {
        if (step < 0.0)
            throw ModelError("retract: step must be non-negative");
        if (step == 0.0)
            return theta;
        return Retraction(theta, direction).at(step, safeguard);
    }

    Objective make_objective(const CostContext &ctx)
    {
        ctx.validate();
        auto factored = std::make_shared<const FactoredCost>(ctx);
        return {[factored](const CMatrix &t) { return factored->cost(t); },
                [factored](const CMatrix &t) { return factored->gradient(t); }};
    }

    // ---------- Line search ----------

    LineSearchResult backtracking_step(const RisMatrix &theta, double current_cost, const CMatrix &euclidean_grad,
                                       const CMatrix &direction, const Objective &objective,
                                       const ArmijoSettings &armijo, bool safeguard)
    {
        LineSearchResult out;
        out.theta = theta;
        out.cost = current_cost;

        const double norm = direction.norm();
        const double slope = real_inner(euclidean_grad, direction);
        if (!(norm > 0.0) || !(slope < 0.0))
        {
            out.converged = true;
            return out;
        }

        const Retraction retraction(theta, direction);
        double step = armijo.initial_step / norm;
        for (int m = 0; m <= armijo.max_contractions; ++m, step *= armijo.contraction)
        {
            RisMatrix candidate = retraction.at(step, safeguard);
            const double f = objective.cost(candidate.theta);
            if (f <= current_cost + armijo.sufficient_decrease * step * slope)
            {
                out.step = step;
                out.theta = std::move(candidate);
                out.cost = f;
                return out;
            }
        }
        out.converged = true;
        return out;
    }

    LineSearchResult backtracking_step(const RisMatrix &theta, const CMatrix &direction, const CostContext &ctx,
                                       const ArmijoSettings &armijo, bool safeguard)
    {
        const Objective objective = make_objective(ctx);
        return backtracking_step(theta, objective.cost(theta.theta), objective.gradient(theta.theta), direction,
                                 objective, armijo, safeguard);
    }

    // ---------- Conjugate gradient ----------

    OptimizerResult minimize(const Objective &objective, const RisMatrix &initial, const OptimizerSettings &settings)
    {
        settings.validate();

        OptimizerResult result{initial, {}};
        RisMatrix &theta = result.theta;
        OptimizerTrace &trace = result.trace;

        double f = objective.cost(theta.theta);
        CMatrix egrad = objective.gradient(theta.theta);
        CMatrix z = project_tangent(theta, egrad);
        double znorm = z.norm();

        trace.cost.push_back(f);
        trace.gradient_norm.push_back(znorm);
        trace.step.push_back(0.0);
        trace.constraint_violation.push_back(theta.constraint_violation());

        if (!(znorm > 0.0))
        {
            trace.stop = StopReason::zero_gradient;
            return result;
        }
        const double tolerance = std::max(settings.gradient_tolerance, settings.relative_tolerance * znorm);

        CMatrix xi = -z;
        trace.stop = StopReason::max_iterations;
        for (int it = 0; it < settings.max_iterations; ++it)
        {
            if (!(real_inner(egrad, xi) < 0.0))
                xi = -z; // not a descent direction: restart from steepest descent

            LineSearchResult ls = backtracking_step(theta, f, egrad, xi, objective, settings.armijo,
                                                    settings.safeguard_reunitarize);
            if (ls.converged)
            {
                trace.stop = StopReason::line_search_failed;
                break;
            }

            theta = std::move(ls.theta);
            f = ls.cost;
            egrad = objective.gradient(theta.theta);
            const CMatrix z_next = project_tangent(theta, egrad);
            const double mu = polak_ribiere(z_next, z, theta);
            xi = -z_next + mu * project_tangent(theta, xi);
            z = z_next;
            znorm = z.norm();

            ++trace.iterations;
            trace.cost.push_back(f);
            trace.gradient_norm.push_back(znorm);
            trace.step.push_back(ls.step);
            trace.constraint_violation.push_back(theta.constraint_violation());

            if (znorm < tolerance)
            {
                trace.stop = StopReason::gradient_tolerance;
                break;
            }
        }
        return result;
    }

    RisMatrix random_phase_initialization(Index n, RisArchitecture arch, std::uint64_t seed)
    {
        RngStream rng(seed);
        RVector phases(n);
        for (Index i = 0; i < n; ++i)
            phases(i) = rng.uniform(0.0, 2.0 * pi);
        return RisMatrix::from_phases(phases, arch);
    }

    OptimizerResult optimize(const CostContext &ctx, RisArchitecture arch, const OptimizerSettings &settings)
    {
        ctx.validate();
        const RisMatrix init = random_phase_initialization(ctx.size(), arch, settings.seed);
        return minimize(make_objective(ctx), init, settings);
    }

    OptimizerResult optimize_diagonal(const CostContext &ctx, const OptimizerSettings &settings)
    {
        return optimize(ctx, RisArchitecture::diagonal, settings);
    }
}
