// SPDX-License-Identifier: Apache-2.0
//
// drisce - two-timescale channel estimation for active double-RIS systems
// Copyright (C) 2026 The drisce authors
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

#include "drisce/linear_operator.hpp"

namespace drisce
{
    CMat LinearOperator::columns(const std::vector<int> &idx) const
    {
        CMat out(rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k)
            out.col(static_cast<Eigen::Index>(k)) = column(idx[k]);
        return out;
    }

    DenseOperator::DenseOperator(CMat phi) : phi_(std::move(phi)), abs2_(phi_.cwiseAbs2()) {}

    KroneckerOperator::KroneckerOperator(CMat phi1, CMat phi2)
        : phi1_(std::move(phi1)), phi2_(std::move(phi2)), abs1_(phi1_.cwiseAbs2()), abs2_(phi2_.cwiseAbs2())
    {
    }

    namespace
    {
        void require_vector(const CMat &X, Eigen::Index n, const char *what)
        {
            if (X.cols() != 1 || X.rows() != n)
                throw invalid_input(std::string("KroneckerOperator::") + what + ": expected a single vector");
        }
    } // namespace

    CMat KroneckerOperator::apply(const CMat &X) const
    {
        require_vector(X, cols(), "apply");
        const CMat D = Eigen::Map<const CMat>(X.data(), phi1_.cols(), phi2_.cols());
        const CMat Y = phi1_ * D * phi2_.adjoint();
        return Eigen::Map<const CVec>(Y.data(), Y.size());
    }

    CMat KroneckerOperator::adjoint(const CMat &S) const
    {
        require_vector(S, rows(), "adjoint");
        const CMat M = Eigen::Map<const CMat>(S.data(), phi1_.rows(), phi2_.rows());
        const CMat Z = phi1_.adjoint() * M * phi2_;
        return Eigen::Map<const CVec>(Z.data(), Z.size());
    }

    RMat KroneckerOperator::apply_abs2(const RMat &X) const
    {
        if (X.cols() != 1 || X.rows() != cols())
            throw invalid_input("KroneckerOperator::apply_abs2: expected a single vector");
        const RMat D = Eigen::Map<const RMat>(X.data(), phi1_.cols(), phi2_.cols());
        const RMat Y = abs1_ * D * abs2_.transpose();
        return Eigen::Map<const RVec>(Y.data(), Y.size());
    }

    RMat KroneckerOperator::adjoint_abs2(const RMat &S) const
    {
        if (S.cols() != 1 || S.rows() != rows())
            throw invalid_input("KroneckerOperator::adjoint_abs2: expected a single vector");
        const RMat M = Eigen::Map<const RMat>(S.data(), phi1_.rows(), phi2_.rows());
        const RMat Z = abs1_.transpose() * M * abs2_;
        return Eigen::Map<const RVec>(Z.data(), Z.size());
    }

    CVec KroneckerOperator::column(Eigen::Index g) const
    {
        const Eigen::Index g1 = g % phi1_.cols();
        const Eigen::Index g2 = g / phi1_.cols();
        const CMat outer = phi1_.col(g1) * phi2_.col(g2).adjoint();
        return Eigen::Map<const CVec>(outer.data(), outer.size());
    }

    RVec KroneckerOperator::column_norms() const
    {
        const RVec n1 = phi1_.colwise().norm().transpose();
        const RVec n2 = phi2_.colwise().norm().transpose();
        RVec out(cols());
        for (Eigen::Index g2 = 0; g2 < phi2_.cols(); ++g2)
            out.segment(g2 * phi1_.cols(), phi1_.cols()) = n1 * n2[g2];
        return out;
    }

    CMat KroneckerOperator::materialize(Eigen::Index max_atoms, std::size_t max_bytes) const
    {
        const std::size_t bytes = static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols()) * sizeof(cplx);
        if (cols() > max_atoms || bytes > max_bytes)
            throw invalid_input("KroneckerOperator::materialize: " + std::to_string(cols()) + " atoms, " +
                                std::to_string(bytes) + " bytes exceeds the explicit-mode limit; use the implicit operator");
        CMat out(rows(), cols());
        for (Eigen::Index g = 0; g < cols(); ++g)
            out.col(g) = column(g);
        return out;
    }

    ScaledOperator::ScaledOperator(const LinearOperator &base, RVec scale) : base_(base)
    {
        if (scale.size() != base.cols())
            throw invalid_input("ScaledOperator: scale length must equal the atom count");
        inv_ = scale.cwiseInverse();
        inv2_ = inv_.cwiseAbs2();
    }

    CMat ScaledOperator::apply(const CMat &X) const { return base_.apply(inv_.asDiagonal() * X); }
    CMat ScaledOperator::adjoint(const CMat &S) const { return inv_.asDiagonal() * base_.adjoint(S); }
    RMat ScaledOperator::apply_abs2(const RMat &X) const { return base_.apply_abs2(inv2_.asDiagonal() * X); }
    RMat ScaledOperator::adjoint_abs2(const RMat &S) const { return inv2_.asDiagonal() * base_.adjoint_abs2(S); }

} // namespace drisce
