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

#ifndef DRISCE_LINEAR_OPERATOR_HPP
#define DRISCE_LINEAR_OPERATOR_HPP

#include "drisce/linalg.hpp"

#include <memory>

namespace drisce
{
    // Sensing operator Phi: C^G -> C^M applied column-wise to G x R blocks
    class LinearOperator
    {
    public:
        virtual ~LinearOperator() = default;

        virtual Eigen::Index rows() const = 0;
        virtual Eigen::Index cols() const = 0;

        virtual CMat apply(const CMat &X) const = 0;        // Phi X
        virtual CMat adjoint(const CMat &S) const = 0;      // Phi^H S
        virtual RMat apply_abs2(const RMat &X) const = 0;   // |Phi|^2 X
        virtual RMat adjoint_abs2(const RMat &S) const = 0; // |Phi|^2^T S
        virtual CVec column(Eigen::Index g) const = 0;
        virtual RVec column_norms() const = 0;

        CMat columns(const std::vector<int> &idx) const;
    };

    class DenseOperator final : public LinearOperator
    {
    public:
        explicit DenseOperator(CMat phi);

        Eigen::Index rows() const override { return phi_.rows(); }
        Eigen::Index cols() const override { return phi_.cols(); }
        CMat apply(const CMat &X) const override { return phi_ * X; }
        CMat adjoint(const CMat &S) const override { return phi_.adjoint() * S; }
        RMat apply_abs2(const RMat &X) const override { return abs2_ * X; }
        RMat adjoint_abs2(const RMat &S) const override { return abs2_.transpose() * S; }
        CVec column(Eigen::Index g) const override { return phi_.col(g); }
        RVec column_norms() const override { return phi_.colwise().norm().transpose(); }

        const CMat &matrix() const { return phi_; }

    private:
        CMat phi_;
        RMat abs2_;
    };

    // vec(Phi1 Delta Phi2^H) = (conj(Phi2) kron Phi1) vec(Delta), applied without forming the product.
    // Works on single vectors (R = 1) of length G1 G2.
    class KroneckerOperator final : public LinearOperator
    {
    public:
        KroneckerOperator(CMat phi1, CMat phi2);

        Eigen::Index rows() const override { return phi1_.rows() * phi2_.rows(); }
        Eigen::Index cols() const override { return phi1_.cols() * phi2_.cols(); }
        CMat apply(const CMat &X) const override;
        CMat adjoint(const CMat &S) const override;
        RMat apply_abs2(const RMat &X) const override;
        RMat adjoint_abs2(const RMat &S) const override;
        CVec column(Eigen::Index g) const override;
        RVec column_norms() const override;

        // Dense conj(Phi2) kron Phi1; refused above the atom or memory limits
        CMat materialize(Eigen::Index max_atoms = 4096, std::size_t max_bytes = std::size_t(1) << 30) const;

    private:
        CMat phi1_, phi2_;
        RMat abs1_, abs2_;
    };

    // Phi diag(1 / scale)
    class ScaledOperator final : public LinearOperator
    {
    public:
        ScaledOperator(const LinearOperator &base, RVec scale);

        Eigen::Index rows() const override { return base_.rows(); }
        Eigen::Index cols() const override { return base_.cols(); }
        CMat apply(const CMat &X) const override;
        CMat adjoint(const CMat &S) const override;
        RMat apply_abs2(const RMat &X) const override;
        RMat adjoint_abs2(const RMat &S) const override;
        CVec column(Eigen::Index g) const override { return base_.column(g) * inv_[g]; }
        RVec column_norms() const override { return base_.column_norms().cwiseProduct(inv_); }

    private:
        const LinearOperator &base_;
        RVec inv_;
        RVec inv2_;
    };

} // namespace drisce

#endif
