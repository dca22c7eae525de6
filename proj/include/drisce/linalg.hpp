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

#ifndef DRISCE_LINALG_HPP
#define DRISCE_LINALG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace drisce
{
    using cplx = std::complex<double>;
    using CMat = Eigen::MatrixXcd;
    using CVec = Eigen::VectorXcd;
    using RMat = Eigen::MatrixXd;
    using RVec = Eigen::VectorXd;
    using Rng = std::mt19937_64;

    inline constexpr double pi = std::numbers::pi;

    // Thrown for malformed inputs (dimension mismatch, invalid ranges, missing prerequisites)
    class invalid_input : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, 0.1 * db); }
    inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

    // Thermal noise power in mW: -174 dBm/Hz + 10 log10(B) + NF
    inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db)
    {
        return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    }

    // Circularly-symmetric complex normal sample with the given variance
    inline cplx complex_normal(Rng &rng, double variance = 1.0)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
        const double re = nd(rng);
        const double im = nd(rng);
        return {re, im};
    }

    inline CMat complex_normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance = 1.0)
    {
        CMat out(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                out(r, c) = complex_normal(rng, variance);
        return out;
    }

    // SplitMix64 finalizer; used to derive independent seeds from tuples
    inline std::uint64_t mix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value)
    {
        return mix64(seed ^ mix64(value));
    }

    // Least-squares solution of min ||A X - B||_F; rank-deficient A falls back to the minimum-norm solution
    inline CMat least_squares(const CMat &A, const CMat &B)
    {
        if (A.rows() != B.rows())
            throw invalid_input("least_squares: row mismatch");
        if (A.cols() == 0)
            return CMat::Zero(0, B.cols());
        Eigen::CompleteOrthogonalDecomposition<CMat> cod(A);
        return cod.solve(B);
    }

    // vec() in column-major order
    inline CVec vec(const CMat &M)
    {
        return Eigen::Map<const CVec>(M.data(), M.size());
    }

    inline CMat unvec(const CVec &v, Eigen::Index rows, Eigen::Index cols)
    {
        if (v.size() != rows * cols)
            throw invalid_input("unvec: size mismatch");
        return Eigen::Map<const CMat>(v.data(), rows, cols);
    }

    inline RMat abs2(const CMat &M) { return M.cwiseAbs2(); }

    // Stack blocks vertically; all blocks must share a column count
    CMat vstack(const std::vector<CMat> &blocks);
    // Stack blocks horizontally; all blocks must share a row count
    CMat hstack(const std::vector<CMat> &blocks);

} // namespace drisce

#endif
