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

#include "drisce/dictionary.hpp"

namespace drisce
{
    void GridSpec::validate() const
    {
        if (g_z < 1 || g_y < 1)
            throw invalid_input("GridSpec: g_z and g_y must be positive");
        if (los_anchor)
        {
            for (double a : {los_anchor->first, los_anchor->second})
                if (!(a > -1.0 && a <= 1.0))
                    throw invalid_input("GridSpec: anchor components must lie in (-1, 1]");
        }
    }

    std::pair<int, int> square_split(int G)
    {
        if (G < 1)
            throw invalid_input("square_split: G must be positive");
        int a = static_cast<int>(std::floor(std::sqrt(static_cast<double>(G))));
        while (a > 1 && G % a != 0)
            --a;
        return {a, G / a};
    }

    RVec uniform_grid(int G)
    {
        if (G < 1)
            throw invalid_input("uniform_grid: G must be positive");
        RVec out(G);
        for (int g = 0; g < G; ++g)
            out[g] = -1.0 + 2.0 * g / G;
        return out;
    }

    RVec los_aided_grid(int G, double anchor)
    {
        if (G < 1)
            throw invalid_input("los_aided_grid: G must be positive");
        if (!(anchor > -1.0 && anchor <= 1.0))
            throw invalid_input("los_aided_grid: anchor must lie in (-1, 1]");
        RVec out(G);
        for (int g = 0; g < G; ++g)
        {
            double v = anchor + 2.0 * g / G;
            if (v > 1.0)
                v -= 2.0;
            out[g] = v;
        }
        return out;
    }

    Dictionary build_dictionary(const UpaGeometry &geom, const GridSpec &spec)
    {
        geom.validate();
        spec.validate();
        const RVec gz = spec.los_anchor ? los_aided_grid(spec.g_z, spec.los_anchor->first) : uniform_grid(spec.g_z);
        const RVec gy = spec.los_anchor ? los_aided_grid(spec.g_y, spec.los_anchor->second) : uniform_grid(spec.g_y);

        Dictionary d;
        d.geom = geom;
        d.atoms.resize(geom.size(), spec.size());
        d.x1.resize(spec.size());
        d.x2.resize(spec.size());
        for (int iz = 0; iz < spec.g_z; ++iz)
            for (int iy = 0; iy < spec.g_y; ++iy)
            {
                const int g = iz * spec.g_y + iy;
                d.x1[g] = gz[iz];
                d.x2[g] = gy[iy];
                d.atoms.col(g) = steering_vector(geom, gz[iz], gy[iy]);
            }
        if (spec.los_anchor)
            d.anchor_atom = 0;
        return d;
    }

    std::pair<double, double> spatial_frequencies(const UpaGeometry &geom, const Direction &dir)
    {
        const double k = 2.0 * geom.spacing_over_wavelength;
        return {k * dir.comp_ele(), k * dir.comp_azi()};
    }

} // namespace drisce
