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

#ifndef DRISCE_DICTIONARY_HPP
#define DRISCE_DICTIONARY_HPP

#include "drisce/geometry_channel.hpp"

#include <optional>
#include <utility>

namespace drisce
{
    // Per-axis grid sizes plus an optional LoS anchor (x_ele, x_azi) in spatial-frequency units
    struct GridSpec
    {
        int g_z = 1;
        int g_y = 1;
        std::optional<std::pair<double, double>> los_anchor;

        int size() const { return g_z * g_y; }
        void validate() const;
    };

    // Square split of G into g_z * g_y, nearest factorization when G is not a perfect square
    std::pair<int, int> square_split(int G);

    // {-1 + 2g/G}
    RVec uniform_grid(int G);
    // {wrap(anchor + 2g/G)}, anchor is point 0
    RVec los_aided_grid(int G, double anchor);

    struct Dictionary
    {
        UpaGeometry geom;
        CMat atoms; // N x G
        RVec x1;    // z-axis spatial frequency per atom
        RVec x2;    // y-axis spatial frequency per atom
        std::optional<int> anchor_atom;

        int size() const { return static_cast<int>(atoms.cols()); }
    };

    // Atom index g_z' * g_y + g_y'
    Dictionary build_dictionary(const UpaGeometry &geom, const GridSpec &spec);

    // Spatial frequencies of a direction as seen by geom
    std::pair<double, double> spatial_frequencies(const UpaGeometry &geom, const Direction &dir);

} // namespace drisce

#endif
