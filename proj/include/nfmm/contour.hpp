// SPDX-License-Identifier: Apache-2.0
//
// nfmm - localization error bounds under near-field / wideband channel model mismatch
// Copyright (C) 2026 the nfmm authors
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

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace nfmm
{

/// Scalar field on a rectilinear grid; value(ix, iy) at (xs[ix], ys[iy]).
struct GridField
{
    std::vector<double> xs, ys;
    Eigen::MatrixXd values; // (xs.size() x ys.size())

    double at(int ix, int iy) const { return values(ix, iy); }
};

using Polyline = std::vector<Eigen::Vector2d>;

namespace detail
{
inline Eigen::Vector2d lerp_edge(double x0, double y0, double v0, double x1, double y1, double v1,
                                 double level)
{
    const double t = (v1 == v0) ? 0.5 : (level - v0) / (v1 - v0);
    return {x0 + t * (x1 - x0), y0 + t * (y1 - y0)};
}
} // namespace detail

/// Marching-squares iso-contour of `field` at `level`, with linear
/// interpolation along cell edges. Segments are chained into polylines;
/// closed loops and boundary-terminated open lines both occur. NaN cells are
/// skipped. An empty result is valid (field entirely on one side).
inline std::vector<Polyline> marching_squares(const GridField& field, double level)
{
    const int nx = static_cast<int>(field.xs.size());
    const int ny = static_cast<int>(field.ys.size());
    if (nx < 2 || ny < 2) throw std::invalid_argument("contour grid needs at least 2x2 nodes");

    // collect segments per cell
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> segments;
    for (int ix = 0; ix + 1 < nx; ++ix)
        for (int iy = 0; iy + 1 < ny; ++iy)
        {
            const double v00 = field.at(ix, iy), v10 = field.at(ix + 1, iy);
            const double v01 = field.at(ix, iy + 1), v11 = field.at(ix + 1, iy + 1);
            if (std::isnan(v00) || std::isnan(v10) || std::isnan(v01) || std::isnan(v11)) continue;
            const double x0 = field.xs[ix], x1 = field.xs[ix + 1];
            const double y0 = field.ys[iy], y1 = field.ys[iy + 1];

            int idx = 0;
            if (v00 > level) idx |= 1;
            if (v10 > level) idx |= 2;
            if (v11 > level) idx |= 4;
            if (v01 > level) idx |= 8;
            if (idx == 0 || idx == 15) continue;

            // crossing points on the four edges (bottom, right, top, left)
            auto bottom = [&] { return detail::lerp_edge(x0, y0, v00, x1, y0, v10, level); };
            auto right = [&] { return detail::lerp_edge(x1, y0, v10, x1, y1, v11, level); };
            auto top = [&] { return detail::lerp_edge(x0, y1, v01, x1, y1, v11, level); };
            auto left = [&] { return detail::lerp_edge(x0, y0, v00, x0, y1, v01, level); };

            switch (idx)
            {
            case 1: case 14: segments.emplace_back(left(), bottom()); break;
            case 2: case 13: segments.emplace_back(bottom(), right()); break;
            case 3: case 12: segments.emplace_back(left(), right()); break;
            case 4: case 11: segments.emplace_back(right(), top()); break;
            case 6: case 9:  segments.emplace_back(bottom(), top()); break;
            case 7: case 8:  segments.emplace_back(left(), top()); break;
            case 5: // saddle: resolve by cell average
            case 10:
            {
                const double mid = 0.25 * (v00 + v10 + v01 + v11);
                const bool center_above = mid > level;
                if ((idx == 5) == center_above)
                {
                    segments.emplace_back(left(), top());
                    segments.emplace_back(bottom(), right());
                }
                else
                {
                    segments.emplace_back(left(), bottom());
                    segments.emplace_back(right(), top());
                }
                break;
            }
            default: break;
            }
        }

    // chain segments into polylines by matching quantized endpoints
    auto key = [](const Eigen::Vector2d& p) {
        return std::pair<long long, long long>(std::llround(p.x() * 1e9),
                                               std::llround(p.y() * 1e9));
    };
    std::multimap<std::pair<long long, long long>, int> by_endpoint;
    for (int i = 0; i < static_cast<int>(segments.size()); ++i)
    {
        by_endpoint.emplace(key(segments[i].first), i);
        by_endpoint.emplace(key(segments[i].second), i);
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<Polyline> lines;

    auto take_next = [&](const Eigen::Vector2d& tip, int& seg_out, bool& from_first) {
        auto range = by_endpoint.equal_range(key(tip));
        for (auto it = range.first; it != range.second; ++it)
        {
            const int s = it->second;
            if (used[s]) continue;
            seg_out = s;
            from_first = key(segments[s].first) == key(tip);
            return true;
        }
        return false;
    };

    for (int i = 0; i < static_cast<int>(segments.size()); ++i)
    {
        if (used[i]) continue;
        used[i] = true;
        Polyline line{segments[i].first, segments[i].second};
        // extend forward then backward
        for (int dir = 0; dir < 2; ++dir)
        {
            for (;;)
            {
                const Eigen::Vector2d tip = dir == 0 ? line.back() : line.front();
                int s;
                bool from_first;
                if (!take_next(tip, s, from_first)) break;
                used[s] = true;
                const Eigen::Vector2d next = from_first ? segments[s].second : segments[s].first;
                if (dir == 0)
                    line.push_back(next);
                else
                    line.insert(line.begin(), next);
            }
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

/// Area of the region where the field exceeds `level`, by node counting:
/// each node above the level contributes one cell area. NaN nodes count as
/// below. Monotone in the field, which is what the area comparisons need.
inline double area_above(const GridField& field, double level)
{
    const int nx = static_cast<int>(field.xs.size());
    const int ny = static_cast<int>(field.ys.size());
    if (nx < 2 || ny < 2) return 0.0;
    const double dx = (field.xs.back() - field.xs.front()) / (nx - 1);
    const double dy = (field.ys.back() - field.ys.front()) / (ny - 1);
    int count = 0;
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy)
        {
            const double v = field.at(ix, iy);
            if (!std::isnan(v) && v > level) ++count;
        }
    return count * dx * dy;
}

} // namespace nfmm
