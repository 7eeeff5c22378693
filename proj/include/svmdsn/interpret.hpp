// Copyright 2026 The svmdsn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Interpretability helpers: per-layer confidence maps over 2-d inputs and
// support-vector listings for individual planes.
//
// Confidence of one plane at x is min(1, |w.x + b|); a layer's confidence is
// the average over its planes.  Low-confidence bands trace the region where
// a layer's planes sit near their decision boundaries.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "svmdsn/errors.hpp"
#include "svmdsn/matrix.hpp"
#include "svmdsn/network.hpp"
#include "svmdsn/parallel.hpp"
#include "svmdsn/solver.hpp"

namespace svmdsn {

// Mean confidence of layer `layer`'s planes at the raw input x.
inline double average_confidence(const Network& net, std::size_t layer,
                                 std::span<const double> raw) {
    if (layer >= net.num_layers())
        throw index_error("average_confidence: layer " + std::to_string(layer) +
                          " out of range");
    const ForwardTrace trace = forward(net, raw);
    const Vector& z = trace.layers[layer].z;
    double sum = 0.0;
    for (double v : z) sum += confidence(v);
    return sum / static_cast<double>(z.size());
}

struct MapBounds {
    double x_min = -2.0, y_min = -2.0, x_max = 2.0, y_max = 2.0;
};

// Grids of per-layer average confidence.  Rows index y ascending (row 0 at
// y_min); the writers flip to image orientation.  Grid coordinates are
//     x_j = x_min + j * (x_max - x_min) / (resolution - 1),
// so doubling to resolution 2r-1 keeps every old coordinate bitwise intact.
struct ConfidenceMap {
    MapBounds bounds;
    std::size_t resolution = 0;
    std::vector<Matrix> layers;
};

inline ConfidenceMap confidence_map(const Network& net, const MapBounds& bounds,
                                    std::size_t resolution, unsigned threads = 0) {
    if (net.raw_input_dim() != 2)
        throw dimension_error("confidence maps require a 2-d raw input, network has " +
                              std::to_string(net.raw_input_dim()));
    if (resolution < 2) throw config_error("confidence_map: resolution must be >= 2");
    if (!(bounds.x_min < bounds.x_max) || !(bounds.y_min < bounds.y_max))
        throw config_error("confidence_map: bounds must span a positive area");

    ConfidenceMap map;
    map.bounds = bounds;
    map.resolution = resolution;
    for (std::size_t l = 0; l < net.num_layers(); ++l)
        map.layers.emplace_back(resolution, resolution);

    const double sx = bounds.x_max - bounds.x_min;
    const double sy = bounds.y_max - bounds.y_min;
    const double div = static_cast<double>(resolution - 1);
    parallel_for(resolution * resolution, threads, [&](std::size_t cell) {
        const std::size_t r = cell / resolution;  // y index
        const std::size_t c = cell % resolution;  // x index
        const double xy[2] = {bounds.x_min + (static_cast<double>(c) * sx) / div,
                              bounds.y_min + (static_cast<double>(r) * sy) / div};
        const ForwardTrace trace = forward(net, xy);
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            const Vector& z = trace.layers[l].z;
            double sum = 0.0;
            for (double v : z) sum += confidence(v);
            map.layers[l].at(r, c) = sum / static_cast<double>(z.size());
        }
    });
    return map;
}

// CSV grid, top row at y_max, full precision.
inline void write_map_csv(const ConfidenceMap& map, std::size_t layer,
                          const std::string& path) {
    if (layer >= map.layers.size()) throw index_error("write_map_csv: bad layer");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    char buf[40];
    const Matrix& grid = map.layers[layer];
    for (std::size_t r = grid.rows; r-- > 0;) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", grid.at(r, c));
            out << buf << (c + 1 < grid.cols ? "," : "");
        }
        out << '\n';
    }
    if (!out) throw io_error("failed while writing " + path);
}

// Plain (ASCII) PGM, 256 gray levels, top row at y_max.
inline void write_map_pgm(const ConfidenceMap& map, std::size_t layer,
                          const std::string& path) {
    if (layer >= map.layers.size()) throw index_error("write_map_pgm: bad layer");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    const Matrix& grid = map.layers[layer];
    out << "P2\n" << grid.cols << ' ' << grid.rows << "\n255\n";
    for (std::size_t r = grid.rows; r-- > 0;) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const int px = static_cast<int>(std::lround(grid.at(r, c) * 255.0));
            out << px << (c + 1 < grid.cols ? " " : "");
        }
        out << '\n';
    }
    if (!out) throw io_error("failed while writing " + path);
}

// Indices of the samples that the trained plane pivots on: hinge samples at
// or inside the margin, tube samples at or outside the tube boundary.
inline std::vector<std::uint32_t> support_vectors(const LinearHyperplane& h,
                                                  std::span<const VirtualSample> samples,
                                                  double epsilon, double tol = 1e-6) {
    validate_virtual_samples(samples);
    if (!(tol >= 0.0)) throw validation_error("support_vectors: tol must be >= 0");
    if (!(epsilon >= 0.0)) throw validation_error("support_vectors: epsilon must be >= 0");
    std::vector<std::uint32_t> out;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double u = h.margin(samples[k].input);
        if (samples[k].in_theta) {
            if (samples[k].virtual_label * u <= 1.0 + tol)
                out.push_back(static_cast<std::uint32_t>(k));
        } else {
            if (std::abs(u - samples[k].virtual_label) >= epsilon - tol)
                out.push_back(static_cast<std::uint32_t>(k));
        }
    }
    return out;
}

}  // namespace svmdsn
