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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "svmdsn/errors.hpp"
#include "svmdsn/matrix.hpp"
#include "svmdsn/rng.hpp"

namespace svmdsn {

struct Dataset {
    Matrix features;
    std::vector<int> labels;
    int num_classes = 0;
    std::string source;
};

// Two concentric circles with Gaussian radial noise (standard deviation
// 0.1): class 1 at radius 0.5, class 0 at radius 1.0.  Samples are emitted
// class 1 first, then class 0, each in generation order.
inline Dataset generate_circle(std::size_t n_per_class, std::uint64_t seed) {
    if (n_per_class == 0)
        throw validation_error("generate_circle: need at least one sample per class");
    Dataset ds;
    ds.features = Matrix(2 * n_per_class, 2);
    ds.labels.resize(2 * n_per_class);
    ds.num_classes = 2;
    ds.source = "circle(n=" + std::to_string(n_per_class) + ")";
    Rng rng(mix_seed(seed, 0xC14C1Eu));
    constexpr double kNoiseSigma = 0.1;
    const double radii[2] = {0.5, 1.0};
    const int labels[2] = {1, 0};
    std::size_t k = 0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < n_per_class; ++i, ++k) {
            const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double radius = radii[c] + kNoiseSigma * rng.gaussian();
            ds.features.at(k, 0) = radius * std::cos(angle);
            ds.features.at(k, 1) = radius * std::sin(angle);
            ds.labels[k] = labels[c];
        }
    return ds;
}

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path,
                               const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw format_error(path + ": truncated while reading " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace detail

// IDX image/label pair (the classic MNIST container).  Pixels are scaled
// to [0, 1]; labels stay as stored.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw io_error("cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw io_error("cannot open " + labels_path);

    const std::uint32_t img_magic = detail::read_be32(img, images_path, "magic");
    if (img_magic != 0x803)
        throw format_error(images_path + ": bad image magic " + std::to_string(img_magic) +
                           " (expected 2051)");
    const std::uint32_t count = detail::read_be32(img, images_path, "count");
    const std::uint32_t rows = detail::read_be32(img, images_path, "rows");
    const std::uint32_t cols = detail::read_be32(img, images_path, "cols");
    if (count == 0) throw empty_input_error(images_path + ": zero images");
    if (rows == 0 || cols == 0)
        throw format_error(images_path + ": zero image dimensions");

    const std::uint32_t lab_magic = detail::read_be32(lab, labels_path, "magic");
    if (lab_magic != 0x801)
        throw format_error(labels_path + ": bad label magic " + std::to_string(lab_magic) +
                           " (expected 2049)");
    const std::uint32_t lab_count = detail::read_be32(lab, labels_path, "count");
    if (lab_count != count)
        throw format_error(labels_path + ": " + std::to_string(lab_count) +
                           " labels for " + std::to_string(count) + " images");

    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    Dataset ds;
    ds.features = Matrix(count, dim);
    ds.labels.resize(count);
    ds.source = images_path;
    std::vector<unsigned char> buf(dim);
    for (std::uint32_t k = 0; k < count; ++k) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim)))
            throw format_error(images_path + ": truncated at image " + std::to_string(k));
        auto row = ds.features.row(k);
        for (std::size_t i = 0; i < dim; ++i) row[i] = buf[i] / 255.0;
    }
    std::vector<unsigned char> lbuf(count);
    if (!lab.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(count)))
        throw format_error(labels_path + ": truncated label data");
    int max_label = 0;
    for (std::uint32_t k = 0; k < count; ++k) {
        ds.labels[k] = lbuf[k];
        max_label = std::max(max_label, ds.labels[k]);
    }
    ds.num_classes = std::max(2, max_label + 1);
    return ds;
}

// Sparse text format: one sample per line, "label idx:value ..." with
// ascending 1-based indices.  dim == 0 infers the dimension from the data.
// The label -1 is accepted as an alias for class 0.
inline Dataset load_libsvm(const std::string& path, std::size_t dim = 0) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);

    struct Entry {
        int label;
        std::vector<std::pair<std::size_t, double>> coords;  // 0-based
    };
    std::vector<Entry> entries;
    std::size_t max_dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        double raw_label;
        if (!(ls >> raw_label)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw format_error(path + ":" + std::to_string(lineno) + ": missing label");
        }
        if (raw_label != static_cast<long long>(raw_label))
            throw format_error(path + ":" + std::to_string(lineno) +
                               ": non-integer label");
        int label = static_cast<int>(raw_label);
        if (label == -1) label = 0;
        if (label < 0)
            throw format_error(path + ":" + std::to_string(lineno) + ": negative label");
        Entry e;
        e.label = label;
        std::string tok;
        std::size_t prev_index = 0;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw format_error(path + ":" + std::to_string(lineno) +
                                   ": expected idx:value, got '" + tok + "'");
            std::size_t index;
            double value;
            try {
                index = std::stoull(tok.substr(0, colon));
                value = std::stod(tok.substr(colon + 1));
            } catch (const std::exception&) {
                throw format_error(path + ":" + std::to_string(lineno) +
                                   ": malformed feature '" + tok + "'");
            }
            if (index < 1)
                throw format_error(path + ":" + std::to_string(lineno) +
                                   ": feature indices are 1-based");
            if (index <= prev_index)
                throw format_error(path + ":" + std::to_string(lineno) +
                                   ": feature indices must be ascending");
            if (dim != 0 && index > dim)
                throw format_error(path + ":" + std::to_string(lineno) + ": index " +
                                   std::to_string(index) + " exceeds dimension " +
                                   std::to_string(dim));
            if (!std::isfinite(value))
                throw format_error(path + ":" + std::to_string(lineno) +
                                   ": non-finite value");
            prev_index = index;
            max_dim = std::max(max_dim, index);
            e.coords.emplace_back(index - 1, value);
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw empty_input_error(path + ": no samples");
    const std::size_t d = dim != 0 ? dim : max_dim;
    if (d == 0) throw format_error(path + ": no features in any sample");

    Dataset ds;
    ds.features = Matrix(entries.size(), d);
    ds.labels.resize(entries.size());
    ds.source = path;
    int max_label = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        ds.labels[k] = entries[k].label;
        max_label = std::max(max_label, entries[k].label);
        auto row = ds.features.row(k);
        for (const auto& [idx, val] : entries[k].coords) row[idx] = val;
    }
    ds.num_classes = std::max(2, max_label + 1);
    return ds;
}

// Full-precision writer for the same format.  Exact zeros are omitted, so a
// round trip reproduces every stored double bitwise.
inline void save_libsvm(const Dataset& ds, const std::string& path) {
    if (ds.features.rows == 0) throw empty_input_error("save_libsvm: no samples");
    if (ds.features.rows != ds.labels.size())
        throw shape_error("save_libsvm: feature/label count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    char buf[64];
    for (std::size_t k = 0; k < ds.features.rows; ++k) {
        out << ds.labels[k];
        const auto row = ds.features.row(k);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] == 0.0) continue;
            std::snprintf(buf, sizeof buf, " %zu:%.17g", i + 1, row[i]);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw io_error("failed while writing " + path);
}

}  // namespace svmdsn
