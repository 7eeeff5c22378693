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

// The stacked network: layers of SVM groups, every layer seeing the shaped
// outputs of all layers below alongside the raw input,
//
//     x^(l) = (y^(l-1), y^(l-2), ..., y^(0), raw).
//
// Layer 0 is the first block; the last layer is the output block, whose
// mean margins per class give the decision.  Per-plane outputs within a
// layer are flattened group-major: plane index = group * classes_per_group
// + class.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "svmdsn/errors.hpp"
#include "svmdsn/hyperplane.hpp"
#include "svmdsn/matrix.hpp"
#include "svmdsn/parallel.hpp"
#include "svmdsn/rng.hpp"

namespace svmdsn {

struct BlockSpec {
    int num_groups = 1;
    int classes_per_group = 1;
};

class Network {
public:
    Network(std::size_t raw_input_dim, int num_classes, std::vector<BlockSpec> blocks)
        : raw_dim_(raw_input_dim), num_classes_(num_classes), blocks_(std::move(blocks)) {
        if (raw_dim_ == 0) throw invariant_error("raw input dimension must be positive");
        if (num_classes_ < 2) throw invariant_error("a network needs at least two classes");
        if (blocks_.empty()) throw invariant_error("a network needs at least one block");
        for (const BlockSpec& b : blocks_) {
            if (b.num_groups < 1)
                throw invariant_error("every block needs at least one group");
            if (b.classes_per_group == 1) {
                if (num_classes_ != 2)
                    throw invariant_error(
                        "single-plane groups are only valid for binary problems");
            } else if (b.classes_per_group != num_classes_) {
                throw invariant_error(
                    "classes_per_group must be 1 (binary) or equal to num_classes");
            }
        }
        planes_.resize(blocks_.size());
        std::size_t d = raw_dim_;
        for (std::size_t l = 0; l < blocks_.size(); ++l) {
            input_dims_.push_back(d);
            planes_[l].assign(static_cast<std::size_t>(blocks_[l].num_groups),
                              std::vector<LinearHyperplane>(
                                  static_cast<std::size_t>(blocks_[l].classes_per_group),
                                  LinearHyperplane(Vector(d, 0.0), 0.0)));
            d += layer_output_dim(l);
        }
    }

    std::size_t raw_input_dim() const { return raw_dim_; }
    int num_classes() const { return num_classes_; }
    std::size_t num_layers() const { return blocks_.size(); }
    const std::vector<BlockSpec>& blocks() const { return blocks_; }
    std::uint64_t version() const { return version_; }
    bool binary() const { return blocks_.back().classes_per_group == 1; }

    const BlockSpec& block(std::size_t layer) const {
        check_layer(layer);
        return blocks_[layer];
    }

    std::size_t layer_input_dim(std::size_t layer) const {
        check_layer(layer);
        return input_dims_[layer];
    }

    // Number of planes (= stacked outputs) a layer produces.
    std::size_t layer_output_dim(std::size_t layer) const {
        check_layer(layer);
        return static_cast<std::size_t>(blocks_[layer].num_groups) *
               static_cast<std::size_t>(blocks_[layer].classes_per_group);
    }

    const LinearHyperplane& svm(std::size_t layer, std::size_t group,
                                std::size_t index) const {
        check_plane(layer, group, index);
        return planes_[layer][group][index];
    }

    void set_svm(std::size_t layer, std::size_t group, std::size_t index,
                 LinearHyperplane h) {
        check_plane(layer, group, index);
        if (h.dim() != input_dims_[layer])
            throw invariant_error("hyperplane for layer " + std::to_string(layer) +
                                  " must have dimension " +
                                  std::to_string(input_dims_[layer]) + ", got " +
                                  std::to_string(h.dim()));
        planes_[layer][group][index] = std::move(h);
        ++version_;
    }

    // Small uniform weights, scaled by fan-in; biases zero.  Block training
    // overwrites these; random initialization exists so fine-tuning can be
    // exercised standalone.
    void init_random(std::uint64_t seed) {
        for (std::size_t l = 0; l < blocks_.size(); ++l) {
            const double r = 1.0 / std::sqrt(static_cast<double>(input_dims_[l]));
            for (std::size_t g = 0; g < planes_[l].size(); ++g) {
                Rng rng(mix_seed(seed, 0x1217u, l * 1024 + g));
                for (auto& plane : planes_[l][g]) {
                    Vector w(input_dims_[l]);
                    for (double& x : w) x = rng.uniform(-r, r);
                    plane = LinearHyperplane(std::move(w), 0.0);
                }
            }
        }
        ++version_;
    }

private:
    void check_layer(std::size_t layer) const {
        if (layer >= blocks_.size())
            throw index_error("layer " + std::to_string(layer) + " out of range [0, " +
                              std::to_string(blocks_.size()) + ")");
    }
    void check_plane(std::size_t layer, std::size_t group, std::size_t index) const {
        check_layer(layer);
        if (group >= planes_[layer].size())
            throw index_error("group " + std::to_string(group) + " out of range");
        if (index >= planes_[layer][group].size())
            throw index_error("plane index " + std::to_string(index) + " out of range");
    }

    std::size_t raw_dim_;
    int num_classes_;
    std::vector<BlockSpec> blocks_;
    std::vector<std::size_t> input_dims_;
    std::vector<std::vector<std::vector<LinearHyperplane>>> planes_;
    std::uint64_t version_ = 0;
};

// Per-layer activations of one sample.  z holds raw margins, y = shape(z);
// input is the assembled x^(l).
struct LayerTrace {
    Vector input;
    Vector z;
    Vector y;
};

struct ForwardTrace {
    std::uint64_t network_version = 0;
    std::vector<LayerTrace> layers;
};

// The input a given layer sees: newest outputs first, raw input last.
// Layer 0 sees the raw input unchanged.
inline Vector assemble_input(const ForwardTrace& trace, std::size_t layer,
                             std::span<const double> raw) {
    if (layer > trace.layers.size())
        throw index_error("assemble_input: layer " + std::to_string(layer) +
                          " beyond traced layers");
    Vector x;
    std::size_t total = raw.size();
    for (std::size_t m = 0; m < layer; ++m) total += trace.layers[m].y.size();
    x.reserve(total);
    for (std::size_t m = layer; m-- > 0;)
        x.insert(x.end(), trace.layers[m].y.begin(), trace.layers[m].y.end());
    x.insert(x.end(), raw.begin(), raw.end());
    return x;
}

inline ForwardTrace forward(const Network& net, std::span<const double> raw) {
    if (raw.size() != net.raw_input_dim())
        throw shape_error("forward: raw input has dimension " +
                          std::to_string(raw.size()) + ", network expects " +
                          std::to_string(net.raw_input_dim()));
    if (!all_finite(raw)) throw validation_error("forward: non-finite raw input");
    ForwardTrace trace;
    trace.network_version = net.version();
    trace.layers.resize(net.num_layers());
    Vector x(raw.begin(), raw.end());
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        LayerTrace& lt = trace.layers[l];
        lt.input = x;
        const BlockSpec& spec = net.block(l);
        lt.z.reserve(net.layer_output_dim(l));
        lt.y.reserve(net.layer_output_dim(l));
        for (int g = 0; g < spec.num_groups; ++g)
            for (int i = 0; i < spec.classes_per_group; ++i) {
                const double z = net.svm(l, g, i).margin(lt.input);
                lt.z.push_back(z);
                lt.y.push_back(shape(z));
            }
        if (l + 1 < net.num_layers()) {
            Vector next;
            next.reserve(lt.y.size() + x.size());
            next.insert(next.end(), lt.y.begin(), lt.y.end());
            next.insert(next.end(), x.begin(), x.end());
            x = std::move(next);
        }
    }
    return trace;
}

// Per-class scores: the mean raw output-layer margin across output groups.
// Binary networks produce a single score for class 1.
inline Vector class_scores(const Network& net, const ForwardTrace& trace) {
    if (trace.layers.size() != net.num_layers())
        throw state_error("class_scores: trace does not match the network depth");
    const LayerTrace& out = trace.layers.back();
    const BlockSpec& spec = net.blocks().back();
    const std::size_t cpg = static_cast<std::size_t>(spec.classes_per_group);
    Vector scores(cpg, 0.0);
    for (int g = 0; g < spec.num_groups; ++g)
        for (std::size_t i = 0; i < cpg; ++i) scores[i] += out.z[g * cpg + i];
    for (double& s : scores) s /= spec.num_groups;
    return scores;
}

inline int predict_from_trace(const Network& net, const ForwardTrace& trace) {
    const Vector scores = class_scores(net, trace);
    if (net.binary()) return scores[0] >= 0.0 ? 1 : 0;
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;  // ties keep the lowest class
    return static_cast<int>(best);
}

inline int predict(const Network& net, std::span<const double> raw) {
    return predict_from_trace(net, forward(net, raw));
}

inline std::vector<ForwardTrace> forward_batch(const Network& net, const Matrix& raws,
                                               unsigned threads = 0) {
    if (raws.cols != net.raw_input_dim())
        throw shape_error("forward_batch: feature dimension mismatch");
    std::vector<ForwardTrace> traces(raws.rows);
    parallel_for(raws.rows, threads,
                 [&](std::size_t k) { traces[k] = forward(net, raws.row(k)); });
    return traces;
}

// Fraction of strictly saturated margins (|z| > 1) in one layer, over a
// batch of traces.
inline double saturation_rate(const Network& net, std::span<const ForwardTrace> traces,
                              std::size_t layer) {
    if (layer >= net.num_layers()) throw index_error("saturation_rate: bad layer");
    if (traces.empty()) throw empty_input_error("saturation_rate: no traces");
    std::size_t saturated = 0, total = 0;
    for (const ForwardTrace& t : traces) {
        if (t.network_version != net.version())
            throw state_error("saturation_rate: stale trace (network has changed)");
        for (double z : t.layers[layer].z) {
            saturated += std::abs(z) > 1.0 ? 1 : 0;
            ++total;
        }
    }
    return static_cast<double>(saturated) / static_cast<double>(total);
}

struct EvalResult {
    double error_rate = 0.0;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    std::vector<double> saturation;                   // per layer
};

inline EvalResult evaluate(const Network& net, const Matrix& features,
                           std::span<const int> labels, unsigned threads = 0) {
    if (features.rows != labels.size())
        throw shape_error("evaluate: feature/label count mismatch");
    if (features.rows == 0) throw empty_input_error("evaluate: no samples");
    const auto traces = forward_batch(net, features, threads);
    EvalResult res;
    const std::size_t ncls = static_cast<std::size_t>(net.num_classes());
    res.confusion.assign(ncls, std::vector<std::size_t>(ncls, 0));
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const int pred = predict_from_trace(net, traces[k]);
        const int truth = labels[k];
        if (truth < 0 || truth >= net.num_classes())
            throw validation_error("evaluate: label outside the class range");
        res.confusion[truth][pred] += 1;
        wrong += pred != truth ? 1 : 0;
    }
    res.error_rate = static_cast<double>(wrong) / static_cast<double>(traces.size());
    for (std::size_t l = 0; l < net.num_layers(); ++l)
        res.saturation.push_back(saturation_rate(net, traces, l));
    return res;
}

}  // namespace svmdsn
