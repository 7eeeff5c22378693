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

// The two training phases.
//
// Block training builds the stack bottom-up: every group draws a bootstrap
// resample of the full training set and fits its one-vs-rest planes on the
// layer's assembled input, then the layer's shaped outputs are prepended to
// form the next layer's input.
//
// Layered tuning (the fine-tuning phase) walks the stack top-down once per
// mini-batch.  For each middle layer it forms virtual labels
//
//     vl = shape(y - eta * dJ/dy)
//
// from the gradient of the output objective with respect to that layer's
// outputs -- computed with the batch's cached activations and the current
// (already retrained) upper-layer weights -- and then retrains the layer's
// planes exactly on the mixed objective: hinge terms where the virtual
// label saturated to +/-1, epsilon-insensitive regression elsewhere.  The
// output layer itself is retrained on the true labels.  Every step is a
// convex solve; the learning rate only enters through the virtual labels.
//
// Gradient convention: GradientTable stores dJ/dy for middle layers.  For
// the output layer it stores the recursion seed, the hinge subgradient with
// respect to the raw output margin z (zero at the hinge kink).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "svmdsn/dataset.hpp"
#include "svmdsn/errors.hpp"
#include "svmdsn/gram.hpp"
#include "svmdsn/matrix.hpp"
#include "svmdsn/network.hpp"
#include "svmdsn/parallel.hpp"
#include "svmdsn/rng.hpp"
#include "svmdsn/solver.hpp"

namespace svmdsn {

struct BltConfig {
    double learning_rate = 0.0005;
    std::size_t batch_size = 0;  // 0 = one batch covering the whole set
    int max_epochs = 50;
    int convergence_window = 5;
    double convergence_delta = 1e-5;
    SolverConfig solver;
    std::uint64_t seed = 42;
    unsigned threads = 0;    // 0 = resolve from environment
    bool bootstrap = true;   // identity resampling when false (test hook)

    void validate() const {
        solver.validate();
        if (!(learning_rate > 0.0)) throw config_error("learning_rate must be positive");
        if (max_epochs < 0) throw config_error("max_epochs must be non-negative");
        if (convergence_window < 1)
            throw config_error("convergence_window must be at least 1");
        if (!(convergence_delta >= 0.0))
            throw config_error("convergence_delta must be non-negative");
    }
};

// dJ/dy per sample and plane; see the convention note at the top.
struct GradientTable {
    std::uint64_t network_version = 0;
    std::vector<Matrix> layers;
};

// Virtual labels for one middle layer, flattened like the layer outputs.
struct VirtualLabels {
    Matrix labels;            // n x planes, values in [-1, 1]
    std::vector<char> theta;  // 1 where |label| == 1
};

namespace detail {

// +/-1 target the plane with class index `plane_class` assigns to `label`.
inline double plane_target(int label, int plane_class, bool binary) {
    if (binary) return label == 1 ? +1.0 : -1.0;
    return label == plane_class ? +1.0 : -1.0;
}

// Hinge subgradient of the output objective with respect to the output
// margins (the gradient recursion seed).  Zero at the kink.
inline Matrix output_margin_gradients(const Network& net, const Matrix& z_out,
                                      std::span<const int> labels, double c_hinge) {
    const BlockSpec& spec = net.blocks().back();
    const int cpg = spec.classes_per_group;
    Matrix mg(z_out.rows, z_out.cols);
    for (std::size_t s = 0; s < z_out.rows; ++s)
        for (std::size_t j = 0; j < z_out.cols; ++j) {
            const int plane_class = static_cast<int>(j) % cpg;
            const double t = plane_target(labels[s], plane_class, net.binary());
            const double z = z_out.at(s, j);
            mg.at(s, j) = t * z < 1.0 ? -c_hinge * t : 0.0;
        }
    return mg;
}

// Sum of mg[m] pushed down through the weight slices that read layer
// `layer`'s outputs, for every layer m above it.  mg must hold margin-space
// gradients for all layers in (layer, L).
inline Matrix accumulate_from_above(const Network& net, const std::vector<Matrix>& mg,
                                    std::size_t layer, std::size_t n) {
    const std::size_t L = net.num_layers();
    const std::size_t out_l = net.layer_output_dim(layer);
    Matrix grad(n, out_l);
    for (std::size_t m = layer + 1; m < L; ++m) {
        // Offset of layer `layer`'s block inside x^(m) = (y^(m-1),...,y^(0),raw).
        std::size_t off = 0;
        for (std::size_t t = layer + 1; t < m; ++t) off += net.layer_output_dim(t);
        const BlockSpec& spec = net.block(m);
        const int cpg = spec.classes_per_group;
        for (std::size_t j = 0; j < net.layer_output_dim(m); ++j) {
            const LinearHyperplane& plane =
                net.svm(m, j / cpg, j % cpg);
            for (std::size_t s = 0; s < n; ++s) {
                const double g = mg[m].at(s, j);
                if (g == 0.0) continue;
                for (std::size_t i = 0; i < out_l; ++i)
                    grad.at(s, i) += g * plane.weights[off + i];
            }
        }
    }
    return grad;
}

// dJ/dy for one middle layer, recomputed from the cached margins z_cache
// and the network's *current* weights.
inline Matrix layer_output_gradient(const Network& net, const std::vector<Matrix>& z_cache,
                                    std::span<const int> labels, double c_hinge,
                                    std::size_t layer) {
    const std::size_t L = net.num_layers();
    const std::size_t n = z_cache.back().rows;
    std::vector<Matrix> mg(L);
    mg[L - 1] = output_margin_gradients(net, z_cache[L - 1], labels, c_hinge);
    for (std::size_t m = L - 1; m-- > layer + 1;) {
        Matrix dJdy = accumulate_from_above(net, mg, m, n);
        mg[m] = Matrix(n, dJdy.cols);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t j = 0; j < dJdy.cols; ++j)
                mg[m].at(s, j) = dJdy.at(s, j) * shape_derivative(z_cache[m].at(s, j));
    }
    return accumulate_from_above(net, mg, layer, n);
}

// Matrix-form forward pass over a set of rows of `raw`: cached inputs,
// margins and shaped outputs per layer.  Bitwise identical to per-sample
// forward() because both run the same sequential dot products.
struct BatchTrace {
    std::uint64_t network_version = 0;
    std::vector<Matrix> inputs;
    std::vector<Matrix> z;
    std::vector<Matrix> y;
};

inline BatchTrace forward_rows(const Network& net, const Matrix& raw,
                               std::span<const std::uint32_t> rows, unsigned threads) {
    const std::size_t n = rows.empty() ? raw.rows : rows.size();
    const std::size_t L = net.num_layers();
    BatchTrace bt;
    bt.network_version = net.version();
    bt.inputs.reserve(L);
    bt.z.reserve(L);
    bt.y.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        bt.inputs.emplace_back(n, net.layer_input_dim(l));
        bt.z.emplace_back(n, net.layer_output_dim(l));
        bt.y.emplace_back(n, net.layer_output_dim(l));
    }
    parallel_for(n, threads, [&](std::size_t k) {
        const auto src = raw.row(rows.empty() ? k : rows[k]);
        std::copy(src.begin(), src.end(), bt.inputs[0].row(k).begin());
        for (std::size_t l = 0; l < L; ++l) {
            const BlockSpec& spec = net.block(l);
            const auto x = bt.inputs[l].row(k);
            auto zrow = bt.z[l].row(k);
            auto yrow = bt.y[l].row(k);
            for (int g = 0; g < spec.num_groups; ++g)
                for (int i = 0; i < spec.classes_per_group; ++i) {
                    const std::size_t j = static_cast<std::size_t>(g) * spec.classes_per_group + i;
                    const double z = net.svm(l, g, i).margin(x);
                    zrow[j] = z;
                    yrow[j] = shape(z);
                }
            if (l + 1 < L) {
                auto next = bt.inputs[l + 1].row(k);
                std::copy(yrow.begin(), yrow.end(), next.begin());
                std::copy(x.begin(), x.end(), next.begin() + yrow.size());
            }
        }
    });
    return bt;
}

}  // namespace detail

// Output objective J^(o): Eq.-.- style sum over all output planes of the
// regularizer plus c_hinge-weighted hinge losses against the true labels.
inline double output_objective(const Network& net, const Matrix& features,
                               std::span<const int> labels, const SolverConfig& cfg,
                               unsigned threads = 0) {
    if (features.rows != labels.size())
        throw shape_error("output_objective: feature/label count mismatch");
    if (features.rows == 0) throw empty_input_error("output_objective: no samples");
    detail::BatchTrace bt = detail::forward_rows(net, features, {}, threads);
    const Matrix& z = bt.z.back();
    const BlockSpec& spec = net.blocks().back();
    const int cpg = spec.classes_per_group;
    double hinge = 0.0;
    for (std::size_t s = 0; s < z.rows; ++s)
        for (std::size_t j = 0; j < z.cols; ++j) {
            const double t = detail::plane_target(labels[s], static_cast<int>(j) % cpg,
                                                  net.binary());
            hinge += std::max(0.0, 1.0 - t * z.at(s, j));
        }
    double reg = 0.0;
    for (int g = 0; g < spec.num_groups; ++g)
        for (int i = 0; i < cpg; ++i) {
            const auto& w = net.svm(net.num_layers() - 1, g, i).weights;
            reg += 0.5 * dot(w, w);
        }
    return reg + cfg.c_hinge * hinge;
}

// Gradient table for a batch of traces, computed against the network's
// current weights.  Traces taken from an older network version are refused:
// mixing them silently would corrupt the virtual labels.
inline GradientTable backprop_gradients(const Network& net,
                                        std::span<const ForwardTrace> traces,
                                        std::span<const int> labels,
                                        const SolverConfig& cfg) {
    cfg.validate();
    if (traces.empty()) throw empty_input_error("backprop_gradients: no traces");
    if (traces.size() != labels.size())
        throw shape_error("backprop_gradients: trace/label count mismatch");
    const std::size_t L = net.num_layers();
    const std::size_t n = traces.size();
    std::vector<Matrix> z_cache(L);
    for (std::size_t l = 0; l < L; ++l) z_cache[l] = Matrix(n, net.layer_output_dim(l));
    for (std::size_t s = 0; s < n; ++s) {
        if (traces[s].network_version != net.version())
            throw state_error("backprop_gradients: trace " + std::to_string(s) +
                              " is stale (network has changed since forward)");
        for (std::size_t l = 0; l < L; ++l) {
            const Vector& z = traces[s].layers[l].z;
            std::copy(z.begin(), z.end(), z_cache[l].row(s).begin());
        }
    }
    for (int lb : labels)
        if (lb < 0 || lb >= net.num_classes())
            throw validation_error("backprop_gradients: label outside class range");

    GradientTable table;
    table.network_version = net.version();
    table.layers.resize(L);
    table.layers[L - 1] =
        detail::output_margin_gradients(net, z_cache[L - 1], labels, cfg.c_hinge);
    for (std::size_t l = 0; l + 1 < L; ++l)
        table.layers[l] = detail::layer_output_gradient(net, z_cache, labels,
                                                        cfg.c_hinge, l);
    return table;
}

// Virtual labels for every middle layer: vl = shape(y - lr * dJ/dy), with
// the theta flag set exactly where the clamp saturated.
inline std::vector<VirtualLabels> make_virtual_labels(const Network& net,
                                                      std::span<const ForwardTrace> traces,
                                                      const GradientTable& grads,
                                                      double learning_rate) {
    if (!(learning_rate > 0.0))
        throw config_error("make_virtual_labels: learning rate must be positive");
    if (grads.network_version != net.version())
        throw state_error("make_virtual_labels: gradient table is stale");
    const std::size_t L = net.num_layers();
    std::vector<VirtualLabels> out;
    out.reserve(L - 1);
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const Matrix& g = grads.layers[l];
        VirtualLabels vl;
        vl.labels = Matrix(g.rows, g.cols);
        vl.theta.assign(g.rows * g.cols, 0);
        for (std::size_t s = 0; s < g.rows; ++s) {
            if (traces[s].network_version != net.version())
                throw state_error("make_virtual_labels: stale trace");
            const Vector& y = traces[s].layers[l].y;
            for (std::size_t j = 0; j < g.cols; ++j) {
                const double v = shape(y[j] - learning_rate * g.at(s, j));
                vl.labels.at(s, j) = v;
                vl.theta[s * g.cols + j] = std::abs(v) == 1.0 ? 1 : 0;
            }
        }
        out.push_back(std::move(vl));
    }
    return out;
}

// Bootstrap index provider; replaceable so tests can force identity.
using Resampler = std::function<std::vector<std::uint32_t>(
    std::size_t n, std::size_t layer, std::size_t group)>;

inline Resampler bootstrap_resampler(std::uint64_t seed) {
    return [seed](std::size_t n, std::size_t layer, std::size_t group) {
        Rng rng(mix_seed(seed, 0xB007u, layer, group));
        auto idx = rng.bootstrap(n, n);
        std::sort(idx.begin(), idx.end());
        return idx;
    };
}

inline Resampler identity_resampler() {
    return [](std::size_t n, std::size_t, std::size_t) {
        std::vector<std::uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        return idx;
    };
}

struct BlockLayerRecord {
    std::size_t layer = 0;  // 0-based
    std::size_t planes = 0;
    long solver_iterations = 0;
    double seconds = 0.0;  // wall clock; not part of the deterministic stream
};
using BlockSink = std::function<void(const BlockLayerRecord&)>;

// Bottom-up block training.  Returns the trained network; the input network
// only provides the architecture.
[[nodiscard]] inline Network block_train(Network net, const Dataset& data,
                                         const BltConfig& cfg, BlockSink sink = {}) {
    cfg.validate();
    if (data.features.rows == 0) throw empty_input_error("block_train: no samples");
    if (data.features.rows != data.labels.size())
        throw shape_error("block_train: feature/label count mismatch");
    if (data.features.cols != net.raw_input_dim())
        throw shape_error("block_train: dataset dimension does not match the network");
    for (int lb : data.labels)
        if (lb < 0 || lb >= net.num_classes())
            throw validation_error("block_train: label outside class range");

    const std::size_t n = data.features.rows;
    const std::size_t L = net.num_layers();
    Resampler resample =
        cfg.bootstrap ? bootstrap_resampler(cfg.seed) : identity_resampler();

    Matrix X = data.features;
    std::vector<double> gram;
    bool have_gram = detail::gram_fits(n, cfg.solver.gram_limit_mb);
    if (have_gram) gram = detail::compute_gram(X);

    for (std::size_t l = 0; l < L; ++l) {
        const auto t0 = std::chrono::steady_clock::now();
        const BlockSpec& spec = net.block(l);
        const int cpg = spec.classes_per_group;
        const std::size_t planes = net.layer_output_dim(l);

        std::vector<std::vector<std::uint32_t>> rows(spec.num_groups);
        for (int g = 0; g < spec.num_groups; ++g)
            rows[g] = resample(n, l, static_cast<std::size_t>(g));

        std::vector<LinearHyperplane> trained(planes);
        std::vector<long> iters(planes, 0);
        parallel_for(planes, cfg.threads, [&](std::size_t j) {
            const int g = static_cast<int>(j) / cpg;
            const int c = static_cast<int>(j) % cpg;
            const auto& rw = rows[g];
            std::vector<double> target(rw.size());
            for (std::size_t k = 0; k < rw.size(); ++k)
                target[k] = detail::plane_target(data.labels[rw[k]], c, net.binary());
            std::vector<char> theta(rw.size(), 1);
            SolverConfig scfg = cfg.solver;
            scfg.c_hinge = cfg.solver.c_block;
            detail::SolveStats st;
            trained[j] = detail::train_plane(X, rw, target, theta, scfg,
                                             have_gram ? gram.data() : nullptr, &st);
            iters[j] = st.iterations;
        });
        for (std::size_t j = 0; j < planes; ++j)
            net.set_svm(l, j / static_cast<std::size_t>(cpg),
                        j % static_cast<std::size_t>(cpg), std::move(trained[j]));

        if (l + 1 < L) {
            // Shaped outputs of the freshly trained layer, prepended to X.
            Matrix Y(n, planes);
            parallel_for(n, cfg.threads, [&](std::size_t k) {
                const auto x = X.row(k);
                auto yr = Y.row(k);
                for (std::size_t j = 0; j < planes; ++j)
                    yr[j] = shape(net.svm(l, j / cpg, j % cpg).margin(x));
            });
            Matrix nx(n, planes + X.cols);
            for (std::size_t k = 0; k < n; ++k) {
                auto dst = nx.row(k);
                const auto yr = Y.row(k);
                const auto xr = X.row(k);
                std::copy(yr.begin(), yr.end(), dst.begin());
                std::copy(xr.begin(), xr.end(), dst.begin() + planes);
            }
            X = std::move(nx);
            if (have_gram) detail::add_outer(gram, Y);
        }

        if (sink) {
            BlockLayerRecord rec;
            rec.layer = l;
            rec.planes = planes;
            rec.solver_iterations = std::accumulate(iters.begin(), iters.end(), 0L);
            rec.seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            sink(rec);
        }
    }
    return net;
}

struct EpochRecord {
    int epoch = 0;
    double objective = 0.0;
    double train_error = 0.0;
    bool has_test = false;
    double test_error = 0.0;
    std::vector<double> saturation;  // per layer
    long solver_iterations = 0;
    double seconds = 0.0;  // wall clock; not part of the deterministic stream
};
using EpochSink = std::function<void(const EpochRecord&)>;

struct FinetuneResult {
    Network network;
    std::vector<double> objective_history;  // [0] = before the first epoch
};

// Layered tuning (Algorithm 1).  Walks the layers top-down once per batch;
// every retraining step is an exact convex solve on the mixed objective.
[[nodiscard]] inline FinetuneResult blt_finetune(Network net, const Dataset& train,
                                                 const BltConfig& cfg,
                                   const Dataset* test = nullptr, EpochSink sink = {}) {
    cfg.validate();
    if (train.features.rows == 0) throw empty_input_error("blt_finetune: no samples");
    if (train.features.rows != train.labels.size())
        throw shape_error("blt_finetune: feature/label count mismatch");
    if (train.features.cols != net.raw_input_dim())
        throw shape_error("blt_finetune: dataset dimension does not match the network");
    for (int lb : train.labels)
        if (lb < 0 || lb >= net.num_classes())
            throw validation_error("blt_finetune: label outside class range");

    const std::size_t n = train.features.rows;
    const std::size_t L = net.num_layers();
    const std::size_t batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);

    FinetuneResult result{std::move(net), {}};
    Network& model = result.network;
    result.objective_history.push_back(
        output_objective(model, train.features, train.labels, cfg.solver, cfg.threads));

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        long iters_total = 0;

        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        Rng shuffle_rng(mix_seed(cfg.seed, 0xE90Cu, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t count = std::min(batch, n - start);
            std::span<const std::uint32_t> brows(order.data() + start, count);
            std::vector<int> blabels(count);
            for (std::size_t k = 0; k < count; ++k)
                blabels[k] = train.labels[brows[k]];

            detail::BatchTrace bt =
                detail::forward_rows(model, train.features, brows, cfg.threads);

            // Per-layer Gram matrices over the cached batch inputs, shared
            // by every plane retrained in that layer.
            std::vector<std::vector<double>> grams(L);
            if (detail::gram_fits(count, cfg.solver.gram_limit_mb)) {
                grams[0] = detail::compute_gram(bt.inputs[0]);
                for (std::size_t l = 1; l < L; ++l) {
                    grams[l] = grams[l - 1];
                    detail::add_outer(grams[l], bt.y[l - 1]);
                }
            }

            for (std::size_t l = L; l-- > 0;) {
                const BlockSpec& spec = model.block(l);
                const int cpg = spec.classes_per_group;
                const std::size_t planes = model.layer_output_dim(l);
                const double* gram_ptr = grams[l].empty() ? nullptr : grams[l].data();

                Matrix vl;                 // virtual labels (middle layers)
                std::vector<char> theta;   // matching theta flags
                if (l + 1 < L) {
                    Matrix grad = detail::layer_output_gradient(
                        model, bt.z, blabels, cfg.solver.c_hinge, l);
                    vl = Matrix(count, planes);
                    theta.assign(count * planes, 0);
                    for (std::size_t s = 0; s < count; ++s)
                        for (std::size_t j = 0; j < planes; ++j) {
                            const double v = shape(bt.y[l].at(s, j) -
                                                   cfg.learning_rate * grad.at(s, j));
                            vl.at(s, j) = v;
                            theta[s * planes + j] = std::abs(v) == 1.0 ? 1 : 0;
                        }
                }

                std::vector<LinearHyperplane> trained(planes);
                std::vector<long> iters(planes, 0);
                parallel_for(planes, cfg.threads, [&](std::size_t j) {
                    std::vector<double> target(count);
                    std::vector<char> th(count);
                    if (l + 1 < L) {
                        for (std::size_t s = 0; s < count; ++s) {
                            target[s] = vl.at(s, j);
                            th[s] = theta[s * planes + j];
                        }
                    } else {
                        for (std::size_t s = 0; s < count; ++s) {
                            target[s] = detail::plane_target(
                                blabels[s], static_cast<int>(j) % cpg, model.binary());
                            th[s] = 1;
                        }
                    }
                    detail::SolveStats st;
                    trained[j] = detail::train_plane(bt.inputs[l], {}, target, th,
                                                     cfg.solver, gram_ptr, &st);
                    iters[j] = st.iterations;
                });
                for (std::size_t j = 0; j < planes; ++j)
                    model.set_svm(l, j / static_cast<std::size_t>(cpg),
                                  j % static_cast<std::size_t>(cpg),
                                  std::move(trained[j]));
                iters_total += std::accumulate(iters.begin(), iters.end(), 0L);
            }
        }

        const double J =
            output_objective(model, train.features, train.labels, cfg.solver, cfg.threads);
        result.objective_history.push_back(J);

        if (sink) {
            EpochRecord rec;
            rec.epoch = epoch;
            rec.objective = J;
            EvalResult ev = evaluate(model, train.features, train.labels, cfg.threads);
            rec.train_error = ev.error_rate;
            rec.saturation = ev.saturation;
            if (test) {
                rec.has_test = true;
                rec.test_error =
                    evaluate(model, test->features, test->labels, cfg.threads).error_rate;
            }
            rec.solver_iterations = iters_total;
            rec.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            sink(rec);
        }

        const auto& h = result.objective_history;
        const std::size_t e = h.size() - 1;
        if (epoch >= cfg.convergence_window &&
            h[e - cfg.convergence_window] - h[e] < cfg.convergence_delta)
            break;
    }
    return result;
}

}  // namespace svmdsn
