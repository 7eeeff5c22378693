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

// Convex solvers for the two per-SVM training problems:
//
//   block objective (one output of a one-vs-rest group):
//       min_w,b  1/2 |w|^2 + C * sum_k max(0, 1 - y_k (w.x_k + b))
//
//   mixed fine-tuning objective (hinge on saturated virtual labels,
//   epsilon-insensitive regression on interior ones):
//       min_w,b  1/2 |w|^2 + C1 * sum_{k in Theta} max(0, 1 - t_k u_k)
//                          + C2 * sum_{k not in Theta} max(0, |u_k - t_k| - eps)
//
// The block problem is the mixed problem with every sample in Theta, so a
// single dual solver covers both.  The dual is a box-constrained QP with one
// equality constraint: each Theta sample contributes one variable (sign t_k,
// upper bound C1, linear term -1) and each tube sample contributes the usual
// pair of epsilon-SVR variables (signs +/-1, bound C2, linear terms
// eps -/+ t_k).  With lambda_k the per-sample coefficient (w = sum lambda_k
// x_k), the solver below is a standard SMO decomposition: second-order
// working-set selection, maximal-violating-pair stopping, and deterministic
// lowest-index tie-breaking so repeated runs are bitwise identical.
//
// The bias is not taken from the dual.  Given the solved w, the primal is an
// exact piecewise-linear function of b alone, so we minimize it directly by a
// breakpoint scan (midpoint of a flat optimal interval, the finite endpoint
// when the interval is a half line).  This sidesteps every degenerate
// KKT-interval case -- one-class inputs land on b = +/-1, an all-interior
// regression with zero weight lands mid-tube -- and can only tighten the
// primal objective.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "svmdsn/errors.hpp"
#include "svmdsn/gram.hpp"
#include "svmdsn/hyperplane.hpp"
#include "svmdsn/matrix.hpp"

namespace svmdsn {

struct SolverConfig {
    double c_block = 1.0;   // C in the block objective
    double c_hinge = 1.0;   // C1: hinge weight on Theta samples
    double c_svr = 1.0;     // C2: tube weight on interior samples
    double epsilon = 0.1;   // epsilon-insensitive tube half-width
    double tolerance = 1e-6;    // KKT violation gap at which SMO stops
    long max_iterations = 1000;  // sweep budget; one sweep = #vars updates
    std::size_t gram_limit_mb = 512;  // full Gram precomputation cap

    void validate() const {
        if (!(c_block > 0.0) || !(c_hinge > 0.0) || !(c_svr > 0.0))
            throw config_error("solver penalties must be positive");
        if (!(epsilon >= 0.0) || !(epsilon < 1.0))
            throw config_error("epsilon must lie in [0, 1)");
        if (!(tolerance > 0.0))
            throw config_error("tolerance must be positive");
        if (max_iterations < 1)
            throw config_error("max_iterations must be at least 1");
    }
};

// One training sample for the mixed objective.  in_theta must agree exactly
// with |virtual_label| == 1: saturated virtual labels are classification
// targets, interior ones are regression targets.
struct VirtualSample {
    Vector input;
    double virtual_label = 0.0;
    bool in_theta = false;
};

inline void validate_virtual_samples(std::span<const VirtualSample> samples) {
    if (samples.empty())
        throw empty_input_error("no virtual samples provided");
    const std::size_t d = samples.front().input.size();
    if (d == 0) throw shape_error("virtual samples must have positive dimension");
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const VirtualSample& s = samples[k];
        if (s.input.size() != d)
            throw shape_error("virtual sample " + std::to_string(k) +
                              " has dimension " + std::to_string(s.input.size()) +
                              ", expected " + std::to_string(d));
        if (!all_finite(s.input) || !std::isfinite(s.virtual_label))
            throw validation_error("virtual sample " + std::to_string(k) +
                                   " contains non-finite values");
        if (std::abs(s.virtual_label) > 1.0)
            throw validation_error("virtual label of sample " + std::to_string(k) +
                                   " lies outside [-1, 1]");
        if (s.in_theta != (std::abs(s.virtual_label) == 1.0))
            throw validation_error(
                "sample " + std::to_string(k) +
                ": in_theta must hold exactly when |virtual_label| == 1");
    }
}

// Mixed objective, evaluated exactly as written above.
inline double objective_mixed(const LinearHyperplane& h,
                              std::span<const VirtualSample> samples,
                              const SolverConfig& cfg) {
    cfg.validate();
    validate_virtual_samples(samples);
    double hinge = 0.0, tube = 0.0;
    for (const VirtualSample& s : samples) {
        const double u = h.margin(s.input);
        if (s.in_theta)
            hinge += std::max(0.0, 1.0 - s.virtual_label * u);
        else
            tube += std::max(0.0, std::abs(u - s.virtual_label) - cfg.epsilon);
    }
    return 0.5 * dot(h.weights, h.weights) + cfg.c_hinge * hinge + cfg.c_svr * tube;
}

// Block objective for a single output: all samples in Theta with +/-1 labels.
inline double objective_block(const LinearHyperplane& h, const Matrix& X,
                              std::span<const int> y, double c) {
    if (X.rows != y.size()) throw shape_error("objective_block: row/label mismatch");
    double hinge = 0.0;
    for (std::size_t k = 0; k < X.rows; ++k)
        hinge += std::max(0.0, 1.0 - static_cast<double>(y[k]) * h.margin(X.row(k)));
    return 0.5 * dot(h.weights, h.weights) + c * hinge;
}

namespace detail {

// Local kernel rows for SMO.  Three tiers, fastest first:
//   - direct:  a caller-supplied Gram over exactly the local samples;
//   - gather:  a caller-supplied Gram over a base matrix, with the local
//              samples an index-mapped (possibly repeating) row subset;
//   - compute: dot products on demand.
// Gathered/computed rows live in a fixed-size LRU pool.  The pool never
// holds fewer than 8 rows, so the two rows touched by one SMO update stay
// valid for the duration of that update.
class KernelCache {
public:
    KernelCache(const Matrix& X, std::span<const std::uint32_t> rows,
                const double* base_gram, std::size_t cache_bytes)
        : X_(X), rows_(rows), gram_(base_gram) {
        n_ = rows_.empty() ? X_.rows : rows_.size();
        direct_ = gram_ != nullptr && rows_.empty();
        diag_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t rk = base_row(k);
            diag_[k] = gram_ ? gram_[rk * X_.rows + rk] : dot(X_.row(rk), X_.row(rk));
        }
        if (!direct_) {
            std::size_t cap = cache_bytes / (sizeof(double) * std::max<std::size_t>(n_, 1));
            capacity_ = std::max<std::size_t>(8, cap);
            if (capacity_ > n_) capacity_ = n_;
        }
    }

    std::size_t size() const { return n_; }
    double diag(std::size_t k) const { return diag_[k]; }

    const double* row(std::size_t k) {
        if (direct_) return gram_ + k * n_;
        if (auto it = index_.find(k); it != index_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
        double* slot = acquire_slot(k);
        const std::size_t rk = base_row(k);
        if (gram_) {
            const double* g = gram_ + rk * X_.rows;
            for (std::size_t s = 0; s < n_; ++s) slot[s] = g[base_row(s)];
        } else {
            const auto xk = X_.row(rk);
            for (std::size_t s = 0; s < n_; ++s) slot[s] = dot(xk, X_.row(base_row(s)));
        }
        return slot;
    }

    std::size_t base_row(std::size_t k) const { return rows_.empty() ? k : rows_[k]; }

private:
    double* acquire_slot(std::size_t k) {
        double* slot;
        if (pool_.size() < capacity_) {
            pool_.emplace_back(n_);
            slot = pool_.back().data();
        } else {
            const std::size_t victim = lru_.back();
            lru_.pop_back();
            slot = index_[victim].first;
            index_.erase(victim);
        }
        lru_.push_front(k);
        index_[k] = {slot, lru_.begin()};
        return slot;
    }

    const Matrix& X_;
    std::span<const std::uint32_t> rows_;
    const double* gram_;
    std::size_t n_ = 0;
    bool direct_ = false;
    std::vector<double> diag_;
    std::size_t capacity_ = 0;
    std::vector<std::vector<double>> pool_;
    std::list<std::size_t> lru_;
    std::unordered_map<std::size_t, std::pair<double*, std::list<std::size_t>::iterator>> index_;
};

struct SolveStats {
    long iterations = 0;
    double gap = 0.0;
    bool converged = false;
};

// Exact minimization of the primal over the bias alone, given w.
// u0 holds w.x_k per sample.  The objective is convex piecewise linear in b;
// we accumulate slope events at the hinge/tube breakpoints and walk them.
inline double optimal_bias(std::span<const double> u0, std::span<const double> target,
                           std::span<const char> theta, const SolverConfig& cfg) {
    std::vector<std::pair<double, double>> ev;  // (position, slope increment)
    ev.reserve(2 * u0.size());
    double slope = 0.0;  // slope of the objective as b -> -inf
    for (std::size_t k = 0; k < u0.size(); ++k) {
        if (theta[k]) {
            if (target[k] > 0.0) {
                slope -= cfg.c_hinge;
                ev.emplace_back(1.0 - u0[k], cfg.c_hinge);
            } else {
                ev.emplace_back(-1.0 - u0[k], cfg.c_hinge);
            }
        } else {
            slope -= cfg.c_svr;
            ev.emplace_back(target[k] - u0[k] - cfg.epsilon, cfg.c_svr);
            ev.emplace_back(target[k] - u0[k] + cfg.epsilon, cfg.c_svr);
        }
    }
    std::sort(ev.begin(), ev.end());
    if (slope == 0.0) return ev.front().first;  // flat then rising: first kink
    std::size_t idx = 0;
    while (idx < ev.size()) {
        const double pos = ev[idx].first;
        double delta = 0.0;
        while (idx < ev.size() && ev[idx].first == pos) delta += ev[idx++].second;
        const double next = slope + delta;
        if (next > 0.0) return pos;  // strict sign change at a kink
        if (next == 0.0)             // flat optimal interval
            return idx < ev.size() ? 0.5 * (pos + ev[idx].first) : pos;
        slope = next;
    }
    return ev.back().first;
}

// SMO over the dual described at the top of the file.
//
// X supplies the base rows; `rows` (when non-empty) maps local sample k to
// base row rows[k], which is how bootstrap resamples share one matrix and one
// Gram.  `gram`, when non-null, is the dense Gram of the *base* matrix.
inline LinearHyperplane train_plane(const Matrix& X, std::span<const std::uint32_t> rows,
                                    std::span<const double> target,
                                    std::span<const char> theta, const SolverConfig& cfg,
                                    const double* gram = nullptr,
                                    SolveStats* stats = nullptr) {
    const std::size_t n = rows.empty() ? X.rows : rows.size();
    if (n == 0) throw empty_input_error("train_plane: no samples");
    if (target.size() != n || theta.size() != n)
        throw shape_error("train_plane: target/theta size mismatch");

    // Variable tables.  Theta sample -> one hinge variable; interior
    // sample -> the two tube variables.
    std::vector<std::int8_t> sgn;
    std::vector<double> lin, a, ub;
    std::vector<std::uint32_t> smp;
    sgn.reserve(2 * n);
    lin.reserve(2 * n);
    ub.reserve(2 * n);
    smp.reserve(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        if (theta[k]) {
            sgn.push_back(target[k] > 0.0 ? +1 : -1);
            lin.push_back(-1.0);
            ub.push_back(cfg.c_hinge);
            smp.push_back(static_cast<std::uint32_t>(k));
        } else {
            sgn.push_back(+1);  // pushes the margin up
            lin.push_back(cfg.epsilon - target[k]);
            ub.push_back(cfg.c_svr);
            smp.push_back(static_cast<std::uint32_t>(k));
            sgn.push_back(-1);  // pushes the margin down
            lin.push_back(cfg.epsilon + target[k]);
            ub.push_back(cfg.c_svr);
            smp.push_back(static_cast<std::uint32_t>(k));
        }
    }
    const std::size_t nv = sgn.size();
    a.assign(nv, 0.0);

    KernelCache kernel(X, rows, gram, cfg.gram_limit_mb << 20);
    std::vector<double> wx(n, 0.0);  // w.x_k maintained incrementally

    constexpr double kTau = 1e-12;
    const double inf = std::numeric_limits<double>::infinity();
    const long budget = cfg.max_iterations * static_cast<long>(nv);
    long it = 0;
    double gap = inf;
    bool converged = false;

    for (; it < budget; ++it) {
        // First pass: maximal violator among the ascent-capable variables.
        double m = -inf;
        std::ptrdiff_t i = -1;
        for (std::size_t t = 0; t < nv; ++t) {
            const bool up = sgn[t] > 0 ? a[t] < ub[t] : a[t] > 0.0;
            if (!up) continue;
            const double g = sgn[t] * wx[smp[t]] + lin[t];
            const double v = -sgn[t] * g;
            if (v > m) {
                m = v;
                i = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (i < 0) {  // equality constraint pins everything: optimal
            gap = 0.0;
            converged = true;
            break;
        }
        const double* Ki = kernel.row(smp[i]);
        const double Kii = kernel.diag(smp[i]);

        // Second pass: stopping gap and second-order partner choice.
        double mlow = inf, best = inf;
        std::ptrdiff_t j = -1;
        for (std::size_t t = 0; t < nv; ++t) {
            const bool low = sgn[t] > 0 ? a[t] > 0.0 : a[t] < ub[t];
            if (!low) continue;
            const double g = sgn[t] * wx[smp[t]] + lin[t];
            const double v = -sgn[t] * g;
            if (v < mlow) mlow = v;
            const double diff = m - v;
            if (diff > 0.0) {
                double quad = Kii + kernel.diag(smp[t]) - 2.0 * Ki[smp[t]];
                if (quad <= 0.0) quad = kTau;
                const double score = -(diff * diff) / quad;
                if (score < best) {
                    best = score;
                    j = static_cast<std::ptrdiff_t>(t);
                }
            }
        }
        gap = m - mlow;
        if (gap <= cfg.tolerance) {
            converged = true;
            break;
        }
        if (j < 0) {  // no feasible descent pair left
            converged = true;
            break;
        }

        // Feasible direction: a_i += s_i * step, a_j -= s_j * step keeps the
        // equality constraint; curvature along it is |x_i - x_j|^2.
        const double* Kj = kernel.row(smp[j]);
        const double gi = sgn[i] * wx[smp[i]] + lin[i];
        const double gj = sgn[j] * wx[smp[j]] + lin[j];
        double quad = Kii + kernel.diag(smp[j]) - 2.0 * Ki[smp[j]];
        if (quad <= 0.0) quad = kTau;
        double step = (sgn[j] * gj - sgn[i] * gi) / quad;
        const double room_i = sgn[i] > 0 ? ub[i] - a[i] : a[i];
        const double room_j = sgn[j] > 0 ? a[j] : ub[j] - a[j];
        step = std::min(step, std::min(room_i, room_j));
        a[i] += sgn[i] * step;
        a[j] -= sgn[j] * step;
        a[i] = std::clamp(a[i], 0.0, ub[i]);
        a[j] = std::clamp(a[j], 0.0, ub[j]);
        if (smp[i] != smp[j]) {
            // d(lambda_{k_i}) = +step, d(lambda_{k_j}) = -step.
            for (std::size_t s = 0; s < n; ++s) wx[s] += step * (Ki[s] - Kj[s]);
        }
    }

    // w = sum_k lambda_k x_k with the definitional dot products, then the
    // exact bias.
    std::vector<double> lambda(n, 0.0);
    for (std::size_t t = 0; t < nv; ++t) lambda[smp[t]] += sgn[t] * a[t];
    Vector w(X.cols, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (lambda[k] == 0.0) continue;
        const auto xk = X.row(kernel.base_row(k));
        for (std::size_t d = 0; d < X.cols; ++d) w[d] += lambda[k] * xk[d];
    }
    std::vector<double> u0(n);
    for (std::size_t k = 0; k < n; ++k) u0[k] = dot(w, X.row(kernel.base_row(k)));
    const double b = optimal_bias(u0, target, theta, cfg);

    if (stats) {
        stats->iterations = it;
        stats->gap = gap;
        stats->converged = converged || gap <= cfg.tolerance;
    }
    return LinearHyperplane(std::move(w), b);
}

}  // namespace detail

// Train one hyperplane on the mixed objective.  The warm start is accepted
// for interface stability but not consulted: the problem is convex with a
// unique optimum, and the SMO path always starts from the origin so results
// stay reproducible.
inline LinearHyperplane train_mixed(std::span<const VirtualSample> samples,
                                    const SolverConfig& cfg,
                                    const LinearHyperplane* warm_start = nullptr) {
    cfg.validate();
    validate_virtual_samples(samples);
    const std::size_t n = samples.size();
    const std::size_t d = samples.front().input.size();
    if (warm_start && warm_start->dim() != d)
        throw shape_error("warm start dimension does not match the samples");
    Matrix X(n, d);
    std::vector<double> target(n);
    std::vector<char> theta(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::copy(samples[k].input.begin(), samples[k].input.end(), X.row(k).begin());
        target[k] = samples[k].virtual_label;
        theta[k] = samples[k].in_theta ? 1 : 0;
    }
    std::vector<double> gram;
    const double* gram_ptr = nullptr;
    if (detail::gram_fits(n, cfg.gram_limit_mb)) {
        gram = detail::compute_gram(X);
        gram_ptr = gram.data();
    }
    return detail::train_plane(X, {}, target, theta, cfg, gram_ptr);
}

// Train a single +/-1 classifier (every sample in Theta) with penalty
// cfg.c_block.
inline LinearHyperplane train_binary(const Matrix& X, std::span<const int> y,
                                     const SolverConfig& cfg,
                                     detail::SolveStats* stats = nullptr) {
    cfg.validate();
    if (X.rows == 0) throw empty_input_error("train_binary: no samples");
    if (X.rows != y.size()) throw shape_error("train_binary: row/label mismatch");
    if (!all_finite(X.data)) throw validation_error("train_binary: non-finite features");
    std::vector<double> target(X.rows);
    for (std::size_t k = 0; k < X.rows; ++k) {
        if (y[k] != 1 && y[k] != -1)
            throw validation_error("train_binary: labels must be +1 or -1");
        target[k] = y[k];
    }
    std::vector<char> theta(X.rows, 1);
    SolverConfig block = cfg;
    block.c_hinge = cfg.c_block;
    std::vector<double> gram;
    const double* gram_ptr = nullptr;
    if (detail::gram_fits(X.rows, cfg.gram_limit_mb)) {
        gram = detail::compute_gram(X);
        gram_ptr = gram.data();
    }
    return detail::train_plane(X, {}, target, theta, block, gram_ptr, stats);
}

// Train a one-vs-rest group: one hyperplane per class, class i positive
// against the rest.
inline std::vector<LinearHyperplane> train_group(const Matrix& X, std::span<const int> labels,
                                                 int num_classes, const SolverConfig& cfg) {
    cfg.validate();
    if (X.rows == 0) throw empty_input_error("train_group: no samples");
    if (X.rows != labels.size()) throw shape_error("train_group: row/label mismatch");
    if (num_classes < 2) throw validation_error("train_group: need at least two classes");
    if (!all_finite(X.data)) throw validation_error("train_group: non-finite features");
    for (int lb : labels)
        if (lb < 0 || lb >= num_classes)
            throw validation_error("train_group: label " + std::to_string(lb) +
                                   " outside [0, " + std::to_string(num_classes) + ")");

    std::vector<double> gram;
    const double* gram_ptr = nullptr;
    const std::size_t n = X.rows;
    if (detail::gram_fits(n, cfg.gram_limit_mb)) {
        gram = detail::compute_gram(X);
        gram_ptr = gram.data();
    }
    SolverConfig block = cfg;
    block.c_hinge = cfg.c_block;
    std::vector<char> theta(n, 1);
    std::vector<LinearHyperplane> group;
    group.reserve(num_classes);
    std::vector<double> target(n);
    for (int c = 0; c < num_classes; ++c) {
        for (std::size_t k = 0; k < n; ++k) target[k] = labels[k] == c ? +1.0 : -1.0;
        group.push_back(detail::train_plane(X, {}, target, theta, block, gram_ptr));
    }
    return group;
}

}  // namespace svmdsn
