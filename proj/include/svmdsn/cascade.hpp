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

// Cascade training for a single linear SVM: split the data into partitions,
// train each independently (these solves are embarrassingly parallel), keep
// only each partition's support-vector candidates, then pairwise-merge and
// refilter the candidate sets until one remains.  A final model trained on
// the surviving candidates is verified against the full set; samples it
// misses become candidates for another round.  For separable data the
// support set stabilizes and the cascade reproduces the full solve almost
// exactly; heavily overlapping data may keep a small residue of violators,
// which is why the verification pass count is configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "svmdsn/errors.hpp"
#include "svmdsn/matrix.hpp"
#include "svmdsn/parallel.hpp"
#include "svmdsn/rng.hpp"
#include "svmdsn/solver.hpp"

namespace svmdsn {

struct CascadePlan {
    int num_partitions = 1;
    int levels = 0;  // 0 = enough pairwise merges to reach one set
    std::uint64_t seed = 42;
    int refilter_passes = 1;  // full-data verification rounds
    unsigned threads = 0;

    void validate(std::size_t n_samples) const {
        if (num_partitions < 1)
            throw config_error("cascade: num_partitions must be at least 1");
        if (static_cast<std::size_t>(num_partitions) > n_samples)
            throw config_error("cascade: more partitions (" +
                               std::to_string(num_partitions) + ") than samples (" +
                               std::to_string(n_samples) + ")");
        if (levels < 0) throw config_error("cascade: levels must be non-negative");
        if (refilter_passes < 0)
            throw config_error("cascade: refilter_passes must be non-negative");
    }
};

struct CascadeStats {
    std::vector<std::size_t> level_sizes;  // candidate-set total per level
    int refilters_used = 0;
    long solver_iterations = 0;
    double seconds = 0.0;
};

namespace detail {

// Margin slack below which a sample counts as a support-vector candidate.
constexpr double kSupportTol = 1e-6;

inline std::vector<char> check_pm_labels(const Matrix& X, std::span<const int> y) {
    if (X.rows == 0) throw empty_input_error("cascade: no samples");
    if (X.rows != y.size()) throw shape_error("cascade: feature/label count mismatch");
    for (int v : y)
        if (v != 1 && v != -1)
            throw validation_error("cascade: labels must be +1 or -1");
    return std::vector<char>(X.rows, 1);
}

// Train on the subset `rows` and return the subset's support-vector
// candidates as base-matrix indices (ascending).
inline std::vector<std::uint32_t> candidates_of(const Matrix& X, std::span<const int> y,
                                                std::span<const std::uint32_t> rows,
                                                const SolverConfig& cfg, long* iters) {
    std::vector<double> target(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) target[k] = y[rows[k]];
    std::vector<char> theta(rows.size(), 1);
    SolverConfig scfg = cfg;
    scfg.c_hinge = cfg.c_block;
    SolveStats st;
    LinearHyperplane h = train_plane(X, rows, target, theta, scfg, nullptr, &st);
    if (iters) *iters += st.iterations;
    std::vector<std::uint32_t> keep;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double m = y[rows[k]] * h.margin(X.row(rows[k]));
        if (m <= 1.0 + kSupportTol) keep.push_back(rows[k]);
    }
    return keep;  // rows ascending -> keep ascending
}

}  // namespace detail

// Run the filter/merge tree and return the final candidate index set
// (ascending base indices).
inline std::vector<std::uint32_t> filter_candidates(const Matrix& X, std::span<const int> y,
                                                    const CascadePlan& plan,
                                                    const SolverConfig& cfg,
                                                    CascadeStats* stats = nullptr) {
    cfg.validate();
    detail::check_pm_labels(X, y);
    plan.validate(X.rows);

    const std::size_t n = X.rows;
    const std::size_t m = static_cast<std::size_t>(plan.num_partitions);

    // Seeded shuffle, then M nearly equal slices, each sorted.
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng rng(mix_seed(plan.seed, 0xCA5Cu));
    rng.shuffle(perm);
    std::vector<std::vector<std::uint32_t>> sets(m);
    for (std::size_t p = 0; p < m; ++p) {
        const std::size_t lo = p * n / m, hi = (p + 1) * n / m;
        sets[p].assign(perm.begin() + lo, perm.begin() + hi);
        std::sort(sets[p].begin(), sets[p].end());
    }

    const int max_levels =
        plan.levels > 0
            ? plan.levels
            : 1 + static_cast<int>(std::ceil(std::log2(std::max<std::size_t>(m, 1))));
    long iters = 0;
    std::vector<long> part_iters;

    for (int level = 1; level <= max_levels && !sets.empty(); ++level) {
        if (level > 1) {
            if (sets.size() == 1) break;
            std::vector<std::vector<std::uint32_t>> merged;
            for (std::size_t p = 0; p + 1 < sets.size(); p += 2) {
                std::vector<std::uint32_t> u;
                std::set_union(sets[p].begin(), sets[p].end(), sets[p + 1].begin(),
                               sets[p + 1].end(), std::back_inserter(u));
                merged.push_back(std::move(u));
            }
            if (sets.size() % 2 == 1) merged.push_back(std::move(sets.back()));
            sets = std::move(merged);
        }
        part_iters.assign(sets.size(), 0);
        std::vector<std::vector<std::uint32_t>> filtered(sets.size());
        parallel_for(sets.size(), plan.threads, [&](std::size_t p) {
            filtered[p] = detail::candidates_of(X, y, sets[p], cfg, &part_iters[p]);
        });
        sets = std::move(filtered);
        iters += std::accumulate(part_iters.begin(), part_iters.end(), 0L);
        if (stats) {
            std::size_t total = 0;
            for (const auto& s : sets) total += s.size();
            stats->level_sizes.push_back(total);
        }
    }

    // Whatever remains merges into one set (already the case when the level
    // budget sufficed).
    std::vector<std::uint32_t> out;
    for (const auto& s : sets) {
        std::vector<std::uint32_t> u;
        std::set_union(out.begin(), out.end(), s.begin(), s.end(), std::back_inserter(u));
        out = std::move(u);
    }
    if (stats) stats->solver_iterations += iters;
    return out;
}

// Full cascade: filter, train on the survivors, then verify against the
// complete dataset, folding any violators back in.
inline LinearHyperplane cascade_train(const Matrix& X, std::span<const int> y,
                                      const CascadePlan& plan, const SolverConfig& cfg,
                                      CascadeStats* stats = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::uint32_t> cand = filter_candidates(X, y, plan, cfg, stats);

    SolverConfig scfg = cfg;
    scfg.c_hinge = cfg.c_block;
    std::vector<char> theta_all = detail::check_pm_labels(X, y);

    auto train_on = [&](std::span<const std::uint32_t> rows) {
        std::vector<double> target(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) target[k] = y[rows[k]];
        std::vector<char> theta(rows.size(), 1);
        detail::SolveStats st;
        LinearHyperplane h = detail::train_plane(X, rows, target, theta, scfg, nullptr, &st);
        if (stats) stats->solver_iterations += st.iterations;
        return h;
    };

    LinearHyperplane model = train_on(cand);
    for (int pass = 0; pass < plan.refilter_passes; ++pass) {
        std::vector<std::uint32_t> violators;
        std::size_t ci = 0;
        for (std::uint32_t k = 0; k < X.rows; ++k) {
            while (ci < cand.size() && cand[ci] < k) ++ci;
            const bool in_set = ci < cand.size() && cand[ci] == k;
            if (in_set) continue;
            if (y[k] * model.margin(X.row(k)) <= 1.0 + detail::kSupportTol)
                violators.push_back(k);
        }
        if (violators.empty()) break;
        std::vector<std::uint32_t> u;
        std::set_union(cand.begin(), cand.end(), violators.begin(), violators.end(),
                       std::back_inserter(u));
        cand = std::move(u);
        model = train_on(cand);
        if (stats) stats->refilters_used = pass + 1;
    }
    if (stats)
        stats->seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return model;
}

}  // namespace svmdsn
