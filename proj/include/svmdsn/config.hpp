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

// Run configuration: a flat key=value namespace shared by the CLI and the
// model file's config echo.  Unknown keys are rejected rather than ignored;
// echo() reproduces every key (defaults included) in one canonical order so
// that identical runs serialize identically.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "svmdsn/cascade.hpp"
#include "svmdsn/errors.hpp"
#include "svmdsn/network.hpp"
#include "svmdsn/solver.hpp"
#include "svmdsn/training.hpp"

namespace svmdsn {

struct RunConfig {
    std::uint64_t seed = 42;
    unsigned threads = 0;            // 0 = SVMDSN_THREADS or hardware
    std::string layers = "40x1,60x1";  // middle blocks as groups x planes
    int output_groups = 1;
    double c_block = 1.0;
    double c_hinge = 1.0;
    double c_svr = 1.0;
    double epsilon = 0.1;
    double tolerance = 1e-6;
    long max_iterations = 1000;
    std::size_t gram_limit_mb = 512;
    double learning_rate = 0.0005;
    std::size_t batch_size = 0;  // 0 = full set
    int max_epochs = 50;
    int convergence_window = 5;
    double convergence_delta = 1e-5;
    bool finetune = true;
    int cascade_partitions = 1;
    int cascade_levels = 0;
    int cascade_refilter_passes = 1;

    void set(const std::string& key, const std::string& value);

    static RunConfig from_entries(
        const std::vector<std::pair<std::string, std::string>>& entries) {
        RunConfig cfg;
        for (const auto& [k, v] : entries) cfg.set(k, v);
        return cfg;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open config " + path);
        RunConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error(path + ":" + std::to_string(lineno) +
                                   ": expected key = value");
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    // Every key in canonical order, values normalized.
    std::vector<std::pair<std::string, std::string>> echo() const {
        const auto fmt = [](double v) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        return {
            {"seed", std::to_string(seed)},
            {"threads", std::to_string(threads)},
            {"layers", layers},
            {"output_groups", std::to_string(output_groups)},
            {"c_block", fmt(c_block)},
            {"c_hinge", fmt(c_hinge)},
            {"c_svr", fmt(c_svr)},
            {"epsilon", fmt(epsilon)},
            {"tolerance", fmt(tolerance)},
            {"max_iterations", std::to_string(max_iterations)},
            {"gram_limit_mb", std::to_string(gram_limit_mb)},
            {"learning_rate", fmt(learning_rate)},
            {"batch_size", std::to_string(batch_size)},
            {"max_epochs", std::to_string(max_epochs)},
            {"convergence_window", std::to_string(convergence_window)},
            {"convergence_delta", fmt(convergence_delta)},
            {"finetune", finetune ? "true" : "false"},
            {"cascade_partitions", std::to_string(cascade_partitions)},
            {"cascade_levels", std::to_string(cascade_levels)},
            {"cascade_refilter_passes", std::to_string(cascade_refilter_passes)},
        };
    }

    SolverConfig solver_config() const {
        SolverConfig s;
        s.c_block = c_block;
        s.c_hinge = c_hinge;
        s.c_svr = c_svr;
        s.epsilon = epsilon;
        s.tolerance = tolerance;
        s.max_iterations = max_iterations;
        s.gram_limit_mb = gram_limit_mb;
        s.validate();
        return s;
    }

    BltConfig blt_config() const {
        BltConfig b;
        b.learning_rate = learning_rate;
        b.batch_size = batch_size;
        b.max_epochs = max_epochs;
        b.convergence_window = convergence_window;
        b.convergence_delta = convergence_delta;
        b.solver = solver_config();
        b.seed = seed;
        b.threads = threads;
        b.validate();
        return b;
    }

    CascadePlan cascade_plan() const {
        CascadePlan p;
        p.num_partitions = cascade_partitions;
        p.levels = cascade_levels;
        p.seed = seed;
        p.refilter_passes = cascade_refilter_passes;
        p.threads = threads;
        return p;
    }

    // Block layout for a dataset with the given class count.  Binary data
    // uses single-plane groups throughout; otherwise every group carries one
    // plane per class.
    std::vector<BlockSpec> architecture(int num_classes) const {
        if (num_classes < 2) throw config_error("architecture: need >= 2 classes");
        const int cpg = num_classes == 2 ? 1 : num_classes;
        std::vector<BlockSpec> blocks;
        std::string rest = layers;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            std::string piece = rest.substr(0, comma);
            rest = comma == std::string::npos ? std::string() : rest.substr(comma + 1);
            const auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t");
                return s.substr(a, b - a + 1);
            };
            piece = strip(piece);
            if (piece.empty()) throw config_error("layers: empty block spec");
            const auto x = piece.find('x');
            int groups = 0, planes = 0;
            try {
                groups = std::stoi(piece.substr(0, x));
                planes = x == std::string::npos ? cpg : std::stoi(piece.substr(x + 1));
            } catch (const std::exception&) {
                throw config_error("layers: cannot parse block spec '" + piece + "'");
            }
            if (groups < 1 || planes < 1)
                throw config_error("layers: block spec '" + piece + "' must be positive");
            if (planes != cpg)
                throw config_error("layers: block spec '" + piece + "' asks for " +
                                   std::to_string(planes) + " planes per group, but " +
                                   std::to_string(num_classes) + "-class data needs " +
                                   std::to_string(cpg));
            blocks.push_back({groups, planes});
        }
        if (output_groups < 1) throw config_error("output_groups must be at least 1");
        blocks.push_back({output_groups, cpg});
        return blocks;
    }
};

inline void RunConfig::set(const std::string& key, const std::string& value) {
    const auto bad = [&](const char* why) {
        return config_error("config key '" + key + "': " + why + " (got '" + value + "')");
    };
    const auto as_ll = [&] {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw bad("expected an integer");
        }
    };
    const auto as_double = [&] {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw bad("expected a number");
        }
    };
    const auto as_bool = [&] {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        throw bad("expected true or false");
    };
    const auto non_negative = [&](long long v) {
        if (v < 0) throw bad("must be non-negative");
        return v;
    };

    if (key == "seed") seed = static_cast<std::uint64_t>(non_negative(as_ll()));
    else if (key == "threads") threads = static_cast<unsigned>(non_negative(as_ll()));
    else if (key == "layers") layers = value;
    else if (key == "output_groups") output_groups = static_cast<int>(as_ll());
    else if (key == "c_block") c_block = as_double();
    else if (key == "c_hinge") c_hinge = as_double();
    else if (key == "c_svr") c_svr = as_double();
    else if (key == "epsilon") epsilon = as_double();
    else if (key == "tolerance") tolerance = as_double();
    else if (key == "max_iterations") max_iterations = static_cast<long>(as_ll());
    else if (key == "gram_limit_mb")
        gram_limit_mb = static_cast<std::size_t>(non_negative(as_ll()));
    else if (key == "learning_rate") learning_rate = as_double();
    else if (key == "batch_size")
        batch_size = static_cast<std::size_t>(non_negative(as_ll()));
    else if (key == "max_epochs") max_epochs = static_cast<int>(as_ll());
    else if (key == "convergence_window") convergence_window = static_cast<int>(as_ll());
    else if (key == "convergence_delta") convergence_delta = as_double();
    else if (key == "finetune") finetune = as_bool();
    else if (key == "cascade_partitions") cascade_partitions = static_cast<int>(as_ll());
    else if (key == "cascade_levels") cascade_levels = static_cast<int>(as_ll());
    else if (key == "cascade_refilter_passes")
        cascade_refilter_passes = static_cast<int>(as_ll());
    else
        throw config_error("unknown config key '" + key + "'");
}

}  // namespace svmdsn
