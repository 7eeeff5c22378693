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

// JSON model container, format "svmdsn-model" version 1.
//
// Doubles are serialized with shortest-round-trip formatting, and keys keep
// insertion order, so saving the same model twice produces byte-identical
// files and a load/save cycle preserves every parameter bitwise.

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "svmdsn/errors.hpp"
#include "svmdsn/network.hpp"

namespace svmdsn {

struct ModelFile {
    Network network;
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::uint64_t seed = 0;
};

inline void save_model(const ModelFile& model, const std::string& path) {
    using json = nlohmann::ordered_json;
    const Network& net = model.network;
    json j;
    j["format"] = "svmdsn-model";
    j["version"] = 1;
    j["raw_input_dim"] = net.raw_input_dim();
    j["num_classes"] = net.num_classes();
    j["seed"] = model.seed;
    json blocks = json::array();
    for (const BlockSpec& b : net.blocks())
        blocks.push_back({{"num_groups", b.num_groups},
                          {"classes_per_group", b.classes_per_group}});
    j["blocks"] = std::move(blocks);
    json layers = json::array();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        json groups = json::array();
        for (int g = 0; g < net.block(l).num_groups; ++g) {
            json planes = json::array();
            for (int i = 0; i < net.block(l).classes_per_group; ++i) {
                const LinearHyperplane& h = net.svm(l, g, i);
                planes.push_back({{"weights", h.weights}, {"bias", h.bias}});
            }
            groups.push_back(std::move(planes));
        }
        layers.push_back(std::move(groups));
    }
    j["layers"] = std::move(layers);
    json echo = json::object();
    for (const auto& [k, v] : model.config_echo) echo[k] = v;
    j["config"] = std::move(echo);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("failed while writing " + path);
}

inline ModelFile load_model(const std::string& path) {
    using json = nlohmann::ordered_json;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw format_error(path + ": invalid JSON: " + e.what());
    }
    try {
        if (!j.contains("format") || j["format"] != "svmdsn-model")
            throw format_error(path + ": not an svmdsn model file");
        if (!j.contains("version") || !j["version"].is_number_integer())
            throw format_error(path + ": missing format version");
        const int version = j["version"].get<int>();
        if (version != 1)
            throw version_error(path + ": model format version " +
                                std::to_string(version) +
                                " is not supported (this build reads version 1)");

        std::vector<BlockSpec> blocks;
        for (const auto& b : j.at("blocks"))
            blocks.push_back({b.at("num_groups").get<int>(),
                              b.at("classes_per_group").get<int>()});
        Network net(j.at("raw_input_dim").get<std::size_t>(),
                    j.at("num_classes").get<int>(), blocks);

        const auto& layers = j.at("layers");
        if (layers.size() != net.num_layers())
            throw invariant_error(path + ": layer count does not match the blocks");
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            const auto& groups = layers.at(l);
            if (static_cast<int>(groups.size()) != net.block(l).num_groups)
                throw invariant_error(path + ": group count mismatch in layer " +
                                      std::to_string(l));
            for (int g = 0; g < net.block(l).num_groups; ++g) {
                const auto& planes = groups.at(g);
                if (static_cast<int>(planes.size()) != net.block(l).classes_per_group)
                    throw invariant_error(path + ": plane count mismatch in layer " +
                                          std::to_string(l));
                for (int i = 0; i < net.block(l).classes_per_group; ++i) {
                    const auto& p = planes.at(i);
                    Vector w = p.at("weights").get<Vector>();
                    net.set_svm(l, g, i,
                                LinearHyperplane(std::move(w), p.at("bias").get<double>()));
                }
            }
        }

        ModelFile model{std::move(net), {}, j.value("seed", std::uint64_t{0})};
        if (j.contains("config"))
            for (const auto& [k, v] : j["config"].items())
                model.config_echo.emplace_back(k, v.get<std::string>());
        return model;
    } catch (const json::exception& e) {
        throw format_error(path + ": malformed model: " + e.what());
    }
}

}  // namespace svmdsn
