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

// svmdsn command-line tool.
//
// Subcommands: gen-circle, train, eval, map, inspect.  Metric records go to
// stdout as one JSON object per line; progress and timing go to stderr.  All
// errors exit nonzero with a single line `error: <category>: <message>`.
// Layer, group and plane numbers on the command line are 1-based.

#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "svmdsn/svmdsn.hpp"

namespace {

using ojson = nlohmann::ordered_json;

void emit(const ojson& record) { std::cout << record.dump() << std::endl; }

svmdsn::RunConfig resolve_config(const std::string& config_path,
                                 const std::vector<std::string>& overrides) {
    svmdsn::RunConfig cfg;
    if (!config_path.empty()) cfg = svmdsn::RunConfig::from_file(config_path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw svmdsn::config_error("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

struct DataArgs {
    std::string libsvm;
    std::string images;
    std::string labels;
    std::size_t dim = 0;

    void attach(CLI::App* cmd, const std::string& prefix = "") {
        const std::string dash = prefix.empty() ? "--" : "--" + prefix + "-";
        cmd->add_option(dash + "data", libsvm, "LIBSVM-format " + prefix + " dataset");
        cmd->add_option(dash + "images", images, "IDX image file (" + prefix + ")");
        cmd->add_option(dash + "labels", labels, "IDX label file (" + prefix + ")");
        if (prefix.empty())
            cmd->add_option("--dim", dim, "feature dimension for LIBSVM data (0 = infer)");
    }
    bool given() const { return !libsvm.empty() || !images.empty() || !labels.empty(); }
    svmdsn::Dataset load() const {
        if (!libsvm.empty()) {
            if (!images.empty() || !labels.empty())
                throw svmdsn::config_error("give either --data or --images/--labels, not both");
            return svmdsn::load_libsvm(libsvm, dim);
        }
        if (images.empty() || labels.empty())
            throw svmdsn::config_error("need --data, or both --images and --labels");
        return svmdsn::load_idx(images, labels);
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run_gen_circle(std::size_t n, std::uint64_t seed, const std::string& out) {
    svmdsn::Dataset d = svmdsn::generate_circle(n, seed);
    svmdsn::save_libsvm(d, out);
    emit({{"record", "dataset"},
          {"path", out},
          {"samples", d.features.rows},
          {"classes", d.num_classes},
          {"seed", seed}});
}

void run_train(const svmdsn::RunConfig& cfg, const DataArgs& data_args,
               const DataArgs& test_args, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    svmdsn::Dataset train = data_args.load();
    svmdsn::Dataset test;
    const bool have_test = test_args.given();
    if (have_test) test = test_args.load();

    svmdsn::Network net(train.features.cols, train.num_classes,
                        cfg.architecture(train.num_classes));
    net.init_random(cfg.seed);
    const svmdsn::BltConfig blt = cfg.blt_config();

    svmdsn::BlockSink bsink = [](const svmdsn::BlockLayerRecord& r) {
        emit({{"record", "block-layer"},
              {"layer", r.layer + 1},
              {"planes", r.planes},
              {"solver_iterations", r.solver_iterations}});
        std::fprintf(stderr, "[block] layer %zu: %zu planes, %.1fs\n", r.layer + 1,
                     r.planes, r.seconds);
    };
    net = svmdsn::block_train(std::move(net), train, blt, bsink);

    if (cfg.finetune) {
        svmdsn::EpochSink esink = [](const svmdsn::EpochRecord& r) {
            ojson rec{{"record", "epoch"},
                      {"epoch", r.epoch},
                      {"objective", r.objective},
                      {"train_error", r.train_error}};
            if (r.has_test) rec["test_error"] = r.test_error;
            rec["saturation"] = r.saturation;
            rec["solver_iterations"] = r.solver_iterations;
            emit(rec);
            std::fprintf(stderr, "[epoch %d] J=%.4f err=%.4f %.1fs\n", r.epoch,
                         r.objective, r.train_error, r.seconds);
        };
        svmdsn::FinetuneResult ft = svmdsn::blt_finetune(
            std::move(net), train, blt, have_test ? &test : nullptr, esink);
        net = std::move(ft.network);
    }

    svmdsn::ModelFile model{std::move(net), cfg.echo(), cfg.seed};
    svmdsn::save_model(model, out);

    const auto ev = svmdsn::evaluate(model.network, train.features, train.labels,
                                     cfg.threads);
    ojson summary{{"record", "train-summary"},
                  {"model", out},
                  {"train_error", ev.error_rate}};
    if (have_test) {
        const auto tv = svmdsn::evaluate(model.network, test.features, test.labels,
                                         cfg.threads);
        summary["test_error"] = tv.error_rate;
    }
    emit(summary);
    std::fprintf(stderr, "[train] done in %.1fs\n", seconds_since(t0));
}

void run_eval(const std::string& model_path, const DataArgs& data_args,
              unsigned threads) {
    svmdsn::ModelFile model = svmdsn::load_model(model_path);
    svmdsn::Dataset data = data_args.load();
    const auto ev = svmdsn::evaluate(model.network, data.features, data.labels, threads);
    emit({{"record", "eval"},
          {"model", model_path},
          {"samples", data.features.rows},
          {"error_rate", ev.error_rate}});
    for (std::size_t c = 0; c < ev.confusion.size(); ++c)
        emit({{"record", "confusion"}, {"class", c}, {"counts", ev.confusion[c]}});
    for (std::size_t l = 0; l < ev.saturation.size(); ++l)
        emit({{"record", "saturation"}, {"layer", l + 1}, {"rate", ev.saturation[l]}});
}

void run_map(const std::string& model_path, const std::string& bounds_arg,
             std::size_t resolution, const std::string& out_prefix, unsigned threads) {
    svmdsn::ModelFile model = svmdsn::load_model(model_path);
    svmdsn::MapBounds bounds;
    {
        double v[4];
        int consumed = 0;
        if (std::sscanf(bounds_arg.c_str(), "%lf,%lf,%lf,%lf%n", &v[0], &v[1], &v[2],
                        &v[3], &consumed) != 4 ||
            consumed != static_cast<int>(bounds_arg.size()))
            throw svmdsn::config_error("--bounds expects xmin,ymin,xmax,ymax");
        bounds = {v[0], v[1], v[2], v[3]};
    }
    const svmdsn::ConfidenceMap map =
        svmdsn::confidence_map(model.network, bounds, resolution, threads);
    for (std::size_t l = 0; l < map.layers.size(); ++l) {
        const std::string stem = out_prefix + "-layer" + std::to_string(l + 1);
        svmdsn::write_map_csv(map, l, stem + ".csv");
        svmdsn::write_map_pgm(map, l, stem + ".pgm");
        emit({{"record", "map-file"},
              {"layer", l + 1},
              {"csv", stem + ".csv"},
              {"pgm", stem + ".pgm"}});
    }
}

void run_inspect(const std::string& model_path, const DataArgs& data_args,
                 std::size_t layer1, std::size_t group1, std::size_t plane1,
                 double tol, unsigned threads) {
    svmdsn::ModelFile model = svmdsn::load_model(model_path);
    const svmdsn::Network& net = model.network;
    if (layer1 < 1 || layer1 > net.num_layers())
        throw svmdsn::index_error("inspect: layer " + std::to_string(layer1) +
                                  " out of range 1.." + std::to_string(net.num_layers()));
    const std::size_t layer = layer1 - 1;
    const svmdsn::BlockSpec& spec = net.block(layer);
    if (group1 < 1 || group1 > static_cast<std::size_t>(spec.num_groups))
        throw svmdsn::index_error("inspect: group " + std::to_string(group1) +
                                  " out of range 1.." + std::to_string(spec.num_groups));
    if (plane1 < 1 || plane1 > static_cast<std::size_t>(spec.classes_per_group))
        throw svmdsn::index_error("inspect: plane " + std::to_string(plane1) +
                                  " out of range 1.." +
                                  std::to_string(spec.classes_per_group));

    svmdsn::Dataset data = data_args.load();
    const auto traces = svmdsn::forward_batch(net, data.features, threads);
    const svmdsn::LinearHyperplane& h = net.svm(layer, group1 - 1, plane1 - 1);

    // The inspected plane's class target, as in block training: +1 for its own
    // class, -1 otherwise (binary nets: the single plane targets class 1).
    std::vector<svmdsn::VirtualSample> samples;
    samples.reserve(traces.size());
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const int label = data.labels[k];
        const double target =
            net.binary() ? (label == 1 ? 1.0 : -1.0)
                         : (static_cast<std::size_t>(label) == plane1 - 1 ? 1.0 : -1.0);
        samples.push_back({traces[k].layers[layer].input, target, true});
    }
    const auto idx = svmdsn::support_vectors(h, samples, /*epsilon=*/0.1, tol);
    for (const std::uint32_t k : idx)
        emit({{"record", "support-vector"},
              {"sample", k},
              {"label", data.labels[k]},
              {"margin", h.margin(samples[k].input)}});
    emit({{"record", "inspect-summary"},
          {"layer", layer1},
          {"group", group1},
          {"plane", plane1},
          {"support_vectors", idx.size()},
          {"samples", traces.size()}});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deep stacking network of linear SVMs"};
    app.require_subcommand(1);

    // gen-circle
    auto* gen = app.add_subcommand("gen-circle", "Generate the two-ring circle dataset");
    std::size_t gen_n = 1000;
    std::uint64_t gen_seed = 42;
    std::string gen_out;
    gen->add_option("--n", gen_n, "points per class")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output LIBSVM path")->required();

    // train
    auto* train = app.add_subcommand("train", "Block-train and fine-tune a network");
    std::string train_config, train_out;
    std::vector<std::string> train_sets;
    bool no_finetune = false;
    long train_threads = -1;
    DataArgs train_data, test_data;
    train->add_option("--config", train_config, "key=value config file");
    train->add_option("--set", train_sets, "override a config key (key=value)");
    train_data.attach(train);
    test_data.attach(train, "test");
    train->add_flag("--no-finetune", no_finetune, "stop after block training");
    train->add_option("--threads", train_threads, "worker threads (0 = auto)");
    train->add_option("--out", train_out, "output model path")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
    std::string eval_model;
    unsigned eval_threads = 0;
    DataArgs eval_data;
    eval->add_option("--model", eval_model, "model file")->required();
    eval_data.attach(eval);
    eval->add_option("--threads", eval_threads, "worker threads (0 = auto)");

    // map
    auto* map = app.add_subcommand("map", "Export per-layer confidence maps");
    std::string map_model, map_bounds = "-2,-2,2,2", map_out;
    std::size_t map_resolution = 200;
    unsigned map_threads = 0;
    map->add_option("--model", map_model, "model file")->required();
    map->add_option("--bounds", map_bounds, "grid bounds xmin,ymin,xmax,ymax");
    map->add_option("--resolution", map_resolution, "grid cells per side");
    map->add_option("--out", map_out, "output path prefix")->required();
    map->add_option("--threads", map_threads, "worker threads (0 = auto)");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "List one base-SVM's support vectors");
    std::string ins_model;
    std::size_t ins_layer = 1, ins_group = 1, ins_plane = 1;
    double ins_tol = 1e-6;
    unsigned ins_threads = 0;
    DataArgs ins_data;
    inspect->add_option("--model", ins_model, "model file")->required();
    ins_data.attach(inspect);
    inspect->add_option("--layer", ins_layer, "layer number (1-based)");
    inspect->add_option("--group", ins_group, "group number (1-based)");
    inspect->add_option("--index", ins_plane, "plane number within the group (1-based)");
    inspect->add_option("--tol", ins_tol, "margin tolerance");
    inspect->add_option("--threads", ins_threads, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) {
            run_gen_circle(gen_n, gen_seed, gen_out);
        } else if (train->parsed()) {
            svmdsn::RunConfig cfg = resolve_config(train_config, train_sets);
            if (no_finetune) cfg.finetune = false;
            if (train_threads >= 0) cfg.threads = static_cast<unsigned>(train_threads);
            run_train(cfg, train_data, test_data, train_out);
        } else if (eval->parsed()) {
            run_eval(eval_model, eval_data, eval_threads);
        } else if (map->parsed()) {
            run_map(map_model, map_bounds, map_resolution, map_out, map_threads);
        } else if (inspect->parsed()) {
            run_inspect(ins_model, ins_data, ins_layer, ins_group, ins_plane, ins_tol,
                        ins_threads);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const svmdsn::error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
