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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "svmdsn/config.hpp"

namespace svmdsn {
namespace {

TEST(RunConfigSet, ParsesEveryKeyKind) {
    RunConfig cfg;
    cfg.set("seed", "7");
    cfg.set("threads", "2");
    cfg.set("layers", "3x1,5x1");
    cfg.set("output_groups", "4");
    cfg.set("c_block", "2.5");
    cfg.set("epsilon", "0.05");
    cfg.set("tolerance", "1e-4");
    cfg.set("max_iterations", "500");
    cfg.set("gram_limit_mb", "64");
    cfg.set("learning_rate", "0.001");
    cfg.set("batch_size", "128");
    cfg.set("max_epochs", "9");
    cfg.set("finetune", "false");
    cfg.set("cascade_partitions", "3");

    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.threads, 2u);
    EXPECT_EQ(cfg.layers, "3x1,5x1");
    EXPECT_EQ(cfg.output_groups, 4);
    EXPECT_DOUBLE_EQ(cfg.c_block, 2.5);
    EXPECT_DOUBLE_EQ(cfg.epsilon, 0.05);
    EXPECT_DOUBLE_EQ(cfg.tolerance, 1e-4);
    EXPECT_EQ(cfg.max_iterations, 500);
    EXPECT_EQ(cfg.gram_limit_mb, 64u);
    EXPECT_DOUBLE_EQ(cfg.learning_rate, 0.001);
    EXPECT_EQ(cfg.batch_size, 128u);
    EXPECT_EQ(cfg.max_epochs, 9);
    EXPECT_FALSE(cfg.finetune);
    EXPECT_EQ(cfg.cascade_partitions, 3);

    cfg.set("finetune", "1");
    EXPECT_TRUE(cfg.finetune);
    cfg.set("finetune", "0");
    EXPECT_FALSE(cfg.finetune);
}

TEST(RunConfigSet, RejectsGarbage) {
    RunConfig cfg;
    EXPECT_THROW(cfg.set("seed", "abc"), config_error);
    EXPECT_THROW(cfg.set("seed", "12x"), config_error);  // trailing junk
    EXPECT_THROW(cfg.set("seed", "-1"), config_error);
    EXPECT_THROW(cfg.set("c_block", "fast"), config_error);
    EXPECT_THROW(cfg.set("c_block", "1.5extra"), config_error);
    EXPECT_THROW(cfg.set("finetune", "yes"), config_error);
    EXPECT_THROW(cfg.set("batch_size", "-5"), config_error);
    EXPECT_THROW(cfg.set("no_such_key", "1"), config_error);
}

TEST(RunConfigFromFile, CommentsBlanksAndTrimming) {
    const auto dir = std::filesystem::temp_directory_path() / "svmdsn_config_test";
    std::filesystem::create_directories(dir);
    const std::string p = (dir / "run.conf").string();
    {
        std::ofstream out(p);
        out << "# a comment line\n";
        out << "\n";
        out << "seed = 123   # trailing comment\n";
        out << "  layers=2x1\t\n";
        out << "learning_rate = 0.002\n";
    }
    const RunConfig cfg = RunConfig::from_file(p);
    EXPECT_EQ(cfg.seed, 123u);
    EXPECT_EQ(cfg.layers, "2x1");
    EXPECT_DOUBLE_EQ(cfg.learning_rate, 0.002);

    {
        std::ofstream out(p);
        out << "seed 123\n";  // missing '='
    }
    try {
        RunConfig::from_file(p);
        FAIL() << "expected config_error";
    } catch (const config_error& e) {
        // The line number is part of the message.
        EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos);
    }
    EXPECT_THROW(RunConfig::from_file((dir / "missing.conf").string()), io_error);
    std::filesystem::remove_all(dir);
}

TEST(RunConfigEcho, CanonicalOrderRoundTrips) {
    RunConfig cfg;
    cfg.set("seed", "9");
    cfg.set("tolerance", "0.001");
    cfg.set("finetune", "false");
    const auto entries = cfg.echo();
    // Canonical order starts with seed and includes every key once.
    ASSERT_FALSE(entries.empty());
    EXPECT_EQ(entries.front().first, "seed");
    EXPECT_EQ(entries.front().second, "9");

    const RunConfig back = RunConfig::from_entries(cfg.echo());
    EXPECT_EQ(back.echo(), cfg.echo());
    EXPECT_EQ(back.seed, 9u);
    EXPECT_DOUBLE_EQ(back.tolerance, 0.001);
    EXPECT_FALSE(back.finetune);
}

TEST(RunConfigArchitecture, BinaryUsesSinglePlaneGroups) {
    RunConfig cfg;
    cfg.layers = "40x1,60x1";
    const auto blocks = cfg.architecture(2);
    ASSERT_EQ(blocks.size(), 3u);
    EXPECT_EQ(blocks[0].num_groups, 40);
    EXPECT_EQ(blocks[0].classes_per_group, 1);
    EXPECT_EQ(blocks[1].num_groups, 60);
    EXPECT_EQ(blocks[1].classes_per_group, 1);
    EXPECT_EQ(blocks[2].num_groups, 1);  // output block
    EXPECT_EQ(blocks[2].classes_per_group, 1);
}

TEST(RunConfigArchitecture, MulticlassCarriesOnePlanePerClass) {
    RunConfig cfg;
    cfg.layers = "5x10,5x10";
    cfg.output_groups = 2;
    const auto blocks = cfg.architecture(10);
    ASSERT_EQ(blocks.size(), 3u);
    EXPECT_EQ(blocks[0].num_groups, 5);
    EXPECT_EQ(blocks[0].classes_per_group, 10);
    EXPECT_EQ(blocks[2].num_groups, 2);
    EXPECT_EQ(blocks[2].classes_per_group, 10);

    // The short form omits the plane count and inherits it from the data.
    cfg.layers = "5,5";
    const auto inferred = cfg.architecture(10);
    EXPECT_EQ(inferred[0].classes_per_group, 10);
}

TEST(RunConfigArchitecture, RejectsInconsistentSpecs) {
    RunConfig cfg;
    cfg.layers = "5x3,5x3";
    EXPECT_THROW(cfg.architecture(10), config_error);  // 3 planes, 10 classes
    cfg.layers = "4x10";
    EXPECT_THROW(cfg.architecture(2), config_error);  // 10 planes, binary
    cfg.layers = "0x1";
    EXPECT_THROW(cfg.architecture(2), config_error);
    cfg.layers = "abc";
    EXPECT_THROW(cfg.architecture(2), config_error);
    cfg.layers = "2x1,,2x1";
    EXPECT_THROW(cfg.architecture(2), config_error);
    cfg.layers = "2x1";
    cfg.output_groups = 0;
    EXPECT_THROW(cfg.architecture(2), config_error);
    EXPECT_THROW(cfg.architecture(1), config_error);
}

TEST(RunConfigViews, SolverBltAndCascadeInheritTheRightFields) {
    RunConfig cfg;
    cfg.set("c_block", "3");
    cfg.set("c_hinge", "4");
    cfg.set("c_svr", "5");
    cfg.set("epsilon", "0.2");
    cfg.set("tolerance", "1e-3");
    cfg.set("max_iterations", "77");
    cfg.set("gram_limit_mb", "16");
    cfg.set("learning_rate", "0.01");
    cfg.set("batch_size", "32");
    cfg.set("max_epochs", "11");
    cfg.set("convergence_window", "3");
    cfg.set("convergence_delta", "1e-4");
    cfg.set("seed", "77");
    cfg.set("threads", "2");
    cfg.set("cascade_partitions", "4");
    cfg.set("cascade_levels", "2");
    cfg.set("cascade_refilter_passes", "3");

    const SolverConfig s = cfg.solver_config();
    EXPECT_DOUBLE_EQ(s.c_block, 3.0);
    EXPECT_DOUBLE_EQ(s.c_hinge, 4.0);
    EXPECT_DOUBLE_EQ(s.c_svr, 5.0);
    EXPECT_DOUBLE_EQ(s.epsilon, 0.2);
    EXPECT_DOUBLE_EQ(s.tolerance, 1e-3);
    EXPECT_EQ(s.max_iterations, 77);
    EXPECT_EQ(s.gram_limit_mb, 16u);

    const BltConfig b = cfg.blt_config();
    EXPECT_DOUBLE_EQ(b.learning_rate, 0.01);
    EXPECT_EQ(b.batch_size, 32u);
    EXPECT_EQ(b.max_epochs, 11);
    EXPECT_EQ(b.convergence_window, 3);
    EXPECT_DOUBLE_EQ(b.convergence_delta, 1e-4);
    EXPECT_EQ(b.seed, 77u);
    EXPECT_EQ(b.threads, 2u);
    EXPECT_DOUBLE_EQ(b.solver.c_hinge, 4.0);

    const CascadePlan p = cfg.cascade_plan();
    EXPECT_EQ(p.num_partitions, 4);
    EXPECT_EQ(p.levels, 2);
    EXPECT_EQ(p.refilter_passes, 3);
    EXPECT_EQ(p.seed, 77u);
    EXPECT_EQ(p.threads, 2u);

    // Invalid downstream values surface as config errors at view time.
    RunConfig bad;
    bad.set("tolerance", "0");
    EXPECT_THROW(bad.solver_config(), config_error);
    RunConfig bad2;
    bad2.set("learning_rate", "-1");
    EXPECT_THROW(bad2.blt_config(), config_error);
}

}  // namespace
}  // namespace svmdsn
