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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "svmdsn/interpret.hpp"

namespace svmdsn {
namespace {

// One-layer net, single plane z = x0: confidence at (x, y) is min(1, |x|).
Network axis_net() {
    Network net(2, 2, {{1, 1}});
    net.set_svm(0, 0, 0, LinearHyperplane({1.0, 0.0}, 0.0));
    return net;
}

TEST(AverageConfidence, MatchesTheHandFormula) {
    Network net(2, 2, {{2, 1}});
    net.set_svm(0, 0, 0, LinearHyperplane({1.0, 0.0}, 0.0));   // |x|
    net.set_svm(0, 1, 0, LinearHyperplane({0.0, 3.0}, 0.0));   // min(1, |3y|)
    const Vector p = {0.4, 0.5};
    // Plane confidences: 0.4 and min(1, 1.5) = 1.0; average 0.7.
    EXPECT_DOUBLE_EQ(average_confidence(net, 0, p), 0.7);
    EXPECT_THROW(average_confidence(net, 1, p), index_error);
}

TEST(ConfidenceMap, GridGeometryAndValues) {
    const Network net = axis_net();
    MapBounds b;
    b.x_min = -1.0;
    b.y_min = -1.0;
    b.x_max = 1.0;
    b.y_max = 1.0;
    const ConfidenceMap map = confidence_map(net, b, 5);
    ASSERT_EQ(map.layers.size(), 1u);
    const Matrix& g = map.layers[0];
    ASSERT_EQ(g.rows, 5u);
    ASSERT_EQ(g.cols, 5u);
    // Column j sits at x = -1 + j * 0.5; confidence = |x| independent of y.
    const double expect[5] = {1.0, 0.5, 0.0, 0.5, 1.0};
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c)
            EXPECT_DOUBLE_EQ(g.at(r, c), expect[c]) << "r=" << r << " c=" << c;
}

TEST(ConfidenceMap, RefinementKeepsOldGridPointsBitwise) {
    Network net(2, 2, {{2, 1}, {1, 1}});
    net.init_random(21);
    MapBounds b;
    const ConfidenceMap coarse = confidence_map(net, b, 50);
    const ConfidenceMap fine = confidence_map(net, b, 99);  // 2*50 - 1
    for (std::size_t l = 0; l < coarse.layers.size(); ++l)
        for (std::size_t r = 0; r < 50; ++r)
            for (std::size_t c = 0; c < 50; ++c)
                EXPECT_EQ(coarse.layers[l].at(r, c), fine.layers[l].at(2 * r, 2 * c));
}

TEST(ConfidenceMap, ThreadCountDoesNotChangeTheGrid) {
    Network net(2, 2, {{3, 1}, {1, 1}});
    net.init_random(33);
    MapBounds b;
    const ConfidenceMap one = confidence_map(net, b, 40, 1);
    const ConfidenceMap four = confidence_map(net, b, 40, 4);
    for (std::size_t l = 0; l < one.layers.size(); ++l)
        EXPECT_EQ(one.layers[l].data, four.layers[l].data);
}

TEST(ConfidenceMap, ValidatesItsArguments) {
    Network non2d(3, 2, {{1, 1}});
    MapBounds b;
    EXPECT_THROW(confidence_map(non2d, b, 10), dimension_error);

    const Network net = axis_net();
    EXPECT_THROW(confidence_map(net, b, 1), config_error);
    MapBounds flipped;
    flipped.x_min = 2.0;
    flipped.x_max = -2.0;
    EXPECT_THROW(confidence_map(net, flipped, 10), config_error);
}

TEST(MapWriters, CsvIsTopRowAtYMaxFullPrecision) {
    const Network net = axis_net();
    MapBounds b;
    b.x_min = 0.0;
    b.y_min = 0.0;
    b.x_max = 0.5;  // confidences stay below saturation
    b.y_max = 1.0;
    const ConfidenceMap map = confidence_map(net, b, 3);

    const auto dir = std::filesystem::temp_directory_path() / "svmdsn_map_csv";
    std::filesystem::create_directories(dir);
    const std::string p = (dir / "layer.csv").string();
    write_map_csv(map, 0, p);
    std::ifstream in(p);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 3u);
    // Every row is x = {0, 0.25, 0.5} (y does not matter for this net).
    EXPECT_EQ(lines[0], "0,0.25,0.5");
    EXPECT_EQ(lines[1], "0,0.25,0.5");
    EXPECT_EQ(lines[2], "0,0.25,0.5");
    EXPECT_THROW(write_map_csv(map, 3, p), index_error);
    std::filesystem::remove_all(dir);
}

TEST(MapWriters, PgmHeaderAndPixelScale) {
    const Network net = axis_net();
    MapBounds b;
    b.x_min = -1.0;
    b.y_min = -1.0;
    b.x_max = 1.0;
    b.y_max = 1.0;
    const ConfidenceMap map = confidence_map(net, b, 3);

    const auto dir = std::filesystem::temp_directory_path() / "svmdsn_map_pgm";
    std::filesystem::create_directories(dir);
    const std::string p = (dir / "layer.pgm").string();
    write_map_pgm(map, 0, p);
    std::ifstream in(p);
    std::string magic;
    std::size_t w = 0, h = 0;
    int maxval = 0;
    in >> magic >> w >> h >> maxval;
    EXPECT_EQ(magic, "P2");
    EXPECT_EQ(w, 3u);
    EXPECT_EQ(h, 3u);
    EXPECT_EQ(maxval, 255);
    // Confidence row is (1, 0, 1) -> pixels (255, 0, 255) on every line.
    for (int r = 0; r < 3; ++r) {
        int a = -1, m = -1, z = -1;
        in >> a >> m >> z;
        EXPECT_EQ(a, 255);
        EXPECT_EQ(m, 0);
        EXPECT_EQ(z, 255);
    }
    std::filesystem::remove_all(dir);
}

TEST(SupportVectors, HingeAndTubeMembership) {
    // Plane u(x) = x.  Theta samples support iff t*u <= 1 + tol; tube
    // samples support iff |u - label| >= eps - tol.
    const LinearHyperplane h({1.0}, 0.0);
    const double eps = 0.2;
    std::vector<VirtualSample> samples;
    samples.push_back({{2.0}, 1.0, true});      // margin 2 > 1: not a support
    samples.push_back({{1.0}, 1.0, true});      // exactly on the margin: support
    samples.push_back({{0.5}, 1.0, true});      // inside the margin: support
    samples.push_back({{-3.0}, -1.0, true});    // margin 3: not a support
    samples.push_back({{0.35}, 0.3, false});    // |u-t| = 0.05 < eps: interior
    samples.push_back({{0.5}, 0.3, false});     // exactly on the tube: support
    samples.push_back({{0.9}, 0.3, false});     // outside the tube: support
    const auto sv = support_vectors(h, samples, eps, 1e-9);
    EXPECT_EQ(sv, (std::vector<std::uint32_t>{1, 2, 5, 6}));
}

TEST(SupportVectors, ValidatesArguments) {
    const LinearHyperplane h({1.0}, 0.0);
    std::vector<VirtualSample> samples;
    samples.push_back({{0.5}, 0.3, false});
    EXPECT_THROW(support_vectors(h, samples, -0.1), validation_error);
    EXPECT_THROW(support_vectors(h, samples, 0.1, -1.0), validation_error);
    EXPECT_THROW(support_vectors(h, {}, 0.1), empty_input_error);
    // Theta flags must match |label| == 1 exactly.
    std::vector<VirtualSample> bad;
    bad.push_back({{0.5}, 0.3, true});
    EXPECT_THROW(support_vectors(h, bad, 0.1), validation_error);
}

}  // namespace
}  // namespace svmdsn
