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
#include <cstddef>
#include <vector>

#include "svmdsn/network.hpp"

namespace svmdsn {
namespace {

// A tiny deterministic two-layer binary network over 2-d inputs whose
// activations are easy to compute by hand.  Layer 0 has two single-plane
// groups, the output layer one.
Network hand_network() {
    Network net(2, 2, {{2, 1}, {1, 1}});
    // Layer 0 inputs: (x0, x1).
    net.set_svm(0, 0, 0, LinearHyperplane({1.0, 0.0}, 0.0));   // z = x0
    net.set_svm(0, 1, 0, LinearHyperplane({0.0, 2.0}, -0.5));  // z = 2 x1 - 0.5
    // Layer 1 inputs: (y00, y01, x0, x1).
    net.set_svm(1, 0, 0, LinearHyperplane({1.0, -1.0, 0.5, 0.0}, 0.25));
    return net;
}

TEST(NetworkConstruction, TracksLayerDimensions) {
    Network net(3, 10, {{4, 10}, {2, 10}, {1, 10}});
    EXPECT_EQ(net.raw_input_dim(), 3u);
    EXPECT_EQ(net.num_classes(), 10);
    EXPECT_EQ(net.num_layers(), 3u);
    EXPECT_FALSE(net.binary());
    // Each layer sees everything below it plus the raw input (Eq. 7), so the
    // input widths telescope: 3, 3 + 40, 3 + 40 + 20.
    EXPECT_EQ(net.layer_input_dim(0), 3u);
    EXPECT_EQ(net.layer_output_dim(0), 40u);
    EXPECT_EQ(net.layer_input_dim(1), 43u);
    EXPECT_EQ(net.layer_output_dim(1), 20u);
    EXPECT_EQ(net.layer_input_dim(2), 63u);
    EXPECT_EQ(net.layer_output_dim(2), 10u);
    // Freshly constructed planes are all-zero with matching dimensions.
    EXPECT_EQ(net.svm(2, 0, 9).dim(), 63u);
    EXPECT_EQ(net.svm(2, 0, 9).margin(Vector(63, 1.0)), 0.0);
}

TEST(NetworkConstruction, RejectsInvalidShapes) {
    EXPECT_THROW(Network(0, 2, {{1, 1}}), invariant_error);
    EXPECT_THROW(Network(2, 1, {{1, 1}}), invariant_error);
    EXPECT_THROW(Network(2, 2, {}), invariant_error);
    EXPECT_THROW(Network(2, 2, {{0, 1}}), invariant_error);
    // Single-plane groups encode a binary decision; they make no sense when
    // there are more than two classes.
    EXPECT_THROW(Network(2, 3, {{2, 1}}), invariant_error);
    // Multi-plane groups must carry one plane per class.
    EXPECT_THROW(Network(2, 3, {{2, 2}}), invariant_error);
    EXPECT_NO_THROW(Network(2, 2, {{2, 1}, {1, 2}}));
    EXPECT_NO_THROW(Network(2, 3, {{2, 3}, {1, 3}}));
}

TEST(NetworkAccessors, BoundsCheckedEverywhere) {
    Network net(2, 2, {{2, 1}, {1, 1}});
    EXPECT_THROW(net.block(2), index_error);
    EXPECT_THROW(net.layer_input_dim(2), index_error);
    EXPECT_THROW(net.layer_output_dim(7), index_error);
    EXPECT_THROW(net.svm(0, 2, 0), index_error);
    EXPECT_THROW(net.svm(0, 0, 1), index_error);
    EXPECT_THROW(net.svm(3, 0, 0), index_error);
    EXPECT_THROW(net.set_svm(0, 2, 0, LinearHyperplane({1.0, 1.0}, 0.0)),
                 index_error);
}

TEST(NetworkAccessors, SetSvmChecksTheLayerDimension) {
    Network net(2, 2, {{2, 1}, {1, 1}});
    // Layer 1 sees 2 stacked outputs + 2 raw inputs = 4 dims.
    EXPECT_THROW(net.set_svm(1, 0, 0, LinearHyperplane({1.0, 1.0}, 0.0)),
                 invariant_error);
    EXPECT_NO_THROW(
        net.set_svm(1, 0, 0, LinearHyperplane({1.0, 1.0, 0.0, 0.0}, 0.0)));
}

TEST(NetworkAccessors, VersionBumpsOnEveryMutation) {
    Network net(2, 2, {{1, 1}});
    const std::uint64_t v0 = net.version();
    net.set_svm(0, 0, 0, LinearHyperplane({1.0, 0.0}, 0.0));
    EXPECT_EQ(net.version(), v0 + 1);
    net.init_random(7);
    EXPECT_EQ(net.version(), v0 + 2);
}

TEST(Forward, MatchesAHandComputation) {
    const Network net = hand_network();
    const Vector raw = {0.4, 2.0};
    const ForwardTrace t = forward(net, raw);
    ASSERT_EQ(t.layers.size(), 2u);

    // Layer 0: z = (0.4, 2*2.0 - 0.5) = (0.4, 3.5); y = clamp = (0.4, 1.0).
    ASSERT_EQ(t.layers[0].z.size(), 2u);
    EXPECT_DOUBLE_EQ(t.layers[0].z[0], 0.4);
    EXPECT_DOUBLE_EQ(t.layers[0].z[1], 3.5);
    EXPECT_DOUBLE_EQ(t.layers[0].y[0], 0.4);
    EXPECT_DOUBLE_EQ(t.layers[0].y[1], 1.0);

    // Layer 1 input stacks the shaped outputs ahead of the raw features:
    // x = (0.4, 1.0, 0.4, 2.0).
    const Vector expected_x1 = {0.4, 1.0, 0.4, 2.0};
    EXPECT_EQ(t.layers[1].input, expected_x1);

    // z = 0.4 - 1.0 + 0.5*0.4 + 0 + 0.25 = -0.15.
    ASSERT_EQ(t.layers[1].z.size(), 1u);
    EXPECT_NEAR(t.layers[1].z[0], -0.15, 1e-15);
    EXPECT_DOUBLE_EQ(t.layers[1].y[0], shape(t.layers[1].z[0]));

    // The trace is stamped with the version it was computed against.
    EXPECT_EQ(t.network_version, net.version());
}

TEST(Forward, ValidatesItsInput) {
    const Network net = hand_network();
    EXPECT_THROW(forward(net, Vector{1.0}), shape_error);
    EXPECT_THROW(forward(net, Vector{1.0, 2.0, 3.0}), shape_error);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(forward(net, Vector{nan, 0.0}), validation_error);
}

TEST(AssembleInput, NewestOutputsFirstRawLast) {
    const Network net = hand_network();
    const Vector raw = {-0.3, 0.1};
    const ForwardTrace t = forward(net, raw);
    // assemble_input must reproduce exactly the inputs the forward pass used.
    EXPECT_EQ(assemble_input(t, 0, raw), t.layers[0].input);
    EXPECT_EQ(assemble_input(t, 1, raw), t.layers[1].input);
    // One step past the last layer is the input a hypothetical next layer
    // would see; it stacks the output layer's y in front.
    const Vector x2 = assemble_input(t, 2, raw);
    ASSERT_EQ(x2.size(), 1u + t.layers[1].input.size());
    EXPECT_EQ(x2[0], t.layers[1].y[0]);
    EXPECT_THROW(assemble_input(t, 3, raw), index_error);
}

TEST(AssembleInput, DescendingLayerOrderOnADeepStack) {
    // Three layers so the ordering y^(1), y^(0), raw is observable.
    Network net(1, 2, {{1, 1}, {1, 1}, {1, 1}});
    net.set_svm(0, 0, 0, LinearHyperplane({0.0}, 0.25));        // y0 = 0.25
    net.set_svm(1, 0, 0, LinearHyperplane({0.0, 0.0}, 0.5));    // y1 = 0.5
    net.set_svm(2, 0, 0, LinearHyperplane({0.0, 0.0, 0.0}, 0.0));
    const Vector raw = {-0.75};
    const ForwardTrace t = forward(net, raw);
    const Vector expected = {0.5, 0.25, -0.75};
    EXPECT_EQ(t.layers[2].input, expected);
    EXPECT_EQ(assemble_input(t, 2, raw), expected);
}

TEST(ClassScores, AveragesAcrossOutputGroups) {
    // 3-class net whose output layer has two groups; scores are the group
    // mean of the raw margins, not the shaped outputs.
    Network net(1, 3, {{2, 3}});
    net.set_svm(0, 0, 0, LinearHyperplane({0.0}, 2.0));
    net.set_svm(0, 0, 1, LinearHyperplane({0.0}, 0.2));
    net.set_svm(0, 0, 2, LinearHyperplane({0.0}, -1.0));
    net.set_svm(0, 1, 0, LinearHyperplane({0.0}, 1.0));
    net.set_svm(0, 1, 1, LinearHyperplane({0.0}, 0.6));
    net.set_svm(0, 1, 2, LinearHyperplane({0.0}, -3.0));
    const ForwardTrace t = forward(net, Vector{0.0});
    const Vector scores = class_scores(net, t);
    ASSERT_EQ(scores.size(), 3u);
    EXPECT_DOUBLE_EQ(scores[0], 1.5);   // mean(2.0, 1.0), unclamped
    EXPECT_DOUBLE_EQ(scores[1], 0.4);   // mean(0.2, 0.6)
    EXPECT_DOUBLE_EQ(scores[2], -2.0);  // mean(-1.0, -3.0)
    EXPECT_EQ(predict_from_trace(net, t), 0);
}

TEST(Predict, BinaryThresholdAndTieBreaking) {
    Network bin(1, 2, {{1, 1}});
    bin.set_svm(0, 0, 0, LinearHyperplane({1.0}, 0.0));
    EXPECT_EQ(predict(bin, Vector{0.5}), 1);
    EXPECT_EQ(predict(bin, Vector{-0.5}), 0);
    // Score exactly zero maps to class 1, mirroring sign(0) := +1.
    EXPECT_EQ(predict(bin, Vector{0.0}), 1);

    // Multi-class ties resolve to the lowest class index.
    Network tri(1, 3, {{1, 3}});
    tri.set_svm(0, 0, 0, LinearHyperplane({0.0}, 0.7));
    tri.set_svm(0, 0, 1, LinearHyperplane({0.0}, 0.7));
    tri.set_svm(0, 0, 2, LinearHyperplane({0.0}, 0.1));
    EXPECT_EQ(predict(tri, Vector{0.0}), 0);
}

TEST(ForwardBatch, AgreesWithSingleSampleForward) {
    Network net(3, 2, {{2, 1}, {1, 1}});
    net.init_random(11);
    Matrix raws(5, 3);
    Rng rng(99);
    for (double& v : raws.data) v = rng.uniform(-2.0, 2.0);

    const auto batch = forward_batch(net, raws);
    ASSERT_EQ(batch.size(), 5u);
    for (std::size_t k = 0; k < raws.rows; ++k) {
        const ForwardTrace single = forward(net, raws.row(k));
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            EXPECT_EQ(batch[k].layers[l].z, single.layers[l].z);
            EXPECT_EQ(batch[k].layers[l].y, single.layers[l].y);
        }
    }
    EXPECT_THROW(forward_batch(net, Matrix(2, 4)), shape_error);
}

TEST(ForwardBatch, ThreadCountDoesNotChangeResults) {
    Network net(4, 2, {{3, 1}, {1, 1}});
    net.init_random(5);
    Matrix raws(64, 4);
    Rng rng(123);
    for (double& v : raws.data) v = rng.gaussian();

    const auto one = forward_batch(net, raws, 1);
    const auto four = forward_batch(net, raws, 4);
    ASSERT_EQ(one.size(), four.size());
    for (std::size_t k = 0; k < one.size(); ++k)
        for (std::size_t l = 0; l < net.num_layers(); ++l)
            EXPECT_EQ(one[k].layers[l].z, four[k].layers[l].z);
}

TEST(InitRandom, DeterministicAndFanInScaled) {
    Network a(8, 2, {{4, 1}, {1, 1}});
    Network b(8, 2, {{4, 1}, {1, 1}});
    a.init_random(42);
    b.init_random(42);
    for (std::size_t l = 0; l < a.num_layers(); ++l)
        for (int g = 0; g < a.block(l).num_groups; ++g) {
            EXPECT_EQ(a.svm(l, g, 0).weights, b.svm(l, g, 0).weights);
            EXPECT_EQ(a.svm(l, g, 0).bias, 0.0);
        }

    // Weights stay within +-1/sqrt(fan_in) for each layer.
    for (std::size_t l = 0; l < a.num_layers(); ++l) {
        const double r = 1.0 / std::sqrt(static_cast<double>(a.layer_input_dim(l)));
        for (int g = 0; g < a.block(l).num_groups; ++g)
            for (double w : a.svm(l, g, 0).weights) {
                EXPECT_GE(w, -r);
                EXPECT_LT(w, r);
            }
    }

    Network c(8, 2, {{4, 1}, {1, 1}});
    c.init_random(43);
    EXPECT_NE(a.svm(0, 0, 0).weights, c.svm(0, 0, 0).weights);
}

TEST(SaturationRate, CountsStrictlySaturatedMargins) {
    Network net(1, 2, {{2, 1}});
    net.set_svm(0, 0, 0, LinearHyperplane({1.0}, 0.0));  // z = x
    net.set_svm(0, 1, 0, LinearHyperplane({3.0}, 0.0));  // z = 3x
    Matrix raws(2, 1);
    raws.data = {0.5, 1.0};
    const auto traces = forward_batch(net, raws);
    // Margins: (0.5, 1.5), (1.0, 3.0).  |z| > 1 strictly: 1.5 and 3.0 only;
    // the boundary value 1.0 is not saturated.
    EXPECT_DOUBLE_EQ(saturation_rate(net, traces, 0), 0.5);
    EXPECT_THROW(saturation_rate(net, traces, 1), index_error);
    EXPECT_THROW(saturation_rate(net, {}, 0), empty_input_error);
}

TEST(SaturationRate, RejectsTracesFromAnOlderNetwork) {
    Network net(1, 2, {{1, 1}});
    net.set_svm(0, 0, 0, LinearHyperplane({1.0}, 0.0));
    Matrix raws(1, 1);
    raws.data = {2.0};
    const auto traces = forward_batch(net, raws);
    net.set_svm(0, 0, 0, LinearHyperplane({-1.0}, 0.0));
    EXPECT_THROW(saturation_rate(net, traces, 0), state_error);
}

TEST(Evaluate, ConfusionMatrixAndErrorRate) {
    // Identity-ish 1-d classifier: predicts 1 when x >= 0.
    Network net(1, 2, {{1, 1}});
    net.set_svm(0, 0, 0, LinearHyperplane({1.0}, 0.0));
    Matrix x(4, 1);
    x.data = {-1.0, -0.2, 0.3, 0.8};
    const std::vector<int> labels = {0, 1, 1, 0};  // two of four are wrong
    const EvalResult res = evaluate(net, x, labels);
    EXPECT_DOUBLE_EQ(res.error_rate, 0.5);
    ASSERT_EQ(res.confusion.size(), 2u);
    EXPECT_EQ(res.confusion[0][0], 1u);  // -1.0 labeled 0, predicted 0
    EXPECT_EQ(res.confusion[1][0], 1u);  // -0.2 labeled 1, predicted 0
    EXPECT_EQ(res.confusion[1][1], 1u);  // 0.3 labeled 1, predicted 1
    EXPECT_EQ(res.confusion[0][1], 1u);  // 0.8 labeled 0, predicted 1
    ASSERT_EQ(res.saturation.size(), 1u);

    std::size_t total = 0;
    for (const auto& row : res.confusion)
        for (std::size_t c : row) total += c;
    EXPECT_EQ(total, x.rows);
}

TEST(Evaluate, ValidatesLabelsAndShapes) {
    Network net(1, 2, {{1, 1}});
    Matrix x(2, 1);
    x.data = {0.0, 1.0};
    EXPECT_THROW(evaluate(net, x, std::vector<int>{0}), shape_error);
    EXPECT_THROW(evaluate(net, Matrix(0, 1), std::vector<int>{}),
                 empty_input_error);
    EXPECT_THROW(evaluate(net, x, std::vector<int>{0, 2}), validation_error);
    EXPECT_THROW(evaluate(net, x, std::vector<int>{-1, 0}), validation_error);
}

}  // namespace
}  // namespace svmdsn
