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
#include <limits>

#include "svmdsn/hyperplane.hpp"

namespace svmdsn {
namespace {

TEST(Shape, ClampsOutsideUnitInterval) {
    EXPECT_EQ(shape(0.3), 0.3);
    EXPECT_EQ(shape(-0.99), -0.99);
    EXPECT_EQ(shape(1.0), 1.0);
    EXPECT_EQ(shape(-1.0), -1.0);
    EXPECT_EQ(shape(2.5), 1.0);
    EXPECT_EQ(shape(-17.0), -1.0);
}

TEST(Shape, DerivativeIsIndicatorOfTheLinearRegion) {
    EXPECT_EQ(shape_derivative(0.0), 1.0);
    EXPECT_EQ(shape_derivative(0.999), 1.0);
    // The convention at the kink itself: |z| == 1 still counts as linear.
    EXPECT_EQ(shape_derivative(1.0), 1.0);
    EXPECT_EQ(shape_derivative(-1.0), 1.0);
    EXPECT_EQ(shape_derivative(1.0000001), 0.0);
    EXPECT_EQ(shape_derivative(-3.0), 0.0);
}

TEST(Decide, SignConventionAtZero) {
    EXPECT_EQ(decide(0.7), 1);
    EXPECT_EQ(decide(-0.7), -1);
    // sign(0) := +1 so that every input gets a class.
    EXPECT_EQ(decide(0.0), 1);
}

TEST(Confidence, SaturatesAtOne) {
    EXPECT_EQ(confidence(0.0), 0.0);
    EXPECT_EQ(confidence(0.25), 0.25);
    EXPECT_EQ(confidence(-0.25), 0.25);
    EXPECT_EQ(confidence(1.0), 1.0);
    EXPECT_EQ(confidence(-8.0), 1.0);
}

TEST(WeightedOutput, EqualsConfidenceTimesDecision) {
    // Eq. (6) collapses to the shaping function; check the identity holds
    // exactly for both signs and in saturation.
    for (double z : {-2.0, -1.0, -0.4, 0.0, 0.4, 1.0, 2.0}) {
        EXPECT_EQ(weighted_output(z), confidence(z) * decide(z));
        EXPECT_EQ(weighted_output(z), shape(z));
    }
}

TEST(LinearHyperplane, MarginIsAffineForm) {
    LinearHyperplane h({2.0, -1.0}, 0.5);
    EXPECT_DOUBLE_EQ(h.margin(Vector{1.0, 1.0}), 1.5);
    EXPECT_DOUBLE_EQ(h.margin(Vector{0.0, 0.0}), 0.5);
    EXPECT_DOUBLE_EQ(h.margin(Vector{-1.0, 2.0}), -3.5);
}

TEST(LinearHyperplane, RejectsDimensionMismatch) {
    LinearHyperplane h({1.0, 2.0, 3.0}, 0.0);
    EXPECT_THROW(h.margin(Vector{1.0, 2.0}), shape_error);
}

TEST(LinearHyperplane, RejectsNonFiniteParameters) {
    EXPECT_THROW(LinearHyperplane({1.0, std::numeric_limits<double>::infinity()}, 0.0),
                 validation_error);
    EXPECT_THROW(LinearHyperplane({1.0}, std::nan("")), validation_error);
}

TEST(LinearHyperplane, EmptyWeightVectorIsRejected) {
    EXPECT_THROW(LinearHyperplane(Vector{}, 0.0), validation_error);
}

}  // namespace
}  // namespace svmdsn
