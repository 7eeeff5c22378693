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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "svmdsn/errors.hpp"
#include "svmdsn/matrix.hpp"

namespace svmdsn {

// A single linear decision function u(x) = w.x + b.
struct LinearHyperplane {
    Vector weights;
    double bias = 0.0;

    LinearHyperplane() = default;

    LinearHyperplane(Vector w, double b) : weights(std::move(w)), bias(b) {
        if (weights.empty())
            throw validation_error("hyperplane needs at least one weight");
        if (!all_finite(weights) || !std::isfinite(bias))
            throw validation_error("hyperplane parameters must be finite");
    }

    std::size_t dim() const { return weights.size(); }

    // Raw margin w.x + b.
    double margin(std::span<const double> x) const {
        if (x.size() != weights.size())
            throw shape_error("margin: input has dimension " +
                              std::to_string(x.size()) + ", hyperplane expects " +
                              std::to_string(weights.size()));
        return dot(weights, x) + bias;
    }
};

// Shaping function: clamp the margin into [-1, 1].  This is the module
// output that gets stacked into the next layer's input.
inline double shape(double z) {
    if (z > 1.0) return 1.0;
    if (z < -1.0) return -1.0;
    return z;
}

// Subderivative of shape(): 1 inside the clamp (boundary included), else 0.
inline double shape_derivative(double z) {
    return std::abs(z) <= 1.0 ? 1.0 : 0.0;
}

// Hard decision.  sign(0) is +1 throughout the library.
inline int decide(double z) { return z >= 0.0 ? +1 : -1; }

inline int decide(const LinearHyperplane& h, std::span<const double> x) {
    return decide(h.margin(x));
}

// Confidence g(x) = min(1, |w.x + b|): distance to the decision boundary,
// saturated at the margin width.
inline double confidence(double z) { return std::min(1.0, std::abs(z)); }

inline double confidence(const LinearHyperplane& h, std::span<const double> x) {
    return confidence(h.margin(x));
}

// Confidence-weighted output f(x) * g(x).  Algebraically this collapses to
// the shaping function applied to the margin, and is computed that way so
// the identity holds bitwise.
inline double weighted_output(double z) { return shape(z); }

inline double weighted_output(const LinearHyperplane& h, std::span<const double> x) {
    return shape(h.margin(x));
}

}  // namespace svmdsn
