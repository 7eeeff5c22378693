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

// Dense Gram matrices for kernel row lookups during SMO.  Layer inputs in
// this architecture nest: x^(l+1) = [y^(l) | x^(l)], so the Gram of one
// layer's inputs is the previous layer's Gram plus a low-rank update from
// the new outputs.  Both the full product and the update go through Eigen,
// which is single-threaded here and therefore bitwise reproducible.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "svmdsn/matrix.hpp"

namespace svmdsn {
namespace detail {

using ERowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// G = X X^T, flattened row-major n x n.
inline std::vector<double> compute_gram(const Matrix& X) {
    std::vector<double> gram(X.rows * X.rows);
    Eigen::Map<const ERowMajor> xm(X.data.data(), static_cast<Eigen::Index>(X.rows),
                                   static_cast<Eigen::Index>(X.cols));
    Eigen::Map<ERowMajor> gm(gram.data(), static_cast<Eigen::Index>(X.rows),
                             static_cast<Eigen::Index>(X.rows));
    gm.noalias() = xm * xm.transpose();
    return gram;
}

// gram += Y Y^T for the next layer's extra coordinates.
inline void add_outer(std::vector<double>& gram, const Matrix& Y) {
    Eigen::Map<const ERowMajor> ym(Y.data.data(), static_cast<Eigen::Index>(Y.rows),
                                   static_cast<Eigen::Index>(Y.cols));
    Eigen::Map<ERowMajor> gm(gram.data(), static_cast<Eigen::Index>(Y.rows),
                             static_cast<Eigen::Index>(Y.rows));
    gm.noalias() += ym * ym.transpose();
}

// Whether an n x n Gram fits under the configured cap.
inline bool gram_fits(std::size_t n, std::size_t limit_mb) {
    return n * n * sizeof(double) <= (limit_mb << 20);
}

}  // namespace detail
}  // namespace svmdsn
