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

// Umbrella header for the svmdsn library.

#include "svmdsn/cascade.hpp"
#include "svmdsn/config.hpp"
#include "svmdsn/dataset.hpp"
#include "svmdsn/errors.hpp"
#include "svmdsn/gram.hpp"
#include "svmdsn/hyperplane.hpp"
#include "svmdsn/interpret.hpp"
#include "svmdsn/matrix.hpp"
#include "svmdsn/model_io.hpp"
#include "svmdsn/network.hpp"
#include "svmdsn/parallel.hpp"
#include "svmdsn/qp_reference.hpp"
#include "svmdsn/rng.hpp"
#include "svmdsn/solver.hpp"
#include "svmdsn/training.hpp"
