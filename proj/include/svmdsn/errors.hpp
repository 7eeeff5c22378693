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

#include <stdexcept>
#include <string>
#include <utility>

namespace svmdsn {

// Every error raised by the library carries a short machine-parsable
// category string.  The CLI prints it as `error: <category>: <message>`
// so scripts can branch on the category without parsing prose.
class error : public std::runtime_error {
public:
    error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Vector/matrix dimension disagreements.
class shape_error : public error {
public:
    explicit shape_error(const std::string& message) : error("shape", message) {}
};

// Values outside their documented domain (labels, non-finite inputs, ...).
class validation_error : public error {
public:
    explicit validation_error(const std::string& message) : error("validation", message) {}
};

// An operation that requires at least one sample received none.
class empty_input_error : public error {
public:
    explicit empty_input_error(const std::string& message) : error("empty-input", message) {}
};

// Bad on-disk bytes: magic numbers, truncation, malformed text records.
class format_error : public error {
public:
    explicit format_error(const std::string& message) : error("format", message) {}
};

// A model file whose declared version this build does not understand.
class version_error : public error {
public:
    explicit version_error(const std::string& message) : error("unsupported-version", message) {}
};

// Structural invariants of a network or trace are broken (tampered model
// files, inconsistent layer dimensions).
class invariant_error : public error {
public:
    explicit invariant_error(const std::string& message) : error("invariant-violation", message) {}
};

// Configuration keys or values that cannot be honored.
class config_error : public error {
public:
    explicit config_error(const std::string& message) : error("config", message) {}
};

// Layer / group / SVM indices outside the network, grid indices, etc.
class index_error : public error {
public:
    explicit index_error(const std::string& message) : error("index", message) {}
};

// Using results across mutations: stale forward traces, mismatched
// network versions between a trace and the network it came from.
class state_error : public error {
public:
    explicit state_error(const std::string& message) : error("state", message) {}
};

// Filesystem-level failures (missing file, unwritable path).
class io_error : public error {
public:
    explicit io_error(const std::string& message) : error("io", message) {}
};

// Interpretability helpers that only work on specific input dimensions.
class dimension_error : public error {
public:
    explicit dimension_error(const std::string& message)
        : error("unsupported-dimension", message) {}
};

}  // namespace svmdsn
