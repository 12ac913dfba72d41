// Copyright 2026 The eeprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EEPROF_ERROR_H_
#define EEPROF_ERROR_H_

#include <stdexcept>
#include <string>

namespace eeprof {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, invalid configuration, precondition failures.
// The CLI maps these to exit status 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A trace or archive lacks the fields a request needs (e.g. a top-K-only
// archive asked for hidden-state similarity).
class CapabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Non-finite activations during a forward pass. Usually corrupt weights.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Cosine similarity involving a zero-norm vector.
class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

}  // namespace eeprof

#endif  // EEPROF_ERROR_H_
