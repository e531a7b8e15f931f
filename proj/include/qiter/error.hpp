// Copyright 2026 The qiter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qiter {

// Base for every error raised by the library. Callers that only care about
// "something went wrong numerically or structurally" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Block labels or dimensions that do not line up.
class PartitionError : public Error {
 public:
  using Error::Error;
};

// An iterative scheme hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The execution-formula series blew up or produced non-finite values.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t term_index)
      : Error(what), term_index_(term_index) {}
  std::size_t term_index() const noexcept { return term_index_; }

 private:
  std::size_t term_index_;
};

// The kernel-image witnesses do not exist (inclusions violated).
class NotKiTraceableError : public Error {
 public:
  NotKiTraceableError(const std::string& what, double image_residual,
                      double kernel_residual)
      : Error(what),
        image_residual_(image_residual),
        kernel_residual_(kernel_residual) {}
  double image_residual() const noexcept { return image_residual_; }
  double kernel_residual() const noexcept { return kernel_residual_; }

 private:
  double image_residual_;
  double kernel_residual_;
};

// Two routes that must agree on contraction inputs did not.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qiter
