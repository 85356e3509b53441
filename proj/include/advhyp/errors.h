// Copyright 2026 The advhyp Authors
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

#ifndef ADVHYP_ERRORS_H_
#define ADVHYP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace advhyp {

// Invalid input: bad PMF, negative distortion, missing game parameter, ...
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Alphabet sizes of two operands disagree.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An exact computation would exceed its enumeration budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace advhyp

#endif  // ADVHYP_ERRORS_H_
