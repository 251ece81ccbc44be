// Copyright 2026 The SAU Toolkit Authors
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

#ifndef SAU_ERROR_HPP_
#define SAU_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sau {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, inconsistent shapes, out-of-range configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures and malformed on-disk artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sau

#endif  // SAU_ERROR_HPP_
