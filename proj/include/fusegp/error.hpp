// Copyright 2026 The fusegp Authors
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

#ifndef FUSEGP_ERROR_HPP_
#define FUSEGP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fusegp {

/// Broad error classes. The CLI maps each class to a distinct exit code.
enum class ErrorKind {
  kInvalidArgument,  // bad call arguments / config
  kIo,               // file missing, unreadable, unwritable
  kData,             // schema or domain violation in input data
  kNumerical,        // factorization failure, non-finite values
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace fusegp

#endif  // FUSEGP_ERROR_HPP_
