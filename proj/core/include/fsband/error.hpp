// Copyright 2026 The fsband Authors. All rights reserved.
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

#ifndef FSBAND_ERROR_HPP_
#define FSBAND_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fsband {

enum class ErrorCode {
  kFileNotFound,
  kUnsupportedFormat,
  kCorruptData,
  kIo,
  kInvalidArgument,
  kPatchTooLarge,
  kNonFiniteInput,
  kShapeMismatch,
  kLengthMismatch,
  kEmptyInput,
  kEmptyMap,
  kSingleClass,
  kDegenerateDataset,
  kVersionMismatch,
  kChecksumMismatch,
  kUnknownKind,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library. `path()` is set for file-backed errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace fsband

#endif  // FSBAND_ERROR_HPP_
