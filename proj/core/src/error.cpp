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

#include "fsband/error.hpp"

#include <utility>

namespace fsband {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptData: return "CorruptData";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kPatchTooLarge: return "PatchTooLarge";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyMap: return "EmptyMap";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kDegenerateDataset: return "DegenerateDataset";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kUnknownKind: return "UnknownKind";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           const std::string& path) {
  std::string out = to_string(code);
  out += ": ";
  out += message;
  if (!path.empty()) {
    out += " [";
    out += path;
    out += "]";
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string path)
    : std::runtime_error(format_message(code, message, path)),
      code_(code),
      path_(std::move(path)) {}

}  // namespace fsband
