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

#ifndef FSBAND_TOOLS_CLI_HPP_
#define FSBAND_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace fsband::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitModel = 3,
  kExitDegenerate = 4,
};

// Entry point of the `fsband` tool. Subcommands: detect, train, synth,
// eval, ablate, bench.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);
int run(int argc, char** argv);

}  // namespace fsband::tools

#endif  // FSBAND_TOOLS_CLI_HPP_
