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

#ifndef FSBAND_PARALLEL_HPP_
#define FSBAND_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace fsband {

// Number of workers for a requested job count; <= 0 means "all cores".
int resolve_jobs(int jobs) noexcept;

// Runs fn(i) for i in [0, n) on up to `jobs` threads using contiguous static
// chunks. The first exception thrown by any worker is rethrown. Callers that
// need deterministic results write to index-addressed slots and reduce in
// index order afterwards.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace fsband

#endif  // FSBAND_PARALLEL_HPP_
