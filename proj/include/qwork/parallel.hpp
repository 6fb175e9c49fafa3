// Copyright 2026 The qwork Authors
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

#include <cstddef>
#include <functional>

namespace qwork {

// Worker count used by the library kernels. Defaults to the QWORK_THREADS
// environment variable, else std::thread::hardware_concurrency().
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, n). Tasks are claimed dynamically, so callers
// must write results into per-task slots and reduce them in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qwork
