// Copyright 2026 The Paddy Diagnosis Authors
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace paddy::cli {

/// Runs `paddyctl` with the given arguments (without the program name).
/// Returns the process exit code: 0 on success, 2 for invalid input, 3 for
/// a refused operation and 1 for anything else.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace paddy::cli
