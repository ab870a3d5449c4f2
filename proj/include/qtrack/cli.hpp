// Copyright 2026 The qtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QTRACK_CLI_HPP
#define QTRACK_CLI_HPP

#include <string>
#include <vector>

namespace qtrack {

// Full command-line entry point. Returns the process exit status; 0 means
// every requested output file was written and flushed.
int run_cli(int argc, const char* const* argv);

// Convenience overload for in-process invocation (args exclude argv[0]).
int run_cli(const std::vector<std::string>& args);

}  // namespace qtrack

#endif  // QTRACK_CLI_HPP
