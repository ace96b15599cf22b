// Copyright 2026 The AssertForge Authors
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

#ifndef ASSERTFORGE_CLI_H_
#define ASSERTFORGE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace assertforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `args` excludes the program name. Flags given in a
// --config file (flat key=value, keys named like the flags) are applied
// first so command-line flags override them.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

int Main(int argc, char** argv);

}  // namespace assertforge::cli

#endif  // ASSERTFORGE_CLI_H_
