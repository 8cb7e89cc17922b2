// Copyright (c) 2026 The fva Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FVA_CLI_COMMANDS_H_
#define FVA_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace fva {
namespace cli {

struct CommandArgs {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
};

// Each command throws fva::Error on failure.
void CmdSynth(const CommandArgs& a, std::ostream& log);
void CmdTrain(const CommandArgs& a, std::ostream& log);
void CmdCrossVal(const CommandArgs& a, std::ostream& log);
void CmdPretrainFinetune(const CommandArgs& a, std::ostream& log);
void CmdScenarios(const CommandArgs& a, std::ostream& log);
void CmdEval(const CommandArgs& a, std::ostream& log);
void CmdXAttn(const CommandArgs& a, std::ostream& log);

// Entry point: parses argv, runs the subcommand and maps errors to exit
// codes (0 ok, 2 config, 3 protocol, 4 data/schema, 5 numeric/internal).
int Main(int argc, char** argv);

}  // namespace cli
}  // namespace fva

#endif  // FVA_CLI_COMMANDS_H_
