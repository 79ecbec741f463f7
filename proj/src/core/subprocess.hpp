// Copyright 2026 The nifuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Spawn-per-execution backend for native targets.
//
// Protocol seen by the target:
//   argv[1]          path of a file holding the input in container format
//   NIFUZZ_SHM_ID    System V shared memory id of the coverage map
//   NIFUZZ_MAP_SIZE  number of counters in that map
// stdout and stderr are captured through pipes.

#ifndef NIFUZZ_CORE_SUBPROCESS_HPP_
#define NIFUZZ_CORE_SUBPROCESS_HPP_

#include <chrono>
#include <cstdint>
#include <string>

#include "core/executor.hpp"

namespace nifuzz {

inline constexpr const char* kShmEnvVar = "NIFUZZ_SHM_ID";
inline constexpr const char* kMapSizeEnvVar = "NIFUZZ_MAP_SIZE";

class SubprocessBackend final : public TargetBackend {
 public:
  // Throws ConfigError if `path` is not an executable file.
  SubprocessBackend(std::string path, std::chrono::milliseconds timeout,
                    std::size_t map_size = kDefaultMapSize,
                    std::size_t output_cap = kDefaultOutputCap);
  ~SubprocessBackend() override;

  SubprocessBackend(const SubprocessBackend&) = delete;
  SubprocessBackend& operator=(const SubprocessBackend&) = delete;

  std::size_t map_size() const override { return map_size_; }
  std::string description() const override { return path_; }
  int shm_id() const { return shm_id_; }

 protected:
  // Throws TargetError when the executable cannot be spawned.
  ExecutionResult do_run(const StructuredInput& input) override;

 private:
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::size_t map_size_;
  std::size_t output_cap_;
  int shm_id_ = -1;
  std::uint8_t* shm_ = nullptr;
  std::string work_dir_;
  std::string input_path_;
};

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_SUBPROCESS_HPP_
