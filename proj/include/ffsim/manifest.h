// Copyright 2026 The ffsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FFSIM_MANIFEST_H
#define FFSIM_MANIFEST_H

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ffsim {

inline constexpr const char *kToolVersion = "1.0.0";

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path &path);

struct ManifestOutput {
    std::string path;
    std::string sha256;
    std::uint64_t bytes = 0;
};

/// Provenance record written next to every simulation run.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::string config_echo;
    std::uint64_t seed = 0;
    std::string start_time;  // ISO-8601 UTC
    std::string end_time;
    std::vector<ManifestOutput> outputs;

    /// Hashes and records an emitted file.
    void add_output(const std::filesystem::path &path);
    std::string to_json() const;
    static RunManifest from_json(const std::string &text);
};

/// Paths whose current digest differs from the manifest (empty when all match).
std::vector<std::string> verify_manifest(const RunManifest &manifest);

std::string utc_now_iso8601();

}  // namespace ffsim

#endif
