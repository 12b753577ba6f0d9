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

#include "ffsim/manifest.h"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "ffsim/errors.h"
#include "json.hpp"

namespace ffsim {

std::string sha256_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "' for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw ConfigError("SHA-256 initialisation failed");
    }
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &length);
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

void RunManifest::add_output(const std::filesystem::path &path) {
    outputs.push_back({path.string(), sha256_file(path), std::filesystem::file_size(path)});
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["seed"] = seed;
    j["start_time"] = start_time;
    j["end_time"] = end_time;
    j["config"] = config_echo;
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto &o : outputs) {
        j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    }
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string &text) {
    RunManifest m;
    try {
        auto j = nlohmann::json::parse(text);
        m.tool_version = j.at("tool_version").get<std::string>();
        m.command = j.value("command", "");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.start_time = j.value("start_time", "");
        m.end_time = j.value("end_time", "");
        m.config_echo = j.at("config").get<std::string>();
        for (const auto &o : j.at("outputs")) {
            m.outputs.push_back(
                {o.at("path").get<std::string>(), o.at("sha256").get<std::string>(), o.at("bytes").get<std::uint64_t>()});
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

std::vector<std::string> verify_manifest(const RunManifest &manifest) {
    std::vector<std::string> mismatched;
    for (const auto &o : manifest.outputs) {
        std::error_code ec;
        if (!std::filesystem::exists(o.path, ec) || sha256_file(o.path) != o.sha256) {
            mismatched.push_back(o.path);
        }
    }
    return mismatched;
}

std::string utc_now_iso8601() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace ffsim
