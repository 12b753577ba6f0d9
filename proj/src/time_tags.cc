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

#include "ffsim/time_tags.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ffsim/errors.h"

namespace ffsim {

namespace {

void put_u32(char *dst, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

void put_u64(char *dst, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t get_u32(const char *src) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(src[i])) << (8 * i);
    return v;
}

std::uint64_t get_u64(const char *src) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[i])) << (8 * i);
    return v;
}

Channel channel_from_byte(unsigned value) {
    if (value >= kNumChannels) {
        throw ParameterError("unknown channel id " + std::to_string(value) + " in tag data");
    }
    return static_cast<Channel>(value);
}

template <typename T>
T parse_number(std::string_view text, const char *what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParameterError(std::string("malformed ") + what + " '" + std::string(text) + "' in tag CSV");
    }
    return value;
}

}  // namespace

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::kHeraldTrigger:
            return "herald";
        case Channel::kHbtA:
            return "hbt_a";
        case Channel::kHbtB:
            return "hbt_b";
    }
    return "unknown";
}

Channel parse_channel(std::string_view text) {
    if (text == "herald" || text == "0") return Channel::kHeraldTrigger;
    if (text == "hbt_a" || text == "a" || text == "1") return Channel::kHbtA;
    if (text == "hbt_b" || text == "b" || text == "2") return Channel::kHbtB;
    throw ParameterError("unknown channel '" + std::string(text) + "' (expected herald|hbt_a|hbt_b)");
}

std::array<std::uint64_t, kNumChannels> TagStream::channel_counts() const {
    std::array<std::uint64_t, kNumChannels> counts{};
    for (const auto &tag : tags) {
        ++counts[static_cast<std::size_t>(tag.channel)];
    }
    return counts;
}

std::vector<std::uint64_t> TagStream::timestamps(Channel channel) const {
    std::vector<std::uint64_t> out;
    for (const auto &tag : tags) {
        if (tag.channel == channel) out.push_back(tag.timestamp_ps);
    }
    return out;
}

void write_tags_binary(std::ostream &out, const std::vector<TimeTagRecord> &tags) {
    char header[kTagFileHeaderBytes] = {};
    std::copy(kTagFileMagic.begin(), kTagFileMagic.end(), header);
    put_u32(header + 8, kTagFileVersion);
    put_u32(header + 12, 0);
    out.write(header, sizeof header);

    constexpr std::size_t kChunk = 4096;
    std::vector<char> buffer(kChunk * kTagRecordBytes);
    for (std::size_t start = 0; start < tags.size(); start += kChunk) {
        std::size_t n = std::min(kChunk, tags.size() - start);
        std::fill(buffer.begin(), buffer.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            char *rec = buffer.data() + i * kTagRecordBytes;
            rec[0] = static_cast<char>(tags[start + i].channel);
            put_u64(rec + 4, tags[start + i].timestamp_ps);
        }
        out.write(buffer.data(), static_cast<std::streamsize>(n * kTagRecordBytes));
    }
    if (!out) {
        throw ConfigError("failed writing binary tag stream");
    }
}

std::vector<TimeTagRecord> read_tags_binary(std::istream &in) {
    char header[kTagFileHeaderBytes];
    if (!in.read(header, sizeof header)) {
        throw ParameterError("tag file too short for header");
    }
    if (!std::equal(kTagFileMagic.begin(), kTagFileMagic.end(), header)) {
        throw ParameterError("not a tag file (bad magic)");
    }
    if (std::uint32_t version = get_u32(header + 8); version != kTagFileVersion) {
        throw ParameterError("unsupported tag file version " + std::to_string(version));
    }
    std::vector<TimeTagRecord> tags;
    char rec[kTagRecordBytes];
    while (in.read(rec, sizeof rec)) {
        if (rec[1] != 0 || rec[2] != 0 || rec[3] != 0) {
            throw ParameterError("reserved bytes set in tag record");
        }
        tags.push_back({channel_from_byte(static_cast<unsigned char>(rec[0])), get_u64(rec + 4)});
    }
    if (in.gcount() != 0) {
        throw ParameterError("truncated record at end of tag file");
    }
    return tags;
}

void write_tags_csv(std::ostream &out, const std::vector<TimeTagRecord> &tags) {
    out << "channel,timestamp_ps\n";
    for (const auto &tag : tags) {
        out << static_cast<unsigned>(tag.channel) << "," << tag.timestamp_ps << "\n";
    }
}

std::vector<TimeTagRecord> read_tags_csv(std::istream &in) {
    std::vector<TimeTagRecord> tags;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "channel,timestamp_ps") continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParameterError("tag CSV row without comma: '" + line + "'");
        }
        std::string_view view(line);
        auto channel = parse_number<unsigned>(view.substr(0, comma), "channel");
        auto ts = parse_number<std::uint64_t>(view.substr(comma + 1), "timestamp");
        tags.push_back({channel_from_byte(channel), ts});
    }
    return tags;
}

void save_tags(const std::filesystem::path &path, const std::vector<TimeTagRecord> &tags) {
    bool csv = path.extension() == ".csv";
    std::ofstream out(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open '" + path.string() + "' for writing");
    }
    if (csv) {
        write_tags_csv(out, tags);
    } else {
        write_tags_binary(out, tags);
    }
}

std::vector<TimeTagRecord> load_tags(const std::filesystem::path &path) {
    bool csv = path.extension() == ".csv";
    std::ifstream in(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "' for reading");
    }
    return csv ? read_tags_csv(in) : read_tags_binary(in);
}

}  // namespace ffsim
