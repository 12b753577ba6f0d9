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

#ifndef FFSIM_TIME_TAGS_H
#define FFSIM_TIME_TAGS_H

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace ffsim {

/// Picoseconds. Durations and offsets are signed; absolute tag times are
/// non-negative and stored unsigned in TimeTagRecord.
using Picoseconds = std::int64_t;

enum class Channel : std::uint8_t {
    kHeraldTrigger = 0,
    kHbtA = 1,
    kHbtB = 2,
};

inline constexpr std::size_t kNumChannels = 3;

std::string_view to_string(Channel channel);
Channel parse_channel(std::string_view text);

struct TimeTagRecord {
    Channel channel;
    std::uint64_t timestamp_ps;

    bool operator==(const TimeTagRecord &) const = default;
};

/// Orders by timestamp, then channel.
inline bool tag_order(const TimeTagRecord &a, const TimeTagRecord &b) {
    return a.timestamp_ps != b.timestamp_ps ? a.timestamp_ps < b.timestamp_ps : a.channel < b.channel;
}

/// A finalized stream: tags sorted by tag_order. duration_ps is the span
/// of the acquisition (0 when unknown, e.g. read back from a file).
struct TagStream {
    std::vector<TimeTagRecord> tags;
    std::uint64_t duration_ps = 0;

    std::array<std::uint64_t, kNumChannels> channel_counts() const;
    /// Timestamps of one channel, in order.
    std::vector<std::uint64_t> timestamps(Channel channel) const;
};

// Binary tag file, little-endian:
//   header  : 8-byte magic "FFSIMTAG", u32 version (=1), u32 reserved (=0)
//   records : u8 channel, 3 reserved zero bytes, u64 timestamp_ps
inline constexpr std::array<char, 8> kTagFileMagic = {'F', 'F', 'S', 'I', 'M', 'T', 'A', 'G'};
inline constexpr std::uint32_t kTagFileVersion = 1;
inline constexpr std::size_t kTagFileHeaderBytes = 16;
inline constexpr std::size_t kTagRecordBytes = 12;

void write_tags_binary(std::ostream &out, const std::vector<TimeTagRecord> &tags);
std::vector<TimeTagRecord> read_tags_binary(std::istream &in);

/// "channel,timestamp_ps" header, one numeric row per tag.
void write_tags_csv(std::ostream &out, const std::vector<TimeTagRecord> &tags);
std::vector<TimeTagRecord> read_tags_csv(std::istream &in);

/// Picks the format from the extension: ".csv" is text, anything else binary.
void save_tags(const std::filesystem::path &path, const std::vector<TimeTagRecord> &tags);
std::vector<TimeTagRecord> load_tags(const std::filesystem::path &path);

}  // namespace ffsim

#endif
