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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ffsim/errors.h"
#include "gtest/gtest.h"

using namespace ffsim;

namespace {

std::vector<TimeTagRecord> random_tags(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<TimeTagRecord> tags;
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < count; ++i) {
        t += rng() % 100000;
        tags.push_back({static_cast<Channel>(rng() % 3), t});
    }
    return tags;
}

}  // namespace

TEST(TimeTags, channel_names) {
    for (Channel c : {Channel::kHeraldTrigger, Channel::kHbtA, Channel::kHbtB}) {
        EXPECT_EQ(parse_channel(to_string(c)), c);
    }
    EXPECT_THROW(parse_channel("hbt_c"), ParameterError);
}

TEST(TimeTags, ordering) {
    EXPECT_TRUE(tag_order({Channel::kHbtB, 5}, {Channel::kHeraldTrigger, 6}));
    EXPECT_TRUE(tag_order({Channel::kHeraldTrigger, 5}, {Channel::kHbtA, 5}));
    EXPECT_FALSE(tag_order({Channel::kHbtA, 5}, {Channel::kHbtA, 5}));
}

TEST(TimeTags, binary_layout) {
    std::ostringstream out;
    write_tags_binary(out, {{Channel::kHbtA, 0x0102030405060708ull}});
    std::string bytes = out.str();
    ASSERT_EQ(bytes.size(), kTagFileHeaderBytes + kTagRecordBytes);
    EXPECT_EQ(bytes.substr(0, 8), "FFSIMTAG");
    EXPECT_EQ(bytes[8], 1);
    EXPECT_EQ(bytes[16], 1);
    EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 0x08);
    EXPECT_EQ(static_cast<unsigned char>(bytes[27]), 0x01);
}

TEST(TimeTags, binary_and_csv_round_trip_property) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto tags = random_tags(seed, seed * 37);
        std::stringstream bin;
        write_tags_binary(bin, tags);
        EXPECT_EQ(read_tags_binary(bin), tags);
        std::stringstream csv;
        write_tags_csv(csv, tags);
        EXPECT_EQ(read_tags_csv(csv), tags);
    }
}

TEST(TimeTags, rejects_corrupt_input) {
    std::istringstream bad_magic(std::string("NOTATAGS") + std::string(8, '\0'));
    EXPECT_THROW(read_tags_binary(bad_magic), ParameterError);
    std::ostringstream out;
    write_tags_binary(out, {{Channel::kHbtA, 1}});
    std::istringstream truncated(out.str().substr(0, out.str().size() - 3));
    EXPECT_THROW(read_tags_binary(truncated), ParameterError);
    std::istringstream bad_csv("channel,timestamp_ps\nhbt_a,notanumber\n");
    EXPECT_THROW(read_tags_csv(bad_csv), ParameterError);
}

TEST(TimeTags, files_pick_format_by_extension) {
    auto dir = std::filesystem::temp_directory_path() / "ffsim_time_tags_test";
    std::filesystem::create_directories(dir);
    auto tags = random_tags(3, 100);
    for (const char *name : {"tags.ttag", "tags.csv"}) {
        save_tags(dir / name, tags);
        EXPECT_EQ(load_tags(dir / name), tags);
    }
    std::ifstream csv(dir / "tags.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "channel,timestamp_ps");
    std::filesystem::remove_all(dir);
}

TEST(TimeTags, stream_accessors) {
    TagStream s{{{Channel::kHbtA, 1}, {Channel::kHbtB, 2}, {Channel::kHbtA, 3}}, 10};
    EXPECT_EQ(s.channel_counts(), (std::array<std::uint64_t, 3>{0, 2, 1}));
    EXPECT_EQ(s.timestamps(Channel::kHbtA), (std::vector<std::uint64_t>{1, 3}));
}
