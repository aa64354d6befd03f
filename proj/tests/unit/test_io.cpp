// Copyright 2026 The bsdp Authors.
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

#include <gtest/gtest.h>

#include <filesystem>

#include <json.hpp>
#include <unistd.h>

#include "bsdp/errors.hpp"
#include "bsdp/io.hpp"

namespace bsdp {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bsdp_io_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(IoTest, AtomicWriteCreatesParentsAndLeavesNoTemp) {
  const auto path = dir_ / "a" / "b" / "out.txt";
  write_file_atomic(path, "hello\n");
  EXPECT_EQ(read_file(path), "hello\n");
  write_file_atomic(path, "replaced");
  EXPECT_EQ(read_file(path), "replaced");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(path.parent_path())) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST_F(IoTest, ReadMissingFileIsValidationError) {
  EXPECT_THROW(read_file(dir_ / "missing.json"), ValidationError);
}

TEST_F(IoTest, AppendJsonRecord) {
  const auto path = dir_ / "results.json";
  append_json_record(path, R"({"a": 1})");
  append_json_record(path, R"({"a": 2})");
  const auto doc = nlohmann::json::parse(read_file(path));
  ASSERT_TRUE(doc.is_array());
  ASSERT_EQ(doc.size(), 2u);
  EXPECT_EQ(doc[1]["a"], 2);
  write_file_atomic(dir_ / "object.json", "{}");
  EXPECT_THROW(append_json_record(dir_ / "object.json", "{}"), ValidationError);
}

TEST(UtcTimestamp, Format) {
  const auto t = utc_timestamp();
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t[4], '-');
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}

}  // namespace
}  // namespace bsdp
