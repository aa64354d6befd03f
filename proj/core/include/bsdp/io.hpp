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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace bsdp {

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers see either the old file or the complete new one. Parent
/// directories are created as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Appends the JSON document `record` to the JSON array stored at `path`,
/// creating the file when missing.
void append_json_record(const std::filesystem::path& path, std::string_view record);

/// Current UTC time as an ISO-8601 string.
std::string utc_timestamp();

}  // namespace bsdp
