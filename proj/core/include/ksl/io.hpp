// Copyright 2026 The ksl Authors
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

#pragma once

#include <string>

namespace ksl {

// Writes `contents` to `path` through a sibling temporary file and rename, so
// readers never observe a partial file. Throws IoError on failure.
void write_file_atomic(const std::string& path, const std::string& contents);

// Whole-file read. Throws IoError if the file cannot be opened.
std::string read_file(const std::string& path);

}  // namespace ksl
