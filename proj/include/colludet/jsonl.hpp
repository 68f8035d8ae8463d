// Copyright 2026 The Colludet Authors.
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

#ifndef COLLUDET_JSONL_HPP_
#define COLLUDET_JSONL_HPP_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "colludet/error.hpp"
#include "json.hpp"

namespace colludet::jsonl {

using Json = nlohmann::json;

// Calls `fn(record, line_number)` for every non-blank line. Parse failures
// and exceptions thrown by `fn` surface as DataError tagged with the file
// name and 1-based line number.
void for_each(const std::filesystem::path& path,
              const std::function<void(const Json&, std::size_t)>& fn);

template <typename T>
T field(const Json& record, const char* name) {
  auto it = record.find(name);
  if (it == record.end() || it->is_null())
    throw DataError(std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string("field '") + name + "' has the wrong type");
  }
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  void write(const Json& record);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace colludet::jsonl

#endif  // COLLUDET_JSONL_HPP_
