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

#include "colludet/jsonl.hpp"

namespace colludet::jsonl {

void for_each(const std::filesystem::path& path,
              const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = [&] { return path.filename().string() + ":" + std::to_string(line_no); };
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw DataError(where() + ": malformed record: " + e.what());
    }
    if (!record.is_object()) throw DataError(where() + ": record is not an object");
    try {
      fn(record, line_no);
    } catch (const DataError& e) {
      throw DataError(where() + ": " + e.what());
    }
  }
}

Writer::Writer(const std::filesystem::path& path) : path_(path), out_(path) {
  if (!out_) throw DataError("cannot write " + path.string());
}

void Writer::write(const Json& record) {
  out_ << record.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
  if (!out_) throw DataError("write failed: " + path_.string());
}

}  // namespace colludet::jsonl
