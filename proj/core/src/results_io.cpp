// Copyright 2026 The qsmooth Authors
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

#include <fstream>
#include <ostream>

#include "json.hpp"

#include "qsmooth/errors.hpp"
#include "qsmooth/experiment.hpp"
#include "qsmooth/record.hpp"

namespace qsmooth {

void write_csv(std::ostream& os, const ResultTable& table) {
  os << "# qsmooth-v1\n# kind: " << table.kind << '\n';
  for (const auto& [key, value] : table.summary) os << "# " << key << ": " << value << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "") << detail::format_double(row[c]);
    }
    os << '\n';
  }
}

void write_json(std::ostream& os, const ResultTable& table) {
  nlohmann::ordered_json doc;
  doc["version"] = "qsmooth-v1";
  doc["kind"] = table.kind;
  auto& summary = doc["summary"];
  summary = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.summary) summary[key] = value;
  auto& rows = doc["rows"];
  rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  os << doc.dump(1) << '\n';
}

void save_table(const std::string& path, OutputFormat format, const ResultTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open output file: " + path);
  if (format == OutputFormat::json) {
    write_json(os, table);
  } else {
    write_csv(os, table);
  }
  os.flush();
  if (!os) throw FormatError("failed writing output file: " + path);
}

void write_summary(std::ostream& os, const ResultTable& table) {
  os << table.kind << '\n';
  for (const auto& [key, value] : table.summary) os << "  " << key << ": " << value << '\n';
}

}  // namespace qsmooth
