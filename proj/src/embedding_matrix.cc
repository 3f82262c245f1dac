// Copyright 2026 The Mazi Authors.
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


#include "mazi/embedding_matrix.h"

#include <fstream>
#include <stdexcept>
#include <string>

#include "mazi/text_io.h"

namespace mazi {

void save_embeddings(const EmbeddingMatrix& x, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::string line;
  out << x.rows() << ' ' << x.dim() << '\n';
  for (std::size_t i = 0; i < x.rows(); ++i) {
    line = std::to_string(i);
    for (double v : x.row(i)) {
      line.push_back(' ');
      append_double(line, v);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  std::size_t rows = 0, dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 2 || !parse_number(fields[0], rows) || !parse_number(fields[1], dim)) {
      fail("expected header \"n d\"");
    }
    break;
  }
  if (line_no == 0) fail("empty embedding file");
  EmbeddingMatrix x(rows, dim);
  std::vector<char> seen(rows, 0);
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::size_t id = 0;
    if (fields.size() != dim + 1 || !parse_number(fields[0], id)) fail("malformed row");
    if (id >= rows) fail("node id out of range");
    if (seen[id]) fail("duplicate node id");
    seen[id] = 1;
    auto row = x.row(id);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_number(fields[j + 1], row[j])) fail("malformed value");
    }
    ++count;
  }
  if (count != rows) {
    throw std::runtime_error("embedding file " + path.string() + " declares " +
                             std::to_string(rows) + " rows but has " + std::to_string(count));
  }
  return x;
}

}  // namespace mazi
