// Copyright 2026 The labelfuse4d Authors.
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

#include "labelfuse4d/label_frame.hpp"

#include <charconv>
#include <cstring>
#include <limits>
#include <string>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/fs_util.hpp"

namespace lf4d {
namespace {

constexpr char kMagic[4] = {'L', '4', 'D', 'L'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::string encode_label_frame(const LabelFrame& frame, LabelFileFormat format) {
  std::string out;
  if (format == LabelFileFormat::kText) {
    out.reserve(frame.labels.size() * 3);
    for (LabelId l : frame.labels) {
      out += std::to_string(l);
      out.push_back('\n');
    }
    return out;
  }
  if (frame.labels.size() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::kInvalid, "label frame too large for the binary format");
  }
  out.reserve(8 + 2 * frame.labels.size());
  out.append(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(frame.labels.size()));
  for (LabelId l : frame.labels) {
    const auto u = static_cast<std::uint16_t>(l);
    out.push_back(static_cast<char>(u & 0xFF));
    out.push_back(static_cast<char>(u >> 8));
  }
  return out;
}

LabelFrame decode_label_frame(std::string_view bytes, const std::string& origin) {
  LabelFrame frame;
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
    if (bytes.size() < 8) fail(ErrorKind::kParse, origin + ": truncated label header");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t count = get_u32(p + 4);
    if (bytes.size() != 8 + 2 * static_cast<std::size_t>(count)) {
      fail(ErrorKind::kShape, origin + ": header declares " + std::to_string(count) +
                                  " labels but the payload holds " +
                                  std::to_string((bytes.size() - 8) / 2));
    }
    frame.labels.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto u = static_cast<std::uint16_t>(p[8 + 2 * i] | (p[9 + 2 * i] << 8));
      frame.labels[i] = static_cast<LabelId>(u);
    }
    return frame;
  }
  const char* cur = bytes.data();
  const char* end = bytes.data() + bytes.size();
  std::size_t line = 0;
  while (cur < end) {
    const char* eol = static_cast<const char*>(std::memchr(cur, '\n', static_cast<std::size_t>(end - cur)));
    if (!eol) eol = end;
    ++line;
    const char* b = cur;
    const char* e = eol;
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == '\r' || e[-1] == ' ' || e[-1] == '\t')) --e;
    if (b != e) {
      int value = 0;
      auto [ptr, ec] = std::from_chars(b, e, value);
      if (ec != std::errc() || ptr != e || value < std::numeric_limits<LabelId>::min() ||
          value > std::numeric_limits<LabelId>::max()) {
        fail(ErrorKind::kParse, origin + ":" + std::to_string(line) + ": bad label '" +
                                    std::string(b, e) + "'");
      }
      frame.labels.push_back(static_cast<LabelId>(value));
    }
    cur = eol + 1;
  }
  if (frame.labels.empty()) fail(ErrorKind::kParse, origin + ": empty label file");
  return frame;
}

void save_label_frame(const LabelFrame& frame, const std::filesystem::path& path,
                      LabelFileFormat format) {
  write_file_atomic(path, encode_label_frame(frame, format));
}

LabelFrame load_label_frame(const std::filesystem::path& path,
                            std::optional<std::size_t> expected_count) {
  LabelFrame frame = decode_label_frame(read_file(path), path.string());
  if (expected_count && frame.labels.size() != *expected_count) {
    fail(ErrorKind::kShape, path.string() + ": holds " + std::to_string(frame.labels.size()) +
                                " labels, expected " + std::to_string(*expected_count));
  }
  return frame;
}

}  // namespace lf4d
