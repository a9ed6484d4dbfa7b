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

#include "labelfuse4d/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "labelfuse4d/error.hpp"
#include "labelfuse4d/fs_util.hpp"

namespace lf4d {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

PlyType parse_ply_type(const std::string& name, const std::filesystem::path& path) {
  if (name == "char" || name == "int8") return PlyType::kInt8;
  if (name == "uchar" || name == "uint8") return PlyType::kUint8;
  if (name == "short" || name == "int16") return PlyType::kInt16;
  if (name == "ushort" || name == "uint16") return PlyType::kUint16;
  if (name == "int" || name == "int32") return PlyType::kInt32;
  if (name == "uint" || name == "uint32") return PlyType::kUint32;
  if (name == "float" || name == "float32") return PlyType::kFloat32;
  if (name == "double" || name == "float64") return PlyType::kFloat64;
  fail(ErrorKind::kParse, path.string() + ": unknown PLY type '" + name + "'");
}

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUint8: return 1;
    case PlyType::kInt16:
    case PlyType::kUint16: return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

enum class PlyFormat { kAscii, kLittle, kBig };

// Sequential reader over the PLY body in any of the three encodings.
class PlyBodyReader {
 public:
  PlyBodyReader(std::istream& in, PlyFormat format, const std::filesystem::path& path)
      : in_(in), format_(format), path_(path) {}

  double read(PlyType type) {
    if (format_ == PlyFormat::kAscii) {
      std::string token;
      if (!(in_ >> token)) truncated();
      try {
        return std::stod(token);
      } catch (const std::exception&) {
        fail(ErrorKind::kParse, path_.string() + ": bad number '" + token + "'");
      }
    }
    unsigned char buf[8];
    const std::size_t n = type_size(type);
    if (!in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) truncated();
    const bool swap = (format_ == PlyFormat::kBig) == (std::endian::native == std::endian::little);
    if (swap) std::reverse(buf, buf + n);
    switch (type) {
      case PlyType::kInt8: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
      case PlyType::kUint8: return static_cast<double>(buf[0]);
      case PlyType::kInt16: return static_cast<double>(load<std::int16_t>(buf));
      case PlyType::kUint16: return static_cast<double>(load<std::uint16_t>(buf));
      case PlyType::kInt32: return static_cast<double>(load<std::int32_t>(buf));
      case PlyType::kUint32: return static_cast<double>(load<std::uint32_t>(buf));
      case PlyType::kFloat32: return static_cast<double>(load<float>(buf));
      case PlyType::kFloat64: return load<double>(buf);
    }
    return 0.0;
  }

 private:
  template <typename T>
  static T load(const unsigned char* buf) {
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
  }

  [[noreturn]] void truncated() {
    fail(ErrorKind::kParse, path_.string() + ": unexpected end of PLY data");
  }

  std::istream& in_;
  PlyFormat format_;
  const std::filesystem::path& path_;
};

void append_polygon(const std::vector<std::int64_t>& poly, std::size_t line,
                    const std::filesystem::path& path, TriMesh& mesh) {
  if (poly.size() < 3) {
    fail(ErrorKind::kParse, path.string() + ": face with fewer than 3 vertices at record " +
                                std::to_string(line));
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    mesh.faces.push_back({static_cast<std::int32_t>(poly[0]), static_cast<std::int32_t>(poly[k]),
                          static_cast<std::int32_t>(poly[k + 1])});
  }
}

TriMesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) fail(ErrorKind::kParse, path.string() + ": missing 'ply' magic");

  PlyFormat format = PlyFormat::kAscii;
  std::vector<PlyElement> elements;
  bool have_format = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") {
        format = PlyFormat::kAscii;
      } else if (fmt == "binary_little_endian") {
        format = PlyFormat::kLittle;
      } else if (fmt == "binary_big_endian") {
        format = PlyFormat::kBig;
      } else {
        fail(ErrorKind::kParse, path.string() + ": unknown PLY format '" + fmt + "'");
      }
      have_format = true;
    } else if (keyword == "element") {
      PlyElement element;
      ls >> element.name >> element.count;
      if (!ls) fail(ErrorKind::kParse, path.string() + ": malformed element line");
      elements.push_back(std::move(element));
    } else if (keyword == "property") {
      if (elements.empty()) fail(ErrorKind::kParse, path.string() + ": property before element");
      PlyProperty prop;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> prop.name;
        prop.is_list = true;
        prop.count_type = parse_ply_type(count_type, path);
        prop.type = parse_ply_type(item_type, path);
      } else {
        prop.type = parse_ply_type(type, path);
        ls >> prop.name;
      }
      elements.back().properties.push_back(prop);
    } else if (keyword == "end_header") {
      break;
    }
  }
  if (!have_format) fail(ErrorKind::kParse, path.string() + ": PLY header without format");

  TriMesh mesh;
  PlyBodyReader reader(in, format, path);
  for (const PlyElement& element : elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";
    bool has_color = false;
    bool color_is_int = true;
    if (is_vertex) {
      mesh.vertices.reserve(element.count);
      for (const auto& p : element.properties) {
        if (p.name == "red") {
          has_color = true;
          color_is_int = p.type != PlyType::kFloat32 && p.type != PlyType::kFloat64;
        }
      }
      if (has_color) mesh.colors.reserve(element.count);
    }
    std::vector<std::int64_t> poly;
    for (std::size_t i = 0; i < element.count; ++i) {
      Vec3 position = Vec3::Zero();
      Eigen::Vector3f color = Eigen::Vector3f::Zero();
      for (const PlyProperty& prop : element.properties) {
        if (prop.is_list) {
          const auto n = static_cast<std::int64_t>(reader.read(prop.count_type));
          if (n < 0) fail(ErrorKind::kParse, path.string() + ": negative list length");
          poly.resize(static_cast<std::size_t>(n));
          for (auto& v : poly) v = static_cast<std::int64_t>(reader.read(prop.type));
          if (is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
            append_polygon(poly, i, path, mesh);
          }
          continue;
        }
        const double value = reader.read(prop.type);
        if (!is_vertex) continue;
        if (prop.name == "x") position.x() = value;
        else if (prop.name == "y") position.y() = value;
        else if (prop.name == "z") position.z() = value;
        else if (prop.name == "red") color.x() = static_cast<float>(value);
        else if (prop.name == "green") color.y() = static_cast<float>(value);
        else if (prop.name == "blue") color.z() = static_cast<float>(value);
      }
      if (is_vertex) {
        mesh.vertices.push_back(position);
        if (has_color) mesh.colors.push_back(color_is_int ? Eigen::Vector3f(color / 255.0f) : color);
      }
    }
  }
  return mesh;
}

TriMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  TriMesh mesh;
  bool any_color = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::int64_t> poly;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        fail(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": bad vertex");
      }
      mesh.vertices.push_back(p);
      Eigen::Vector3f c;
      if (ls >> c.x() >> c.y() >> c.z()) {
        any_color = true;
        mesh.colors.push_back(c);
      } else {
        mesh.colors.push_back(Eigen::Vector3f::Zero());
      }
    } else if (tag == "f") {
      poly.clear();
      std::string token;
      while (ls >> token) {
        const auto slash = token.find('/');
        std::int64_t index = 0;
        try {
          index = std::stoll(token.substr(0, slash));
        } catch (const std::exception&) {
          fail(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": bad face index '" + token + "'");
        }
        // 1-based, negative counts back from the latest vertex.
        index = index < 0 ? static_cast<std::int64_t>(mesh.vertices.size()) + index : index - 1;
        poly.push_back(index);
      }
      append_polygon(poly, line_no, path, mesh);
    }
  }
  if (!any_color) mesh.colors.clear();
  return mesh;
}

std::uint8_t to_byte(float c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0f, 1.0f) * 255.0f));
}

void save_ply(const TriMesh& mesh, std::ostream& out, PlyEncoding encoding) {
  const bool ascii = encoding == PlyEncoding::kAscii;
  out << "ply\nformat " << (ascii ? "ascii" : "binary_little_endian") << " 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (mesh.has_colors()) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.faces.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  if (ascii) {
    out.precision(17);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec3& v = mesh.vertices[i];
      out << v.x() << ' ' << v.y() << ' ' << v.z();
      if (mesh.has_colors()) {
        const auto& c = mesh.colors[i];
        out << ' ' << int{to_byte(c.x())} << ' ' << int{to_byte(c.y())} << ' ' << int{to_byte(c.z())};
      }
      out << '\n';
    }
    for (const Face& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    return;
  }
  static_assert(std::endian::native == std::endian::little, "binary PLY writer assumes little-endian host");
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    const double xyz[3] = {v.x(), v.y(), v.z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    if (mesh.has_colors()) {
      const auto& c = mesh.colors[i];
      const std::uint8_t rgb[3] = {to_byte(c.x()), to_byte(c.y()), to_byte(c.z())};
      out.write(reinterpret_cast<const char*>(rgb), sizeof(rgb));
    }
  }
  for (const Face& f : mesh.faces) {
    const std::uint8_t n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    out.write(reinterpret_cast<const char*>(f.data()), sizeof(std::int32_t) * 3);
  }
}

void save_obj(const TriMesh& mesh, std::ostream& out) {
  out.precision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z();
    if (mesh.has_colors()) {
      const auto& c = mesh.colors[i];
      out << ' ' << c.x() << ' ' << c.y() << ' ' << c.z();
    }
    out << '\n';
  }
  for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace

TriMesh load_mesh(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  TriMesh mesh;
  if (ext == ".ply") {
    mesh = load_ply(path);
  } else if (ext == ".obj") {
    mesh = load_obj(path);
  } else {
    fail(ErrorKind::kParse, path.string() + ": unsupported mesh extension '" + ext + "'");
  }
  try {
    validate(mesh);
  } catch (const Error& e) {
    fail(ErrorKind::kInvalid, path.string() + ": " + e.what());
  }
  return mesh;
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, PlyEncoding encoding) {
  const std::string ext = lower(path.extension().string());
  std::ostringstream out(std::ios::binary);
  if (ext == ".ply") {
    save_ply(mesh, out, encoding);
  } else if (ext == ".obj") {
    save_obj(mesh, out);
  } else {
    fail(ErrorKind::kInvalid, path.string() + ": unsupported mesh extension '" + ext + "'");
  }
  write_file_atomic(path, out.str());
}

}  // namespace lf4d
