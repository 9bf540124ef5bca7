#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "regrasp/error.hpp"
#include "regrasp/mesh.hpp"
#include "regrasp/shapes.hpp"

namespace regrasp {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Welds exactly coincident corners, which is what STL writers emit for
// shared vertices.
class Welder {
 public:
  int add(const Vec3& v) {
    const std::array<double, 3> key{v.x(), v.y(), v.z()};
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(vertices_.size()));
    if (inserted) vertices_.push_back(v);
    return it->second;
  }
  std::vector<Vec3> take() { return std::move(vertices_); }

 private:
  std::map<std::array<double, 3>, int> index_;
  std::vector<Vec3> vertices_;
};

TriMesh finish(Welder& welder, std::vector<Face> faces, const std::string& path) {
  // Drop slivers that collapse after welding.
  std::erase_if(faces, [](const Face& f) { return f[0] == f[1] || f[1] == f[2] || f[0] == f[2]; });
  if (faces.empty()) throw Error(ErrorCode::Io, path + " contains no triangles");
  return {welder.take(), std::move(faces)};
}

bool looks_binary_stl(const std::string& data) {
  if (data.size() < 84) return false;
  std::uint32_t n = 0;
  std::memcpy(&n, data.data() + 80, 4);
  return data.size() == 84 + static_cast<std::size_t>(n) * 50;
}

}  // namespace

TriMesh load_stl(const std::string& path, double scale) {
  const std::string data = read_file(path);
  Welder welder;
  std::vector<Face> faces;
  if (looks_binary_stl(data)) {
    std::uint32_t n = 0;
    std::memcpy(&n, data.data() + 80, 4);
    for (std::uint32_t t = 0; t < n; ++t) {
      const char* rec = data.data() + 84 + static_cast<std::size_t>(t) * 50;
      Face f{};
      for (int k = 0; k < 3; ++k) {
        float xyz[3];
        std::memcpy(xyz, rec + 12 + 12 * k, 12);
        f[static_cast<std::size_t>(k)] = welder.add(scale * Vec3(xyz[0], xyz[1], xyz[2]));
      }
      faces.push_back(f);
    }
    return finish(welder, std::move(faces), path);
  }

  std::istringstream in(data);
  std::string token;
  std::vector<int> corners;
  while (in >> token) {
    if (token == "vertex") {
      double x = 0, y = 0, z = 0;
      if (!(in >> x >> y >> z)) throw Error(ErrorCode::Io, "bad vertex line in " + path);
      corners.push_back(welder.add(scale * Vec3(x, y, z)));
    } else if (token == "endloop") {
      if (corners.size() != 3) throw Error(ErrorCode::Io, "non-triangular facet in " + path);
      faces.push_back({corners[0], corners[1], corners[2]});
      corners.clear();
    }
  }
  return finish(welder, std::move(faces), path);
}

TriMesh load_obj(const std::string& path, double scale) {
  std::istringstream in(read_file(path));
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x = 0, y = 0, z = 0;
      if (!(ls >> x >> y >> z)) throw Error(ErrorCode::Io, "bad vertex in " + path);
      vertices.push_back(scale * Vec3(x, y, z));
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string ref;
      while (ls >> ref) {
        // "7", "7/1", "7//3", "7/1/3"; negative indices count from the end.
        const int i = std::stoi(ref.substr(0, ref.find('/')));
        idx.push_back(i > 0 ? i - 1 : static_cast<int>(vertices.size()) + i);
      }
      if (idx.size() < 3) throw Error(ErrorCode::Io, "face with fewer than 3 corners in " + path);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  if (faces.empty()) throw Error(ErrorCode::Io, path + " contains no faces");
  return {std::move(vertices), std::move(faces)};
}

TriMesh load_mesh(const std::string& path, double scale) {
  constexpr std::string_view kBuiltin = "builtin:";
  if (path.starts_with(kBuiltin)) return shapes::builtin(path.substr(kBuiltin.size()));
  std::string ext = path.substr(path.find_last_of('.') == std::string::npos ? path.size()
                                                                             : path.find_last_of('.'));
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".stl") return load_stl(path, scale);
  if (ext == ".obj") return load_obj(path, scale);
  throw Error(ErrorCode::InvalidInput, "unknown mesh format: " + path);
}

void save_stl(const TriMesh& mesh, const std::string& path, double scale) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << std::setprecision(17);
  out << "solid mesh\n";
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Vec3& n = mesh.normal(f);
    out << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n    outer loop\n";
    for (const Vec3& v : mesh.triangle(f)) {
      const Vec3 s = v / scale;
      out << "      vertex " << s.x() << ' ' << s.y() << ' ' << s.z() << '\n';
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid mesh\n";
}

void save_obj(const TriMesh& mesh, const std::string& path, double scale) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices()) {
    const Vec3 s = v / scale;
    out << "v " << s.x() << ' ' << s.y() << ' ' << s.z() << '\n';
  }
  for (const Face& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

}  // namespace regrasp
