#include "mtx/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <boost/crc.hpp>

#ifndef MTX_DEFAULT_DATA_DIR
#define MTX_DEFAULT_DATA_DIR "data"
#endif

namespace mtx {

namespace {

double num(const Json& v, const std::string& what) {
  if (!v.is_number()) throw InputError(what + ": expected a number");
  return v.get<double>();
}

int index_of(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) throw InputError(what + ": expected an integer index");
  return v.get<int>();
}

std::string fmt(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": cannot parse '" + s + "' as a number");
  }
}

}  // namespace

DomainMesh mesh_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("mesh: expected a JSON object");
  for (const char* key : {"vertices", "triangles", "boundary"}) {
    if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("mesh: missing array '") + key + "'");
  }
  std::vector<Point> v;
  for (const auto& p : j["vertices"]) {
    if (!p.is_array() || p.size() != 2) throw InputError("mesh: each vertex must be [x, y]");
    v.push_back({num(p[0], "mesh vertex"), num(p[1], "mesh vertex")});
  }
  std::vector<std::array<int, 3>> t;
  for (const auto& tri : j["triangles"]) {
    if (!tri.is_array() || tri.size() != 3) throw InputError("mesh: each triangle must be [i, j, k]");
    t.push_back({index_of(tri[0], "mesh triangle"), index_of(tri[1], "mesh triangle"), index_of(tri[2], "mesh triangle")});
  }
  std::vector<int> b;
  for (const auto& i : j["boundary"]) b.push_back(index_of(i, "mesh boundary"));
  try {
    return DomainMesh(std::move(v), std::move(t), std::move(b));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

Json mesh_to_json(const DomainMesh& mesh) {
  Json j;
  Json v = Json::array(), t = Json::array(), b = Json::array();
  for (const auto& p : mesh.vertices()) v.push_back({p.x, p.y});
  for (const auto& tri : mesh.triangles()) t.push_back({tri[0], tri[1], tri[2]});
  for (int i : mesh.boundary()) b.push_back(i);
  j["vertices"] = std::move(v);
  j["triangles"] = std::move(t);
  j["boundary"] = std::move(b);
  return j;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

DomainMesh read_mesh(const std::string& path) {
  std::string text = read_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("mesh '" + path + "': " + e.what());
  }
  return mesh_from_json(j);
}

void write_mesh(const DomainMesh& mesh, const std::string& path) { write_text(path, mesh_to_json(mesh).dump() + "\n"); }

RadialProfile profile_from_csv(const std::string& text, const std::string& what) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw InputError(what + ": empty file");
  auto head = split_line(line);
  if (head.size() != 2 || head[0] != "r" || head[1] != "u") throw InputError(what + ": header must be 'r,u'");
  std::vector<double> r, u;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    std::string where = what + " line " + std::to_string(row);
    if (cells.size() != 2) throw InputError(where + ": expected two columns");
    r.push_back(parse_double(cells[0], where));
    u.push_back(parse_double(cells[1], where));
  }
  try {
    return RadialProfile(std::move(r), std::move(u));
  } catch (const std::invalid_argument& e) {
    throw InputError(what + ": " + e.what());
  }
}

std::string profile_to_csv(const RadialProfile& u) {
  std::string out = "r,u\n";
  for (std::size_t i = 0; i < u.size(); ++i) out += fmt(u.nodes()[i]) + "," + fmt(u.values()[i]) + "\n";
  return out;
}

RadialProfile read_profile(const std::string& path) { return profile_from_csv(read_text(path), "profile '" + path + "'"); }

void write_profile(const RadialProfile& u, const std::string& path) { write_text(path, profile_to_csv(u)); }

std::vector<double> read_vertex_values(const std::string& path) {
  std::string text = read_text(path);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  std::vector<double> out;
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("values '" + path + "': " + e.what());
    }
    if (!j.contains("values") || !j["values"].is_array()) throw InputError("values '" + path + "': missing array 'values'");
    for (const auto& v : j["values"]) out.push_back(num(v, "values"));
    return out;
  }
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || split_line(line) != std::vector<std::string>{"u"})
    throw InputError("values '" + path + "': header must be 'u'");
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    out.push_back(parse_double(split_line(line).at(0), "values line " + std::to_string(row)));
  }
  return out;
}

Json field_to_json(const GreensField& field, const std::string& mesh_ref) {
  Json j;
  j["mesh"] = mesh_ref;
  j["pole"] = {field.pole.x, field.pole.y};
  j["incenter"] = field.incenter;
  j["H_at_pole"] = field.H_at_pole;
  j["residual"] = field.residual;
  j["min_G"] = field.min_G;
  j["H"] = field.H;
  return j;
}

std::uint32_t crc32_of(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::string data_dir() {
  const char* env = std::getenv("MTX_DATA_DIR");
  if (env && *env) return env;
  return MTX_DEFAULT_DATA_DIR;
}

std::vector<std::string> reference_mesh_names() {
  return {"disk", "disk_offcenter", "square", "l_hexagon", "rect_boundary_origin"};
}

DomainMesh reference_mesh(const std::string& name) {
  std::string dir = data_dir();
  std::string sums = read_text(dir + "/CHECKSUMS");
  std::map<std::string, std::string> table;
  std::istringstream is(sums);
  std::string crc, file;
  while (is >> crc >> file) table[file] = crc;
  std::string fname = name + ".json";
  auto it = table.find(fname);
  if (it == table.end()) throw InputError("reference mesh '" + name + "' is not listed in " + dir + "/CHECKSUMS");
  std::string text = read_text(dir + "/" + fname);
  std::ostringstream hex;
  hex << std::hex << std::setw(8) << std::setfill('0') << crc32_of(text);
  if (hex.str() != it->second)
    throw InputError("reference mesh '" + fname + "' fails its checksum (" + hex.str() + " != " + it->second + ")");
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("mesh '" + fname + "': " + e.what());
  }
  return mesh_from_json(j);
}

}  // namespace mtx
