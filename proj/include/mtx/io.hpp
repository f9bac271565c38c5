#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtx/greens.hpp"
#include "mtx/grid.hpp"
#include "mtx/mesh.hpp"
#include "mtx/radial.hpp"

namespace mtx {

// Malformed or missing input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

// {"vertices": [[x, y], ...], "triangles": [[i, j, k], ...], "boundary": [i, ...]}
DomainMesh mesh_from_json(const Json& j);
Json mesh_to_json(const DomainMesh& mesh);
DomainMesh read_mesh(const std::string& path);
void write_mesh(const DomainMesh& mesh, const std::string& path);

// CSV with header "r,u"
RadialProfile profile_from_csv(const std::string& text, const std::string& what = "profile");
std::string profile_to_csv(const RadialProfile& u);
RadialProfile read_profile(const std::string& path);
void write_profile(const RadialProfile& u, const std::string& path);

// Vertex values: JSON {"values": [...]} or CSV with header "u".
std::vector<double> read_vertex_values(const std::string& path);

Json field_to_json(const GreensField& field, const std::string& mesh_ref);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

std::uint32_t crc32_of(const std::string& bytes);

// Reference meshes: MTX_DATA_DIR if set, else the directory baked in at build time.
std::string data_dir();
// Loads <data_dir>/<name>.json after checking it against <data_dir>/CHECKSUMS.
DomainMesh reference_mesh(const std::string& name);
std::vector<std::string> reference_mesh_names();

}  // namespace mtx
