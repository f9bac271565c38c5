// Writes the reference meshes and their CRC32 table into a data directory.
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>

#include "mtx/io.hpp"
#include "mtx/mesh.hpp"

using namespace mtx;

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "data";
  struct Item {
    std::string name;
    DomainMesh mesh;
  };
  Item items[] = {
      {"disk", make_disk_mesh(1.0, {0.0, 0.0}, {0.0, 0.0})},
      {"disk_offcenter", make_disk_mesh(1.0, {0.5, 0.0}, {0.0, 0.0})},
      {"square", make_pole_mesh(square_polygon(1.0), {0.0, 0.0})},
      {"l_hexagon", make_pole_mesh(l_hexagon_polygon(), {0.0, 0.0})},
      // origin on the left edge; graded toward an interior point next to it
      {"rect_boundary_origin", make_pole_mesh(rectangle_polygon(0.0, -1.0, 2.0, 1.0), {0.05, 0.0})},
  };
  std::string sums;
  for (const auto& it : items) {
    std::string text = mesh_to_json(it.mesh).dump() + "\n";
    write_text(dir + "/" + it.name + ".json", text);
    std::ostringstream hex;
    hex << std::hex << std::setw(8) << std::setfill('0') << crc32_of(text);
    sums += hex.str() + "  " + it.name + ".json\n";
    std::printf("%-22s %6zu vertices  origin %s\n", it.name.c_str(), it.mesh.num_vertices(),
                to_string(it.mesh.origin_location()));
  }
  write_text(dir + "/CHECKSUMS", sums);
  return 0;
}
