#include "mrnav/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrnav/error.hpp"

namespace mrnav::sim {

using nlohmann::json;

bool Scene::contains(double wx, double wy) const {
  const int col = static_cast<int>(std::floor(wx / resolution_m + 1e-9)) + cols / 2;
  const int row = static_cast<int>(std::floor(wy / resolution_m + 1e-9)) + rows / 2;
  return row >= 0 && row < rows && col >= 0 && col < cols;
}

Cell Scene::cell_at(double wx, double wy) const {
  const int col = static_cast<int>(std::floor(wx / resolution_m + 1e-9)) + cols / 2;
  const int row = static_cast<int>(std::floor(wy / resolution_m + 1e-9)) + rows / 2;
  if (row < 0 || row >= rows || col < 0 || col >= cols)
    throw Error(ErrorKind::Extent, "point outside scene");
  return Cell{row, col};
}

std::pair<double, double> Scene::cell_center(Cell c) const {
  return {(c.col - cols / 2 + 0.5) * resolution_m,
          (c.row - rows / 2 + 0.5) * resolution_m};
}

std::vector<std::uint8_t> Scene::free_mask() const {
  std::vector<std::uint8_t> mask(occupied.size());
  for (std::size_t i = 0; i < occupied.size(); ++i) mask[i] = occupied[i] ? 0 : 1;
  return mask;
}

void Scene::validate() const {
  if (rows <= 0 || cols <= 0) throw Error(ErrorKind::Validation, "empty grid");
  if (!(resolution_m > 0.0)) throw Error(ErrorKind::Validation, "resolution must be > 0");
  if (occupied.size() != static_cast<std::size_t>(rows) * cols)
    throw Error(ErrorKind::Validation, "occupancy size disagrees with grid");
  bool any_free = false;
  for (auto v : occupied)
    if (!v) { any_free = true; break; }
  if (!any_free) throw Error(ErrorKind::Validation, "scene has no free space");
  for (const auto& obj : objects) {
    if (obj.category < 0 || obj.category >= category_count())
      throw Error(ErrorKind::Validation, "object with unknown category id");
    if (obj.cells.empty()) throw Error(ErrorKind::Validation, "object with no cells");
    for (const Cell& c : obj.cells)
      if (!in_bounds(c))
        throw Error(ErrorKind::Validation, "object cell outside scene bounds");
  }
}

Scene load_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("scene is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Parse, "scene root must be an object");
  if (!j.contains("id") || !j["id"].is_string())
    throw Error(ErrorKind::Parse, "missing string field 'id'");
  if (!j.contains("resolution") || !j["resolution"].is_number())
    throw Error(ErrorKind::Parse, "missing numeric field 'resolution'");
  if (!j.contains("grid") || !j["grid"].is_array() || j["grid"].empty())
    throw Error(ErrorKind::Parse, "missing non-empty array field 'grid'");

  Scene scene;
  scene.id = j["id"].get<std::string>();
  scene.resolution_m = j["resolution"].get<double>();

  const auto& grid = j["grid"];
  scene.rows = static_cast<int>(grid.size());
  std::string first = grid[0].get<std::string>();
  scene.cols = static_cast<int>(first.size());
  if (scene.cols == 0) throw Error(ErrorKind::Parse, "grid rows must be non-empty");
  scene.occupied.assign(static_cast<std::size_t>(scene.rows) * scene.cols, 0);
  for (int r = 0; r < scene.rows; ++r) {
    if (!grid[r].is_string()) throw Error(ErrorKind::Parse, "grid rows must be strings");
    const std::string row = grid[r].get<std::string>();
    if (static_cast<int>(row.size()) != scene.cols)
      throw Error(ErrorKind::Parse, "ragged grid row " + std::to_string(r));
    for (int c = 0; c < scene.cols; ++c) {
      if (row[c] == '#')
        scene.occupied[r * scene.cols + c] = 1;
      else if (row[c] != '.')
        throw Error(ErrorKind::Parse,
                    std::string("unknown grid character '") + row[c] + "'");
    }
  }

  if (j.contains("objects")) {
    if (!j["objects"].is_array()) throw Error(ErrorKind::Parse, "'objects' must be an array");
    for (const auto& jo : j["objects"]) {
      if (!jo.is_object() || !jo.contains("category") || !jo.contains("cells"))
        throw Error(ErrorKind::Parse, "object entries need 'category' and 'cells'");
      const std::string cat = jo["category"].get<std::string>();
      const auto id = category_id(cat);
      if (!id) throw Error(ErrorKind::Validation, "unknown category token: " + cat);
      SceneObject obj;
      obj.category = *id;
      for (const auto& jc : jo["cells"]) {
        if (!jc.is_array() || jc.size() != 2)
          throw Error(ErrorKind::Parse, "object cells must be [row, col] pairs");
        obj.cells.push_back(Cell{jc[0].get<int>(), jc[1].get<int>()});
      }
      scene.objects.push_back(std::move(obj));
    }
  }

  scene.validate();

  // Last object wins on overlap; object order comes from the file.
  scene.label.assign(scene.occupied.size(), kNoCategory);
  for (const auto& obj : scene.objects)
    for (const Cell& c : obj.cells) scene.label[scene.index(c)] = obj.category;

  return scene;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scene file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scene(buf.str());
}

std::string scene_to_json(const Scene& scene) {
  json j;
  j["id"] = scene.id;
  j["resolution"] = scene.resolution_m;
  std::vector<std::string> grid;
  grid.reserve(scene.rows);
  for (int r = 0; r < scene.rows; ++r) {
    std::string row(scene.cols, '.');
    for (int c = 0; c < scene.cols; ++c)
      if (scene.occupied[r * scene.cols + c]) row[c] = '#';
    grid.push_back(std::move(row));
  }
  j["grid"] = grid;
  json objs = json::array();
  for (const auto& obj : scene.objects) {
    json jo;
    jo["category"] = std::string(category_name(obj.category));
    json cells = json::array();
    for (const Cell& c : obj.cells) cells.push_back({c.row, c.col});
    jo["cells"] = cells;
    objs.push_back(jo);
  }
  j["objects"] = objs;
  return j.dump(2);
}

}  // namespace mrnav::sim
