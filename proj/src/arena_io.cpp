#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swarmpath/world.hpp"

namespace swarmpath {

using nlohmann::json;

namespace {

Vec2 read_point(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(key + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Disk read_disk(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains("center")) throw ConfigError(key + ": expected {center, radius}");
  Disk d;
  d.center = read_point(j.at("center"), key + ".center");
  d.radius = j.value("radius", 0.25);
  return d;
}

json write_point(Vec2 p) { return json::array({p.x, p.y}); }

}  // namespace

ArenaSpec parse_arena(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("arena: parse error: ") + e.what());
  }
  ArenaSpec a;
  try {
    a.width = j.at("width").get<double>();
    a.height = j.at("height").get<double>();
    a.name = j.value("name", std::string{});
    a.reference_intensity = j.value("reference_intensity", 1.0);
    a.nest = read_disk(j.at("nest"), "nest");
    a.goal = read_disk(j.at("goal"), "goal");
    if (j.contains("obstacles")) {
      const json& obs = j.at("obstacles");
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const std::string key = "obstacles[" + std::to_string(i) + "]";
        a.obstacles.push_back({read_point(obs[i].at("min"), key + ".min"),
                               read_point(obs[i].at("max"), key + ".max")});
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("arena: ") + e.what());
  }
  a.validate();
  return a;
}

ArenaSpec load_arena(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("arena: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ArenaSpec a = parse_arena(ss.str());
  if (a.name.empty()) a.name = path.stem().string();
  return a;
}

std::string arena_to_json(const ArenaSpec& a) {
  json j;
  j["name"] = a.name;
  j["width"] = a.width;
  j["height"] = a.height;
  j["reference_intensity"] = a.reference_intensity;
  j["nest"] = {{"center", write_point(a.nest.center)}, {"radius", a.nest.radius}};
  j["goal"] = {{"center", write_point(a.goal.center)}, {"radius", a.goal.radius}};
  j["obstacles"] = json::array();
  for (const Rect& r : a.obstacles)
    j["obstacles"].push_back({{"min", write_point(r.min)}, {"max", write_point(r.max)}});
  return j.dump(2);
}

}  // namespace swarmpath
