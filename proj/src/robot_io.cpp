#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "viewpath/kinematics.hpp"

namespace viewpath {

namespace {

using nlohmann::json;

Vec3 read_vec3(const json& j, const char* key, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw std::invalid_argument(std::string("expected 3-vector for '") + key + "'");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Pose read_origin(const json& j) {
  Pose p;
  p.position = read_vec3(j, "xyz", Vec3::Zero());
  const Vec3 rpy = read_vec3(j, "rpy", Vec3::Zero());
  p.rotation = rpy_to_matrix(rpy[0], rpy[1], rpy[2]);
  return p;
}

}  // namespace

RobotModel parse_robot_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("robot description: ") + e.what());
  }

  RobotModel m;
  try {
    m.base_footprint_radius = doc.at("footprint_radius").get<double>();
    const json& base_lim = doc.at("base_velocity_limit");
    if (base_lim.size() != 3) throw std::invalid_argument("base_velocity_limit needs 3 entries");
    for (int i = 0; i < 3; ++i) m.qdot_lim[i] = base_lim[i].get<double>();

    const json& joints = doc.at("joints");
    if (!joints.is_array() || joints.size() != kArmDof)
      throw std::invalid_argument("robot description needs exactly 5 arm joints");
    for (int i = 0; i < kArmDof; ++i) {
      const json& jj = joints[i];
      m.arm_chain[i].origin = read_origin(jj.value("origin", json::object()));
      m.arm_chain[i].axis = read_vec3(jj, "axis", Vec3::UnitZ()).normalized();
      m.q_lower[i] = jj.at("lower").get<double>();
      m.q_upper[i] = jj.at("upper").get<double>();
      m.qdot_lim[kBaseDof + i] = jj.at("velocity_limit").get<double>();
    }
    m.camera_offset = read_origin(doc.value("camera", json::object()));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("robot description: ") + e.what());
  }
  m.validate();
  return m;
}

RobotModel load_robot_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open robot description: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_robot_model(ss.str());
}

}  // namespace viewpath
