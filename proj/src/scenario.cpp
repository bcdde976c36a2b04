#include "viewpath/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace viewpath {

using nlohmann::json;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kFocus: return "focus";
    case Strategy::kNoPath: return "no_path";
    case Strategy::kSampling: return "sampling";
  }
  return "focus";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "focus") return Strategy::kFocus;
  if (name == "no_path") return Strategy::kNoPath;
  if (name == "sampling") return Strategy::kSampling;
  return std::nullopt;
}

namespace {

bool in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

Primitive box(double x0, double y0, double z0, double x1, double y1, double z1) {
  Primitive p;
  p.kind = Primitive::Kind::kBox;
  p.min = Vec3(x0, y0, z0);
  p.max = Vec3(x1, y1, z1);
  return p;
}

Primitive cylinder(double cx, double cy, double r, double z0, double z1, double inner = 0.0) {
  Primitive p;
  p.kind = Primitive::Kind::kCylinder;
  p.center = Vec2(cx, cy);
  p.radius = r;
  p.inner_radius = inner;
  p.z0 = z0;
  p.z1 = z1;
  return p;
}

Primitive prism(std::vector<Vec2> polygon, double z0, double z1) {
  Primitive p;
  p.kind = Primitive::Kind::kPrism;
  p.polygon = std::move(polygon);
  p.z0 = z0;
  p.z1 = z1;
  return p;
}

}  // namespace

bool Primitive::contains(const Vec3& p) const {
  switch (kind) {
    case Kind::kBox:
      return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    case Kind::kCylinder: {
      if (p.z() < z0 || p.z() > z1) return false;
      const double d = (p.head<2>() - center).norm();
      return d <= radius && d >= inner_radius;
    }
    case Kind::kPrism:
      return p.z() >= z0 && p.z() <= z1 && in_polygon(polygon, p.head<2>());
  }
  return false;
}

Aabb Primitive::bounds() const {
  switch (kind) {
    case Kind::kBox: return {min, max};
    case Kind::kCylinder:
      return {Vec3(center.x() - radius, center.y() - radius, z0),
              Vec3(center.x() + radius, center.y() + radius, z1)};
    case Kind::kPrism: {
      Vec2 lo = polygon.front(), hi = polygon.front();
      for (const Vec2& v : polygon) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      return {Vec3(lo.x(), lo.y(), z0), Vec3(hi.x(), hi.y(), z1)};
    }
  }
  return {};
}

bool ObjectSpec::contains(const Vec3& p) const {
  for (const Primitive& prim : primitives)
    if (prim.contains(p)) return true;
  return false;
}

Aabb ObjectSpec::bounds() const {
  Aabb b = primitives.front().bounds();
  for (const Primitive& prim : primitives) {
    const Aabb pb = prim.bounds();
    b.min = b.min.cwiseMin(pb.min);
    b.max = b.max.cwiseMax(pb.max);
  }
  return b;
}

double ObjectSpec::footprint_radius() const {
  double r = 0.0;
  for (const Primitive& prim : primitives) {
    const Aabb b = prim.bounds();
    for (double x : {b.min.x(), b.max.x()})
      for (double y : {b.min.y(), b.max.y()}) r = std::max(r, std::hypot(x, y));
  }
  return r;
}

std::vector<ObjectSpec> desk_suite() {
  std::vector<ObjectSpec> suite;
  auto add = [&](std::string name, std::vector<Primitive> prims) {
    suite.push_back({std::move(name), std::move(prims)});
  };

  add("table", {box(-0.40, -0.25, 0.70, 0.40, 0.25, 0.74),
                cylinder(-0.36, -0.21, 0.03, 0.0, 0.70), cylinder(0.36, -0.21, 0.03, 0.0, 0.70),
                cylinder(-0.36, 0.21, 0.03, 0.0, 0.70), cylinder(0.36, 0.21, 0.03, 0.0, 0.70)});

  add("chair", {box(-0.22, -0.22, 0.42, 0.22, 0.22, 0.46),
                cylinder(-0.19, -0.19, 0.02, 0.0, 0.42), cylinder(0.19, -0.19, 0.02, 0.0, 0.42),
                cylinder(-0.19, 0.19, 0.02, 0.0, 0.42), cylinder(0.19, 0.19, 0.02, 0.0, 0.42),
                box(-0.22, 0.18, 0.46, 0.22, 0.22, 0.90)});

  add("lamp", {cylinder(0.0, 0.0, 0.14, 0.0, 0.03), cylinder(0.0, 0.0, 0.015, 0.03, 0.55),
               box(0.0, -0.015, 0.53, 0.30, 0.015, 0.56),
               cylinder(0.30, 0.0, 0.12, 0.38, 0.53, 0.10)});

  add("bucket", {cylinder(0.0, 0.0, 0.28, 0.0, 0.45, 0.24), cylinder(0.0, 0.0, 0.28, 0.0, 0.03),
                 box(-0.30, -0.015, 0.45, 0.30, 0.015, 0.48)});

  add("shelf", {box(-0.40, -0.15, 0.0, -0.37, 0.15, 0.90), box(0.37, -0.15, 0.0, 0.40, 0.15, 0.90),
                box(-0.37, -0.15, 0.0, 0.37, 0.15, 0.03), box(-0.37, -0.15, 0.30, 0.37, 0.15, 0.33),
                box(-0.37, -0.15, 0.60, 0.37, 0.15, 0.63), box(-0.37, -0.15, 0.87, 0.37, 0.15, 0.90),
                box(-0.40, 0.12, 0.0, 0.40, 0.15, 0.90)});

  add("corner_desk",
      {prism({{-0.5, -0.5}, {0.5, -0.5}, {0.5, -0.1}, {-0.1, -0.1}, {-0.1, 0.5}, {-0.5, 0.5}}, 0.70, 0.74),
       cylinder(-0.46, -0.46, 0.03, 0.0, 0.70), cylinder(0.46, -0.46, 0.03, 0.0, 0.70),
       cylinder(0.46, -0.14, 0.03, 0.0, 0.70), cylinder(-0.46, 0.46, 0.03, 0.0, 0.70),
       cylinder(-0.14, 0.46, 0.03, 0.0, 0.70)});

  {
    std::vector<Primitive> stool = {cylinder(0.0, 0.0, 0.20, 0.55, 0.60),
                                    cylinder(0.0, 0.0, 0.17, 0.25, 0.28, 0.14)};
    for (double a : {90.0, 210.0, 330.0}) {
      const double t = deg2rad(a);
      stool.push_back(cylinder(0.155 * std::cos(t), 0.155 * std::sin(t), 0.025, 0.0, 0.55));
    }
    add("stool", std::move(stool));
  }

  add("monitor", {box(-0.12, -0.10, 0.0, 0.12, 0.10, 0.02), box(-0.02, -0.02, 0.02, 0.02, 0.02, 0.30),
                  box(-0.32, 0.02, 0.20, 0.32, 0.06, 0.58)});

  add("cross_column",
      {prism({{-0.08, -0.25}, {0.08, -0.25}, {0.08, -0.08}, {0.25, -0.08}, {0.25, 0.08}, {0.08, 0.08},
              {0.08, 0.25}, {-0.08, 0.25}, {-0.08, 0.08}, {-0.25, 0.08}, {-0.25, -0.08}, {-0.08, -0.08}},
             0.0, 0.70),
       cylinder(0.0, 0.0, 0.30, 0.70, 0.74)});

  add("bench", {box(-0.60, -0.18, 0.42, 0.60, 0.18, 0.46), box(-0.55, -0.16, 0.0, -0.50, 0.16, 0.42),
                box(0.50, -0.16, 0.0, 0.55, 0.16, 0.42), box(-0.50, -0.02, 0.15, 0.50, 0.02, 0.20)});
  return suite;
}

const ObjectSpec& ScenarioConfig::object() const {
  if (objects.empty()) throw std::invalid_argument("scenario has no objects");
  const std::size_t i = object_index >= 0 ? static_cast<std::size_t>(object_index)
                                          : static_cast<std::size_t>(seed % objects.size());
  if (i >= objects.size()) throw std::invalid_argument("object_index out of range");
  return objects[i];
}

void ScenarioConfig::validate() const {
  robot.validate();
  controller.validate();
  if (objects.empty()) throw std::invalid_argument("scenario has no objects");
  for (const auto& o : objects)
    if (o.primitives.empty()) throw std::invalid_argument("object '" + o.name + "' has no primitives");
  if (object_index >= static_cast<int>(objects.size()))
    throw std::invalid_argument("object_index out of range");
  if (n_nbv < 1) throw std::invalid_argument("n_nbv must be >= 1");
  if (!(obstacles.radius_min > 0.0) || obstacles.radius_max < obstacles.radius_min)
    throw std::invalid_argument("obstacle radius range must satisfy 0 < min <= max");
  if (obstacles.count < 0) throw std::invalid_argument("obstacle count must be >= 0");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (!(episode.dt > 0.0) || episode.scan_every < 1)
    throw std::invalid_argument("dt must be positive and scan_every >= 1");
  if (candidates.radius <= 0.0 || candidates.positions < 1)
    throw std::invalid_argument("candidate space must have positive radius and positions");
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec2 vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

Primitive parse_primitive(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  Primitive p;
  if (type == "box") {
    p.kind = Primitive::Kind::kBox;
    p.min = vec3(j.at("min"));
    p.max = vec3(j.at("max"));
  } else if (type == "cylinder") {
    p.kind = Primitive::Kind::kCylinder;
    p.center = vec2(j.at("center"));
    p.radius = j.at("radius").get<double>();
    read(j, "inner_radius", p.inner_radius);
    const Vec2 z = vec2(j.at("z"));
    p.z0 = z.x();
    p.z1 = z.y();
  } else if (type == "prism") {
    p.kind = Primitive::Kind::kPrism;
    for (const auto& v : j.at("polygon")) p.polygon.push_back(vec2(v));
    if (p.polygon.size() < 3) throw std::invalid_argument("prism polygon needs >= 3 vertices");
    const Vec2 z = vec2(j.at("z"));
    p.z0 = z.x();
    p.z1 = z.y();
  } else {
    throw std::invalid_argument("unknown primitive type '" + type + "'");
  }
  return p;
}

void apply_overrides(const json& j, ScenarioConfig& c) {
  if (j.contains("controller")) {
    const json& s = j.at("controller");
    ControlParams& p = c.controller;
    read(s, "lambda", p.lambda);
    read(s, "lambda_q", p.lambda_q);
    read(s, "alpha", p.alpha);
    read(s, "gamma", p.gamma);
    read(s, "lambda_kappa_floor", p.lambda_kappa_floor);
    read(s, "lambda_d", p.lambda_d);
    read(s, "lambda_v", p.lambda_v);
    read(s, "lambda_phi", p.lambda_phi);
    read(s, "b", p.b);
    read(s, "d0", p.d0);
    read(s, "delta", p.delta);
    read(s, "h", p.h);
    read(s, "d_th", p.d_th);
    read(s, "step_dt", p.step_dt);
    read(s, "cover_softmin_gap", p.cover_softmin_gap);
  }
  if (j.contains("focus")) {
    const json& s = j.at("focus");
    FocusParams& p = c.focus;
    read(s, "fov_horizontal_deg", p.fov_horizontal_deg);
    read(s, "fov_vertical_deg", p.fov_vertical_deg);
    read(s, "grid", p.grid);
    read(s, "focus_distance", p.focus_distance);
    read(s, "max_dist", p.max_dist);
    read(s, "recompute_threshold", p.recompute_threshold);
    read(s, "aim_at_object_center_height", p.aim_at_object_center_height);
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    SamplingParams& p = c.sampling;
    read(s, "sphere_radius", p.sphere_radius);
    read(s, "views_per_node", p.views_per_node);
    read(s, "max_offset", p.max_offset);
    read(s, "min_height", p.min_height);
    read(s, "max_height", p.max_height);
    read(s, "rays_w", p.rays_w);
    read(s, "rays_h", p.rays_h);
    read(s, "d_max", p.d_max);
    read(s, "step", p.rrt.step);
    read(s, "neighbor_radius", p.rrt.neighbor_radius);
    read(s, "max_iters", p.rrt.max_iters);
    read(s, "goal_tolerance", p.rrt.goal_tolerance);
    read(s, "goal_bias", p.rrt.goal_bias);
  }
  if (j.contains("occupancy")) {
    const json& s = j.at("occupancy");
    OccupancyParams& p = c.occupancy;
    read(s, "prob_hit", p.prob_hit);
    read(s, "prob_miss", p.prob_miss);
    read(s, "clamp_min", p.clamp_min);
    read(s, "clamp_max", p.clamp_max);
    read(s, "free_threshold", p.free_threshold);
    read(s, "occupied_threshold", p.occupied_threshold);
  }
  if (j.contains("nbv")) {
    const json& s = j.at("nbv");
    read(s, "rays_x", c.rsv.rays_x);
    read(s, "rays_y", c.rsv.rays_y);
    read(s, "d_max", c.rsv.d_max);
    read(s, "unknown_lo", c.rsv.unknown_lo);
    read(s, "unknown_hi", c.rsv.unknown_hi);
    read(s, "sum_entropy", c.rsv.sum_entropy);
    read(s, "radius", c.candidates.radius);
    read(s, "positions", c.candidates.positions);
    read(s, "view_height", c.candidates.view_height);
    read(s, "offset_angle", c.candidates.offset_angle);
  }
  if (j.contains("obstacles")) {
    const json& s = j.at("obstacles");
    read(s, "count", c.obstacles.count);
    read(s, "radius_min", c.obstacles.radius_min);
    read(s, "radius_max", c.obstacles.radius_max);
    read(s, "ring_clearance", c.obstacles.ring_clearance);
    read(s, "max_attempts", c.obstacles.max_attempts);
  }
  if (j.contains("episode")) {
    const json& s = j.at("episode");
    EpisodeParams& p = c.episode;
    read(s, "dt", p.dt);
    read(s, "scan_every", p.scan_every);
    read(s, "sensor_width", p.sensor_width);
    read(s, "sensor_height", p.sensor_height);
    read(s, "d_max", p.d_max);
    read(s, "arrival_position", p.arrival_position);
    read(s, "arrival_angle_deg", p.arrival_angle_deg);
    read(s, "leg_timeout", p.leg_timeout);
    read(s, "waypoint_position", p.waypoint_position);
    read(s, "waypoint_angle_deg", p.waypoint_angle_deg);
    read(s, "waypoint_timeout", p.waypoint_timeout);
    read(s, "infeasible_abort", p.infeasible_abort);
    read(s, "coverage_epsilon", p.coverage_epsilon);
    read(s, "nbv_threads", p.nbv_threads);
    read(s, "trace", p.trace);
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir) {
  ScenarioConfig c;
  try {
    const json j = json::parse(json_text);
    read(j, "name", c.name);
    read(j, "seed", c.seed);
    if (j.contains("strategy")) {
      const auto s = parse_strategy(j.at("strategy").get<std::string>());
      if (!s) throw std::invalid_argument("unknown strategy");
      c.strategy = *s;
    }
    if (j.contains("objects")) {
      const json& o = j.at("objects");
      if (o.is_string()) {
        if (o.get<std::string>() != "desk") throw std::invalid_argument("unknown object suite");
        c.objects = desk_suite();
      } else {
        for (const auto& obj : o) {
          ObjectSpec spec;
          read(obj, "name", spec.name);
          for (const auto& prim : obj.at("primitives")) spec.primitives.push_back(parse_primitive(prim));
          c.objects.push_back(std::move(spec));
        }
      }
    } else {
      c.objects = desk_suite();
    }
    read(j, "object_index", c.object_index);
    read(j, "resolution", c.resolution);
    if (j.contains("box_size")) c.box_size = vec3(j.at("box_size"));
    read(j, "world_half_extent", c.world_half_extent);
    read(j, "world_height", c.world_height);
    read(j, "forbidden_margin", c.forbidden_margin);
    read(j, "n_nbv", c.n_nbv);
    if (j.contains("robot")) {
      std::filesystem::path p = j.at("robot").get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      c.robot = load_robot_model(p.string());
    }
    apply_overrides(j, c);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).parent_path().string());
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return Rng(seq);
}

ObstacleLayout generate_obstacles(const ObstacleParams& params, const Circle& forbidden,
                                  double footprint_radius, double candidate_radius, Rng& rng) {
  ObstacleLayout layout;
  const double clearance = 2.0 * footprint_radius;
  std::uniform_real_distribution<double> radius(params.radius_min, params.radius_max);
  const double extent = candidate_radius;
  std::uniform_real_distribution<double> coord(-extent, extent);

  int attempts = 0;
  while (layout.groups < params.count && attempts < params.max_attempts) {
    ++attempts;
    const double r = radius(rng);
    const Vec2 c = forbidden.center + Vec2(coord(rng), coord(rng));
    const double from_axis = (c - forbidden.center).norm();
    if (from_axis - r <= forbidden.radius) continue;
    if (from_axis + r > candidate_radius - params.ring_clearance) continue;

    std::vector<Circle> group = {{c, r}};
    const double gap = from_axis - r - forbidden.radius;
    if (gap < clearance) {
      // Wall of touching circles toward the cylinder axis.
      const Vec2 inward = (forbidden.center - c) / from_axis;
      const int k = static_cast<int>(std::ceil(gap / (2.0 * r)));
      for (int i = 1; i <= k; ++i) group.push_back({c + inward * (2.0 * r * i), r});
    }
    bool ok = true;
    for (const Circle& a : group)
      for (const Circle& b : layout.circles)
        if ((a.center - b.center).norm() - a.radius - b.radius <= clearance) ok = false;
    if (!ok) continue;
    for (const Circle& a : group) {
      layout.circles.push_back(a);
      layout.group.push_back(layout.groups);
    }
    layout.wall_circles += static_cast<int>(group.size()) - 1;
    ++layout.groups;
  }
  layout.failed_placements = params.count - layout.groups;
  return layout;
}

World build_world(const ScenarioConfig& config) {
  World w;
  w.object = config.object();
  const Aabb ob = w.object.bounds();
  // Objects are modelled around the origin; the world is centred there.
  const Aabb world_box{Vec3(-config.world_half_extent, -config.world_half_extent, 0.0),
                       Vec3(config.world_half_extent, config.world_half_extent, config.world_height)};
  GroundTruthScene scene(VoxelGrid::covering(world_box, config.resolution));
  scene.bounding_box = {Vec3(-0.5 * config.box_size.x(), -0.5 * config.box_size.y(), 0.0),
                        Vec3(0.5 * config.box_size.x(), 0.5 * config.box_size.y(), config.box_size.z())};
  scene.forbidden_cylinder = {Vec2::Zero(), w.object.footprint_radius() + config.forbidden_margin};

  const VoxelGrid& g = scene.grid;
  const VoxelIndex lo = g.index_of(ob.min);
  const VoxelIndex hi = g.index_of(ob.max);
  for (int z = std::max(lo.z, 0); z <= std::min(hi.z, g.dims().z() - 1); ++z)
    for (int y = std::max(lo.y, 0); y <= std::min(hi.y, g.dims().y() - 1); ++y)
      for (int x = std::max(lo.x, 0); x <= std::min(hi.x, g.dims().x() - 1); ++x) {
        const VoxelIndex v{x, y, z};
        if (w.object.contains(g.center(v))) scene.set_occupied(v);
      }

  Rng rng = make_rng(config.seed, 1);
  w.layout = generate_obstacles(config.obstacles, scene.forbidden_cylinder,
                                config.robot.base_footprint_radius, config.candidates.radius, rng);
  scene.obstacles = w.layout.circles;
  for (const VoxelIndex& v : scene.surface_voxels()) w.reference_cloud.push_back(g.center(v));
  w.scene = std::move(scene);
  return w;
}

Configuration start_configuration(const RobotModel& model, const CandidateView& view) {
  Configuration q;
  q.arm << 0.0, 0.5, 0.7, 0.0, -kPi / 2.0;
  // Bisection on the elbow so the camera height matches the view, keeping the
  // wrist pitch such that the optical axis stays horizontal.
  auto height = [&](double q3) {
    Configuration t = q;
    t.arm[2] = q3;
    t.arm[3] = kPi / 2.0 - t.arm[1] - q3;
    return forward_kinematics(model, t).position.z();
  };
  double lo = 0.0, hi = 1.5;
  if ((height(lo) - view.position.z()) * (height(hi) - view.position.z()) < 0.0) {
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((height(lo) - view.position.z()) * (height(mid) - view.position.z()) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    q.arm[2] = 0.5 * (lo + hi);
  }
  q.arm[3] = kPi / 2.0 - q.arm[1] - q.arm[2];
  q.arm[3] = std::clamp(q.arm[3], model.q_lower[3], model.q_upper[3]);

  const Pose cam = forward_kinematics(model, q);
  const Vec3 d = view.direction;
  q.theta = wrap_angle(std::atan2(d.y(), d.x()));
  const Eigen::Rotation2Dd rot(q.theta);
  const Vec2 offset = rot * cam.position.head<2>();
  q.x = view.position.x() - offset.x();
  q.y = view.position.y() - offset.y();
  return q;
}

}  // namespace viewpath
