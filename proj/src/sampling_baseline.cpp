#include "viewpath/sampling_baseline.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace viewpath {

double RrtTree::path_cost() const {
  double c = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) c += (waypoints[i] - waypoints[i - 1]).norm();
  return c;
}

bool segment_free(const Vec2& a, const Vec2& b, const std::vector<Circle>& circles,
                  double inflation) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  for (const Circle& c : circles) {
    double t = len2 > 0.0 ? (c.center - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double r = c.radius + inflation;
    if ((a + t * ab - c.center).squaredNorm() < r * r) return false;
  }
  return true;
}

RrtTree build_rrt_star(const Vec2& start, const Vec2& goal, const std::vector<Circle>& obstacles,
                       const Circle& forbidden, const RrtParams& params, Rng& rng) {
  std::vector<Circle> circles = obstacles;
  circles.push_back(forbidden);

  RrtTree tree;
  tree.nodes.push_back(start);
  tree.parent.push_back(-1);
  tree.cost.push_back(0.0);
  std::vector<std::vector<int>> children(1);

  auto fallback = [&]() {
    tree.reached = false;
    tree.path = {0};
    tree.waypoints = {start, goal};
    return tree;
  };
  if ((goal - start).norm() <= params.goal_tolerance) {
    tree.reached = true;
    tree.goal_node = 0;
    tree.path = {0};
    tree.waypoints = {start};
    if ((goal - start).norm() > 0.0) tree.waypoints.push_back(goal);
    return tree;
  }
  if (!segment_free(start, start, circles, params.inflation) ||
      !segment_free(goal, goal, circles, params.inflation))
    return fallback();

  auto free = [&](const Vec2& a, const Vec2& b) {
    ++tree.work;
    return segment_free(a, b, circles, params.inflation);
  };
  std::uniform_real_distribution<double> ux(params.bounds_min.x(), params.bounds_max.x());
  std::uniform_real_distribution<double> uy(params.bounds_min.y(), params.bounds_max.y());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::function<void(int, double)> shift_costs = [&](int node, double delta) {
    for (int c : children[node]) {
      tree.cost[c] += delta;
      shift_costs(c, delta);
    }
  };

  int best_goal = -1;
  double best_goal_cost = std::numeric_limits<double>::infinity();
  std::vector<int> near;
  for (int it = 0; it < params.max_iters; ++it) {
    Vec2 sample = unit(rng) < params.goal_bias ? goal : Vec2(ux(rng), uy(rng));
    int nearest = 0;
    double nd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const double d = (tree.nodes[i] - sample).squaredNorm();
      if (d < nd) {
        nd = d;
        nearest = static_cast<int>(i);
      }
    }
    Vec2 dir = sample - tree.nodes[nearest];
    const double dist = dir.norm();
    if (dist < 1e-12) continue;
    const Vec2 candidate = dist > params.step ? Vec2(tree.nodes[nearest] + dir * (params.step / dist)) : sample;
    if (!free(tree.nodes[nearest], candidate)) continue;

    near.clear();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
      if ((tree.nodes[i] - candidate).norm() <= params.neighbor_radius) near.push_back(static_cast<int>(i));

    int parent = nearest;
    double cost = tree.cost[nearest] + (candidate - tree.nodes[nearest]).norm();
    for (int j : near) {
      const double c = tree.cost[j] + (candidate - tree.nodes[j]).norm();
      if (c < cost - 1e-12 && free(tree.nodes[j], candidate)) {
        parent = j;
        cost = c;
      }
    }
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(candidate);
    tree.parent.push_back(parent);
    tree.cost.push_back(cost);
    children.emplace_back();
    children[parent].push_back(id);

    for (int j : near) {
      if (j == parent) continue;
      const double c = cost + (tree.nodes[j] - candidate).norm();
      if (c < tree.cost[j] - 1e-12 && free(candidate, tree.nodes[j])) {
        auto& siblings = children[tree.parent[j]];
        siblings.erase(std::find(siblings.begin(), siblings.end(), j));
        tree.parent[j] = id;
        children[id].push_back(j);
        const double delta = c - tree.cost[j];
        tree.cost[j] = c;
        shift_costs(j, delta);
      }
    }
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const double to_goal = (tree.nodes[i] - goal).norm();
    if (to_goal > params.goal_tolerance) continue;
    const double total = tree.cost[i] + to_goal;
    if (total < best_goal_cost && (to_goal == 0.0 || free(tree.nodes[i], goal))) {
      best_goal_cost = total;
      best_goal = static_cast<int>(i);
    }
  }
  if (best_goal < 0) return fallback();

  tree.reached = true;
  tree.goal_node = best_goal;
  for (int n = best_goal; n >= 0; n = tree.parent[n]) tree.path.push_back(n);
  std::reverse(tree.path.begin(), tree.path.end());
  for (int n : tree.path) tree.waypoints.push_back(tree.nodes[n]);
  if ((tree.waypoints.back() - goal).norm() > 0.0) tree.waypoints.push_back(goal);
  return tree;
}

Vec3 view_direction(const Vec3& position, const Vec2& cylinder_center, double yaw, double pitch) {
  const Vec2 to_axis = cylinder_center - position.head<2>();
  const double heading = std::atan2(to_axis.y(), to_axis.x()) + yaw;
  return {std::cos(pitch) * std::cos(heading), std::cos(pitch) * std::sin(heading), std::sin(pitch)};
}

std::vector<LocalView> sample_views_around_node(const Vec3& node, double sphere_radius, int count,
                                                const Vec2& cylinder_center,
                                                const std::vector<Circle>& keep_out,
                                                const SamplingParams& params, Rng& rng) {
  std::uniform_real_distribution<double> cube(-sphere_radius, sphere_radius);
  std::uniform_real_distribution<double> offset(-params.max_offset, params.max_offset);
  std::vector<LocalView> views;
  int rejections = 0;
  while (static_cast<int>(views.size()) < count) {
    const Vec3 d(cube(rng), cube(rng), cube(rng));
    Vec3 pos = node + d;
    bool ok = d.norm() <= sphere_radius && pos.z() >= params.min_height && pos.z() <= params.max_height;
    if (ok) ok = segment_free(pos.head<2>(), pos.head<2>(), keep_out, params.rrt.inflation);
    if (!ok) {
      // Give up on constraints after many rejections so the count is honoured.
      if (++rejections < params.max_rejections) continue;
      pos = node;
    }
    LocalView v;
    v.position = pos;
    v.yaw = offset(rng);
    v.pitch = offset(rng);
    v.direction = view_direction(pos, cylinder_center, v.yaw, v.pitch);
    views.push_back(v);
  }
  return views;
}

double evaluate_view_entropy(const OccupancyMap& map, const Pose& view, const FieldOfView& fov,
                             int rays_w, int rays_h, double d_max, std::size_t* work) {
  double total = 0.0;
  for (const Vec3& dir : camera_rays(view, fov, rays_w, rays_h)) {
    map.grid().walk(view.position, dir, d_max, [&](std::size_t cell, const VoxelIndex&, double, double) {
      if (work) ++*work;
      if (map.is_occupied(cell)) return false;
      total += log_odds_entropy(map.log_odds(cell));
      return true;
    });
  }
  return total;
}

LocalView next_local_target(SamplingLeg& leg, const OccupancyMap& map,
                            const Vec3& current_position, const Vec2& cylinder_center,
                            const std::vector<Circle>& keep_out, const SamplingParams& params,
                            Rng& rng, bool* is_final, std::size_t* work) {
  const std::size_t last = leg.path.empty() ? 0 : leg.path.size() - 1;
  while (leg.cursor < last && (leg.path[leg.cursor] - current_position).norm() <= params.sphere_radius)
    ++leg.cursor;
  if (leg.path.empty() || leg.cursor >= last) {
    if (is_final) *is_final = true;
    LocalView nbv;
    if (!leg.path.empty()) nbv.position = leg.path.back();
    nbv.direction = leg.nbv_direction;
    return nbv;
  }
  if (is_final) *is_final = false;
  auto views = sample_views_around_node(leg.path[leg.cursor], params.sphere_radius,
                                        params.views_per_node, cylinder_center, keep_out, params, rng);
  std::size_t best = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    views[i].score = evaluate_view_entropy(map, views[i].pose(), params.fov, params.rays_w,
                                           params.rays_h, params.d_max, work);
    if (views[i].score > views[best].score) best = i;
  }
  ++leg.cursor;
  return views[best];
}

}  // namespace viewpath
