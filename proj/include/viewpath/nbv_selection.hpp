#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "viewpath/voxel_world.hpp"

namespace viewpath {

enum class ViewOrientation { kForward, kUp, kDown, kLeft, kRight };

std::string to_string(ViewOrientation o);

struct CandidateView {
  int id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  ViewOrientation orientation = ViewOrientation::kForward;
  double score = 0.0;

  /// Level camera pose used when scoring the view.
  Pose pose() const { return {look_rotation(direction), position}; }
};

struct CandidateSpace {
  Vec2 center = Vec2::Zero();
  double radius = 3.0;
  int positions = 40;
  double view_height = 0.45;
  double offset_angle = kPi / 6.0;
};

/// `positions` equally spaced azimuths x 5 orientations; ids are
/// position * 5 + orientation.
std::vector<CandidateView> generate_candidates(const CandidateSpace& space);

struct RsvParams {
  FieldOfView fov;
  double d_max = 4.5;
  int rays_x = 32;
  int rays_y = 24;
  double unknown_lo = 0.45;
  double unknown_hi = 0.55;
  /// Sum the entropy of rear-side voxels instead of counting them.
  bool sum_entropy = false;
};

/// Distinct cells that are unknown and directly follow the first occupied
/// cell along some scoring ray.
std::vector<std::size_t> rear_side_voxels(const OccupancyMap& map, const Pose& view,
                                          const RsvParams& params);

double rear_side_voxel_gain(const OccupancyMap& map, const CandidateView& view,
                            const RsvParams& params);

/// Scores every candidate in place; `threads` > 1 splits work across
/// std::threads, results are identical for any thread count.
void score_candidates(const OccupancyMap& map, std::vector<CandidateView>& candidates,
                      const RsvParams& params, int threads = 1);

/// Argmax score over unvisited candidates, ties to the lowest id.
/// Empty when every candidate has been visited.
std::optional<CandidateView> select_nbv(const std::vector<CandidateView>& candidates,
                                        const std::set<int>& visited);

}  // namespace viewpath
