#include "viewpath/episode.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "viewpath/metrics.hpp"

namespace viewpath {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class EpisodeRunner {
 public:
  explicit EpisodeRunner(const ScenarioConfig& config)
      : cfg_(config),
        world_(build_world(config)),
        map_(world_.scene.grid, config.occupancy),
        tracker_(world_.reference_cloud, config.episode.coverage_epsilon),
        sampling_rng_(make_rng(config.seed, 2)) {
    controller_ = cfg_.controller;
    if (controller_.step_dt <= 0.0) controller_.step_dt = cfg_.episode.dt;
    control_obstacles_ = world_.layout.circles;
    control_obstacles_.push_back(world_.scene.forbidden_cylinder);
    axis_ = world_.scene.forbidden_cylinder.center;
    aim_z_ = world_.object.bounds().center().z();
    sampling_ = cfg_.sampling;
    sampling_.rrt.inflation = cfg_.robot.base_footprint_radius;
    const Aabb wb = world_.scene.grid.bounds();
    sampling_.rrt.bounds_min = wb.min.head<2>();
    sampling_.rrt.bounds_max = wb.max.head<2>();
  }

  EpisodeLog run() {
    const auto t_start = Clock::now();
    log_.seed = cfg_.seed;
    log_.strategy = cfg_.strategy;
    log_.scenario = cfg_.name;
    log_.object = world_.object.name;
    log_.obstacle_groups = world_.layout.groups;
    log_.wall_circles = world_.layout.wall_circles;
    log_.failed_placements = world_.layout.failed_placements;
    log_.reference_points = world_.reference_cloud.size();
    log_.max_entropy = static_cast<double>(cells_in_box(map_.grid(), world_.scene.bounding_box)) *
                       std::numbers::ln2;

    CandidateSpace space = cfg_.candidates;
    space.center = axis_;
    candidates_ = generate_candidates(space);
    q_ = start_configuration(cfg_.robot, candidates_.front());
    visited_.insert(candidates_.front().id);

    scan();
    log_.initial_entropy = total_entropy(map_, world_.scene.bounding_box);
    log_.initial_coverage = tracker_.coverage();

    for (int k = 1; k <= cfg_.n_nbv && !log_.aborted; ++k) {
      const auto t_nbv = Clock::now();
      score_candidates(map_, candidates_, cfg_.rsv, cfg_.episode.nbv_threads);
      const auto nbv = select_nbv(candidates_, visited_);
      nbv_wall_ += seconds_since(t_nbv);
      if (!nbv) break;
      visited_.insert(nbv->id);

      const double planner_before = planner_wall_;
      leg_steps_left_ = static_cast<int>(std::llround(cfg_.episode.leg_timeout / cfg_.episode.dt));
      bool arrived = false;
      switch (cfg_.strategy) {
        case Strategy::kFocus:
        case Strategy::kNoPath:
          arrived = drive({nbv->position, nbv->direction}, cfg_.episode.arrival_position,
                          cfg_.episode.arrival_angle_deg, cfg_.episode.leg_timeout);
          break;
        case Strategy::kSampling:
          arrived = sampling_leg(*nbv);
          break;
      }

      NbvRecord r = counters_;
      r.step = k;
      r.nbv_id = nbv->id;
      r.orientation = to_string(nbv->orientation);
      r.score = nbv->score;
      r.arrived = arrived;
      r.coverage = tracker_.coverage();
      r.entropy = total_entropy(map_, world_.scene.bounding_box);
      r.travel_time = steps_ * cfg_.episode.dt;
      r.control_steps = steps_;
      r.planner_work = planner_work_;
      log_.records.push_back(r);
      log_.timing.push_back({planner_wall_, nbv_wall_, planner_wall_ - planner_before});
    }
    log_.wall_time = seconds_since(t_start);
    return std::move(log_);
  }

 private:
  void scan() {
    const Pose cam = forward_kinematics(cfg_.robot, q_);
    const DepthScan s = simulate_depth_scan(world_.scene, cam, cfg_.controller.fov, cfg_.episode.sensor_width,
                                            cfg_.episode.sensor_height, cfg_.episode.d_max);
    integrate_scan(map_, s);
    for (const DepthRay& ray : s.rays) {
      if (!ray.hit) continue;
      const auto cell = static_cast<std::size_t>(ray.hit_cell);
      if (map_.is_occupied(cell)) tracker_.add_point(map_.grid().center(map_.grid().unravel(cell)));
    }
    ++counters_.scans;
  }

  bool reached(const TaskVector& target, double pos_tol, double angle_tol_deg) const {
    const TaskVector x = task_vector(cfg_.robot, q_);
    return (x.p - target.p).norm() < pos_tol && angle_between(x.l, target.l) < deg2rad(angle_tol_deg);
  }

  /// Drives toward `target` until within tolerance or `timeout` simulated
  /// seconds elapse. Returns true on arrival.
  bool drive(const TaskVector& target, double pos_tol, double angle_tol_deg, double timeout) {
    const int max_steps = static_cast<int>(std::llround(timeout / cfg_.episode.dt));
    for (int i = 0; i < max_steps; ++i) {
      if (reached(target, pos_tol, angle_tol_deg)) return true;
      if (leg_steps_left_ <= 0) return false;

      ControlTarget ct{target, std::nullopt};
      if (cfg_.strategy == Strategy::kFocus) {
        const auto t0 = Clock::now();
        bool recomputed = false;
        const Vec3 cam = task_vector(cfg_.robot, q_).p;
        focus_ = update_focus(focus_, cam, map_, axis_, aim_z_, cfg_.focus, &recomputed, &planner_work_);
        planner_wall_ += seconds_since(t0);
        if (recomputed) {
          ++counters_.focus_recomputes;
          log_.focus_trace.push_back({steps_, focus_->anchor, focus_->point, focus_->best_ray_gain});
        }
        ct.focus = focus_->point;
      }

      const ControlOutput out = control_step(cfg_.robot, q_, ct, control_obstacles_, controller_);
      record(out.diagnostics, ct.focus.has_value());
      if (log_.aborted) return false;

      q_ = integrate(q_, out.qdot, cfg_.episode.dt);
      ++steps_;
      --leg_steps_left_;
      if (steps_ % cfg_.episode.scan_every == 0) scan();
    }
    return reached(target, pos_tol, angle_tol_deg);
  }

  void record(const ControlDiagnostics& d, bool with_focus) {
    if (d.status != QpStatus::kOptimal) {
      ++counters_.infeasible_steps;
      if (++infeasible_streak_ > cfg_.episode.infeasible_abort) {
        log_.aborted = true;
        log_.abort_reason = std::string("controller ") + to_string(d.status) + " for more than " +
                            std::to_string(cfg_.episode.infeasible_abort) + " steps";
      }
    } else {
      infeasible_streak_ = 0;
    }
    if (!std::isnan(d.softmin)) {
      if (first_distance_) {
        counters_.min_softmin = d.softmin;
        counters_.min_clearance = d.min_clearance;
        first_distance_ = false;
      }
      counters_.min_softmin = std::min(counters_.min_softmin, d.softmin);
      counters_.min_clearance = std::min(counters_.min_clearance, d.min_clearance);
      if (d.softmin < -1e-3) ++counters_.vfi_violations;
      if (d.min_clearance < 0.0) ++counters_.penetrations;
    }
    double min_vis = std::numeric_limits<double>::quiet_NaN();
    if (with_focus) {
      min_vis = d.visibility_margin.minCoeff();
      if (d.position_error > 0.5) {
        ++counters_.visibility_steps;
        if (min_vis >= -1e-3) ++counters_.visibility_ok;
      }
    }
    if (cfg_.episode.trace)
      log_.trace.push_back({steps_ * cfg_.episode.dt, d.position_error, d.angle_error, d.softmin, min_vis,
                            d.lambda_kappa, d.status});
  }

  bool sampling_leg(const CandidateView& nbv) {
    const Vec3 cam = task_vector(cfg_.robot, q_).p;

    const auto t0 = Clock::now();
    const RrtTree tree = build_rrt_star(cam.head<2>(), nbv.position.head<2>(), world_.layout.circles,
                                        world_.scene.forbidden_cylinder, sampling_.rrt, sampling_rng_);
    planner_wall_ += seconds_since(t0);
    planner_work_ += tree.work;
    if (!tree.reached) ++log_.rrt_fallbacks;

    SamplingLeg leg;
    leg.nbv_direction = nbv.direction;
    for (const Vec2& w : tree.waypoints) leg.path.push_back(Vec3(w.x(), w.y(), nbv.position.z()));
    leg.path.front() = cam;
    leg.path.back() = nbv.position;

    while (leg_steps_left_ > 0 && !log_.aborted) {
      bool final = false;
      const auto t1 = Clock::now();
      const Vec3 here = task_vector(cfg_.robot, q_).p;
      const LocalView target = next_local_target(leg, map_, here, axis_, control_obstacles_, sampling_,
                                                 sampling_rng_, &final, &planner_work_);
      planner_wall_ += seconds_since(t1);
      if (final)
        return drive({nbv.position, nbv.direction}, cfg_.episode.arrival_position,
                     cfg_.episode.arrival_angle_deg, cfg_.episode.leg_timeout);
      ++counters_.waypoints;
      drive({target.position, target.direction}, cfg_.episode.waypoint_position,
            cfg_.episode.waypoint_angle_deg, cfg_.episode.waypoint_timeout);
    }
    return false;
  }

  const ScenarioConfig& cfg_;
  World world_;
  OccupancyMap map_;
  CoverageTracker tracker_;
  Rng sampling_rng_;
  SamplingParams sampling_;
  ControlParams controller_;
  std::vector<Circle> control_obstacles_;
  Vec2 axis_ = Vec2::Zero();
  double aim_z_ = 0.0;
  std::vector<CandidateView> candidates_;
  std::set<int> visited_;
  Configuration q_;
  std::optional<FocusState> focus_;

  EpisodeLog log_;
  NbvRecord counters_;
  bool first_distance_ = true;
  int steps_ = 0;
  int leg_steps_left_ = 0;
  int infeasible_streak_ = 0;
  std::size_t planner_work_ = 0;
  double planner_wall_ = 0.0;
  double nbv_wall_ = 0.0;
};

}  // namespace

EpisodeLog run_episode(const ScenarioConfig& config) {
  config.validate();
  EpisodeRunner runner(config);
  return runner.run();
}

}  // namespace viewpath
