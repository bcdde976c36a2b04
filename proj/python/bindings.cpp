#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "viewpath/bayes.hpp"
#include "viewpath/controller.hpp"
#include "viewpath/episode.hpp"
#include "viewpath/metrics.hpp"
#include "viewpath/reporting.hpp"
#include "viewpath/scenario.hpp"
#include "viewpath/voxel_world.hpp"

namespace py = pybind11;
using namespace viewpath;

namespace {

Strategy strategy_from(const std::string& name) {
  const auto s = parse_strategy(name);
  if (!s) throw py::value_error("unknown strategy '" + name + "'");
  return *s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Visibility-aware view path planning simulation core";

  m.def("voxel_entropy", &voxel_entropy, py::arg("p"));
  m.def(
      "ray_entropy",
      [](const std::vector<double>& probabilities) {
        // Cells of a straight ray, in order; stops before the first occupied one.
        const int n = static_cast<int>(probabilities.size());
        const VoxelGrid g(Vec3::Zero(), 1.0, Eigen::Vector3i(std::max(n, 1), 1, 1));
        OccupancyMap map(g);
        for (int i = 0; i < n; ++i) map.set_probability({i, 0, 0}, probabilities[i]);
        return ray_information(map, Vec3(0.0, 0.5, 0.5), Vec3::UnitX(), n);
      },
      py::arg("probabilities"));

  m.def("softmin_distance", &softmin_distance, py::arg("distances"), py::arg("h") = 0.03,
        py::arg("delta") = 0.05);
  m.def("beta", &beta, py::arg("d"), py::arg("b") = 0.044, py::arg("d0") = 0.14);

  m.def(
      "coverage",
      [](const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>& partial,
         const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>& reference, double eps) {
        PointCloud a, b;
        for (Eigen::Index i = 0; i < partial.rows(); ++i) a.push_back(partial.row(i).transpose());
        for (Eigen::Index i = 0; i < reference.rows(); ++i) b.push_back(reference.row(i).transpose());
        return coverage(a, b, eps);
      },
      py::arg("partial"), py::arg("reference"), py::arg("eps") = 0.008);

  m.def(
      "hdi",
      [](std::vector<double> draws, double mass) {
        const Interval i = hdi(std::move(draws), mass);
        return py::make_tuple(i.lo, i.hi);
      },
      py::arg("draws"), py::arg("mass") = 0.95);
  m.def(
      "rope_decision",
      [](std::pair<double, double> h, std::pair<double, double> rope) {
        const RopeVerdict v = rope_decision({h.first, h.second}, {rope.first, rope.second});
        return py::make_tuple(to_string(v.kind), v.overlap);
      },
      py::arg("hdi"), py::arg("rope"));

  m.def(
      "run_episode",
      [](const std::string& scenario, std::uint64_t seed, const std::string& strategy) {
        ScenarioConfig c = load_scenario(scenario);
        c.seed = seed;
        c.strategy = strategy_from(strategy);
        EpisodeLog log;
        {
          py::gil_scoped_release release;
          log = run_episode(c);
        }
        return py::make_tuple(summary_json(log), episode_csv(log));
      },
      py::arg("scenario"), py::arg("seed"), py::arg("strategy"),
      "Runs one episode; returns (summary JSON text, episode CSV text).");
}
