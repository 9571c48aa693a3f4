#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "avcert/kinematics.hpp"
#include "avcert/world.hpp"

namespace avcert::test {

inline VehicleState car(const std::string& id, int lane, double s, double v, double lane_width = 3.5) {
  VehicleState a;
  a.id = id;
  a.lane_index = lane;
  a.s = s;
  a.d = (lane + 0.5) * lane_width;
  a.v_lon = v;
  return a;
}

inline WorldState road(int lanes, std::vector<VehicleState> agents, const std::string& ego = "ego") {
  WorldState w;
  w.ego_id = ego;
  w.lane_count = lanes;
  w.lane_width = 3.5;
  w.legal_speed_limit = 40.0;
  w.agents = std::move(agents);
  return w;
}

/// Places `front` so the bumper gap to `rear` is exactly `gap`.
inline void set_gap(const VehicleState& rear, VehicleState& front, double gap) {
  front.s = rear.front() + gap + 0.5 * front.length;
}

inline kinematics::LongitudinalParams lon(double P, double a, double bmin, double bmax) {
  return {P, a, bmin, bmax};
}

inline kinematics::LateralParams lat(double P, double a, double b1, double b2, double mu) {
  return {P, a, b1, b2, mu};
}

/// Hand-rolled generator source for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  kinematics::LongitudinalParams lon_params() {
    const double bmin = uniform(0.5, 9.0);
    return {uniform(0.0, 2.0), uniform(0.0, 5.0), bmin, bmin + uniform(0.0, 5.0)};
  }
  kinematics::LateralParams lat_params() {
    return {uniform(0.0, 1.0), uniform(0.0, 2.0), uniform(0.2, 4.0), uniform(0.2, 4.0),
            uniform(0.0, 0.5)};
  }

 private:
  std::mt19937_64 rng_;
};

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("avcert-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace avcert::test
