#include "avcert/sweep.hpp"

#include <random>

namespace avcert::sweep {

namespace {

template <class In, class Out, class F>
std::vector<Out> map_batch(const std::vector<In>& in, Mode mode, F f) {
  std::vector<Out> out(in.size());
  const long long n = static_cast<long long>(in.size());
  if (mode == Mode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) out[i] = f(in[i]);
  } else {
    for (long long i = 0; i < n; ++i) out[i] = f(in[i]);
  }
  return out;
}

std::mt19937_64 rng_for(std::uint64_t seed, std::size_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace

std::vector<double> safe_distance_batch(const std::vector<LongitudinalCase>& cases, Mode mode) {
  return map_batch<LongitudinalCase, double>(cases, mode, [](const LongitudinalCase& c) {
    return kinematics::longitudinal_safe_distance({c.v_rear, c.v_front, 0.0}, c.params);
  });
}

std::vector<double> lateral_distance_batch(const std::vector<LateralCase>& cases, Mode mode) {
  return map_batch<LateralCase, double>(cases, mode, [](const LateralCase& c) {
    return kinematics::lateral_safe_distance({c.v1, c.v2, 0.0}, c.params);
  });
}

std::vector<double> longitudinal_oracle_batch(const std::vector<LongitudinalCase>& cases,
                                              double dt, Mode mode) {
  return map_batch<LongitudinalCase, double>(cases, mode, [dt](const LongitudinalCase& c) {
    return simulator::worst_case_gap_oracle(c.v_rear, c.v_front, c.params, dt);
  });
}

std::vector<double> lateral_oracle_batch(const std::vector<LateralCase>& cases, double dt,
                                         Mode mode) {
  return map_batch<LateralCase, double>(cases, mode, [dt](const LateralCase& c) {
    return simulator::worst_case_lateral_oracle(c.v1, c.v2, c.params, dt);
  });
}

std::vector<SimulationOutcome> simulate_batch(const std::vector<scenarios::ScenarioSpec>& specs,
                                              const simulator::RunOptions& options, Mode mode) {
  return map_batch<scenarios::ScenarioSpec, SimulationOutcome>(
      specs, mode, [&options](const scenarios::ScenarioSpec& spec) {
        const simulator::RunResult r = simulator::run(spec, options);
        return SimulationOutcome{r.trace.collision.has_value(), r.ego_rule_violation,
                                 r.min_rule1_margin};
      });
}

std::vector<LongitudinalCase> random_longitudinal_cases(std::size_t n, std::uint64_t seed) {
  std::vector<LongitudinalCase> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto g = rng_for(seed, i);
    LongitudinalCase& c = out[i];
    c.v_rear = uniform(g, 0.0, 50.0);
    c.v_front = uniform(g, 0.0, 50.0);
    c.params.response_time = uniform(g, 0.0, 2.0);
    c.params.accel_max = uniform(g, 0.0, 4.0);
    c.params.brake_min = uniform(g, 2.0, 8.0);
    c.params.brake_max = c.params.brake_min + uniform(g, 0.0, 4.0);
  }
  return out;
}

std::vector<LateralCase> random_lateral_cases(std::size_t n, std::uint64_t seed) {
  std::vector<LateralCase> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto g = rng_for(seed, i);
    LateralCase& c = out[i];
    c.v1 = uniform(g, -2.0, 2.0);
    c.v2 = uniform(g, -2.0, 2.0);
    c.params.response_time = uniform(g, 0.0, 1.0);
    c.params.lat_accel_max = uniform(g, 0.0, 1.0);
    c.params.brake_lat_min_1 = uniform(g, 0.5, 3.0);
    c.params.brake_lat_min_2 = uniform(g, 0.5, 3.0);
    c.params.mu_margin = uniform(g, 0.0, 0.5);
  }
  return out;
}

std::vector<scenarios::ScenarioSpec> random_follow_lead(std::size_t n, std::uint64_t seed) {
  using scenarios::ScriptedAction;
  std::vector<scenarios::ScenarioSpec> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto g = rng_for(seed, i);
    scenarios::ScenarioSpec& spec = out[i];
    spec.id = "follow-lead/random-" + std::to_string(i);
    spec.family = scenarios::Family::FollowLead;
    spec.lane_count = 1;
    spec.speed_limit = 35.0;
    spec.dt = 0.01;
    spec.horizon = 12.0;
    spec.lon.response_time = uniform(g, 0.1, 2.0);
    spec.lon.accel_max = uniform(g, 0.5, 3.0);
    spec.lon.brake_min = uniform(g, 3.0, 8.0);
    spec.lon.brake_max = spec.lon.brake_min + uniform(g, 0.0, 3.0);
    spec.lat.response_time = 0.5;
    spec.lat.lat_accel_max = 0.5;
    spec.lat.mu_margin = 0.3;

    VehicleState ego, lead;
    ego.id = "ego";
    lead.id = "lead";
    ego.d = lead.d = 0.5 * spec.lane_width;
    ego.v_lon = uniform(g, 0.0, 35.0);
    lead.v_lon = uniform(g, 0.0, 35.0);
    const double d_min =
        kinematics::longitudinal_safe_distance({ego.v_lon, lead.v_lon, 0.0}, spec.lon);
    const double gap = d_min + uniform(g, 0.0, 20.0);
    lead.s = ego.front() + gap + 0.5 * lead.length;
    spec.initial_agents = {ego, lead};

    const auto accel = [&](double t, double a) {
      ScriptedAction act;
      act.agent = "lead";
      act.time = t;
      act.accel = a;
      spec.scripted_actions.push_back(act);
    };
    switch (std::uniform_int_distribution<int>(0, 2)(g)) {
      case 0: accel(0.0, -spec.lon.brake_max); break;
      case 1:
        for (double t = 0.0; t < spec.horizon; t += 1.0)
          accel(t, uniform(g, -spec.lon.brake_max, spec.lon.accel_max));
        break;
      default: accel(uniform(g, 0.0, 4.0), -spec.lon.brake_max); break;
    }
  }
  return out;
}

}  // namespace avcert::sweep
