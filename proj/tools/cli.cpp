#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "avcert/kinematics.hpp"
#include "avcert/pipeline.hpp"
#include "avcert/scenarios.hpp"
#include "avcert/simulator.hpp"
#include "avcert/stpa.hpp"
#include "avcert/svg.hpp"
#include "avcert/sweep.hpp"

namespace avcert::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  const char* env = std::getenv(kOutEnv);
  return env && *env ? env : ".";
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string file_stem(std::string id) {
  for (char& c : id)
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  return id;
}

void write_file(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(path.string(), "cannot write file");
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(path, "cannot open file");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::pair<std::string, std::string> split_kind_ref(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("evidence must look like kind=reference, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// Every option variable of every subcommand lives here, so one App can be
// built for parsing and for the help doc test alike.
struct Options {
  // distance
  double vr = 0.0, vf = 0.0, p = 1.0, amax = 2.0, bmin = 4.0, bmax = 8.0;
  double v1 = 0.0, v2 = 0.0, lat_p = 0.5, lat_amax = 0.2, lat_b1 = 0.8, lat_b2 = 0.8, mu = 0.3;
  std::optional<double> mu_adh;
  std::string sweep;
  int sweep_points = 50;
  // simulate
  std::string catalog_id, scenario_file, ego = "rss", adversary = "scripted";
  bool blame = false;
  std::optional<double> dt, horizon;
  std::vector<std::string> formats{"csv", "json", "svg"};
  // sweeps
  std::uint64_t seed = 1;
  std::size_t runs = 10000, tuples = 1000, lateral_tuples = 500;
  double oracle_dt = 1e-3;
  bool serial = false;
  // classify
  double follower_speed = 0.0, cutter_speed = 0.0, gap = 0.0;
  // catalog
  std::string export_id;
  bool export_all = false;
  // blame
  std::string trace_file;
  // stpa
  std::string model_file, asil_table;
  // pipeline
  std::string project_id, dir, timestamp, unit_id, layer_project;
  std::vector<std::string> evidence, supplementary, mark;
  int rollback_to = 0, step = 0;
  // shared
  std::string out;
};

struct Cli {
  Options o;
  CLI::App app{"Safety-envelope checks, scenario simulation, hazard analysis and certification tracking.",
               "avcert"};
  CLI::App* distance = nullptr;
  CLI::App* simulate = nullptr;
  CLI::App* sweep = nullptr;
  CLI::App* sweep_soundness = nullptr;
  CLI::App* sweep_oracle = nullptr;
  CLI::App* classify = nullptr;
  CLI::App* catalog = nullptr;
  CLI::App* catalog_list = nullptr;
  CLI::App* catalog_export = nullptr;
  CLI::App* blame = nullptr;
  CLI::App* stpa = nullptr;
  std::map<std::string, CLI::App*> stpa_cmds;
  CLI::App* pipe = nullptr;
  CLI::App* pipe_create = nullptr;
  CLI::App* pipe_status = nullptr;
  CLI::App* pipe_advance = nullptr;
  CLI::App* pipe_unit = nullptr;
  CLI::App* pipe_rollback = nullptr;
  CLI::App* pegasus = nullptr;
  CLI::App* pegasus_step = nullptr;
  CLI::App* pegasus_layers = nullptr;

  Cli() {
    o.out = default_out_dir();
    o.dir = default_out_dir();
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand");
    build_distance();
    build_simulate();
    build_sweep();
    build_classify();
    build_catalog();
    build_blame();
    build_stpa();
    build_pipeline();
  }

  void lon_flags(CLI::App* c) {
    c->add_option("--p", o.p, "Response time P [s]")->capture_default_str();
    c->add_option("--amax", o.amax, "Maximum acceleration during the response time [m/s^2]")
        ->capture_default_str();
    c->add_option("--bmin", o.bmin, "Minimum braking of the rear vehicle [m/s^2]")->capture_default_str();
    c->add_option("--bmax", o.bmax, "Maximum braking of the front vehicle [m/s^2]")->capture_default_str();
  }

  void build_distance() {
    distance = app.add_subcommand("distance", "Safe longitudinal and lateral distances");
    distance->add_option("--vr", o.vr, "Rear vehicle speed [m/s]")->capture_default_str();
    distance->add_option("--vf", o.vf, "Front vehicle speed [m/s]")->capture_default_str();
    lon_flags(distance);
    distance->add_option("--v1", o.v1, "Left vehicle lateral speed, rightward positive [m/s]")
        ->capture_default_str();
    distance->add_option("--v2", o.v2, "Right vehicle lateral speed, rightward positive [m/s]")
        ->capture_default_str();
    distance->add_option("--lat-p", o.lat_p, "Lateral response time [s]")->capture_default_str();
    distance->add_option("--lat-amax", o.lat_amax, "Maximum lateral acceleration [m/s^2]")
        ->capture_default_str();
    distance->add_option("--lat-b1", o.lat_b1, "Lateral braking of the left vehicle [m/s^2]")
        ->capture_default_str();
    distance->add_option("--lat-b2", o.lat_b2, "Lateral braking of the right vehicle [m/s^2]")
        ->capture_default_str();
    distance->add_option("--mu", o.mu, "Lateral fluctuation margin [m]")->capture_default_str();
    distance->add_option("--mu-adh", o.mu_adh,
                         "Road adhesion coefficient; caps braking at mu_adh*g");
    distance->add_option("--sweep", o.sweep,
                         "Sweep the rear speed, e.g. vr=0..40; writes CSV and SVG");
    distance->add_option("--points", o.sweep_points, "Number of sweep samples")
        ->capture_default_str()
        ->check(CLI::Range(2, 100000));
    distance->add_option("--out", o.out, "Output directory (default $AVCERT_OUT or .)");
  }

  void build_simulate() {
    simulate = app.add_subcommand("simulate", "Run a scenario and write its trace");
    auto* cat = simulate->add_option("--catalog", o.catalog_id, "Built-in scenario id");
    auto* file = simulate->add_option("--file", o.scenario_file, "Scenario JSON file");
    cat->excludes(file);
    simulate->add_option("--ego", o.ego, "Ego policy")
        ->check(CLI::IsMember({"rss", "scripted"}))
        ->capture_default_str();
    simulate->add_option("--adversary", o.adversary, "Policy of the other agents")
        ->check(CLI::IsMember({"scripted", "worst-case"}))
        ->capture_default_str();
    simulate->add_flag("--blame", o.blame, "Append the blame report");
    simulate->add_option("--dt", o.dt, "Override the time step [s]");
    simulate->add_option("--horizon", o.horizon, "Override the horizon [s]");
    simulate->add_option("--format", o.formats, "Trace outputs to write")
        ->check(CLI::IsMember({"csv", "json", "svg"}))
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--out", o.out, "Output directory (default $AVCERT_OUT or .)");
  }

  void build_sweep() {
    sweep = app.add_subcommand("sweep", "Seeded randomized sweeps");
    sweep->require_subcommand(1);
    sweep_soundness = sweep->add_subcommand(
        "soundness", "Random follow-lead runs starting at or beyond the safe distance");
    sweep_soundness->add_option("--runs", o.runs, "Number of runs")->capture_default_str();
    sweep_oracle = sweep->add_subcommand("oracle", "Closed-form distances against the rollout oracles");
    sweep_oracle->add_option("--tuples", o.tuples, "Longitudinal tuples")->capture_default_str();
    sweep_oracle->add_option("--lateral-tuples", o.lateral_tuples, "Lateral tuples")
        ->capture_default_str();
    sweep_oracle->add_option("--dt", o.oracle_dt, "Oracle time step [s]")->capture_default_str();
    for (auto* c : {sweep_soundness, sweep_oracle}) {
      c->add_option("--seed", o.seed, "Random seed")->capture_default_str();
      c->add_flag("--serial", o.serial, "Use the serial reference instead of the parallel kernel");
    }
  }

  void build_classify() {
    classify = app.add_subcommand("classify", "Classify a completed cut-in");
    classify->add_option("--follower-speed", o.follower_speed, "Follower speed [m/s]")->required();
    classify->add_option("--cutter-speed", o.cutter_speed, "Cutter speed [m/s]")->required();
    classify->add_option("--gap", o.gap, "Bumper gap after the cut-in [m]")->required();
    lon_flags(classify);
  }

  void build_catalog() {
    catalog = app.add_subcommand("catalog", "Built-in scenario catalog");
    catalog->require_subcommand(1);
    catalog_list = catalog->add_subcommand("list", "List catalog ids");
    catalog_export = catalog->add_subcommand("export", "Write catalog scenarios as JSON files");
    catalog_export->add_option("id", o.export_id, "Scenario id");
    catalog_export->add_flag("--all", o.export_all, "Export every scenario");
    catalog_export->add_option("--out", o.out, "Output directory (default $AVCERT_OUT or .)");
  }

  void build_blame() {
    blame = app.add_subcommand("blame", "Assign blame for a recorded trace");
    blame->add_option("trace", o.trace_file, "Trace JSON file")->required();
  }

  void build_stpa() {
    stpa = app.add_subcommand("stpa", "Hazard analysis workflow");
    stpa->require_subcommand(1);
    const std::vector<std::pair<const char*, const char*>> cmds{
        {"validate", "Validate the model through the causal factors"},
        {"hara", "Print the hazardous events with their ASIL"},
        {"uca-grid", "Print the UCA candidate worksheet"},
        {"concept", "Write the functional safety concept"}};
    for (const auto& [name, desc] : cmds) {
      CLI::App* c = stpa->add_subcommand(name, desc);
      c->add_option("model", o.model_file, "STPA model JSON file")->required();
      c->add_option("--asil-table", o.asil_table, "ASIL table JSON file (default: shipped table)");
      stpa_cmds[name] = c;
    }
    stpa_cmds["concept"]->add_option("--out", o.out, "Output directory (default $AVCERT_OUT or .)");
  }

  void build_pipeline() {
    pipe = app.add_subcommand("pipeline", "Certification pipeline projects");
    pipe->require_subcommand(1);
    pipe->add_option("--dir", o.dir, "Project directory (default $AVCERT_OUT or .)");
    pipe_create = pipe->add_subcommand("create", "Create a project at stage 1");
    pipe_status = pipe->add_subcommand("status", "Print the stage table and deficiencies");
    pipe_advance = pipe->add_subcommand("advance", "Submit evidence and advance when complete");
    pipe_unit = pipe->add_subcommand("unit", "Record production, routine tests and license of a unit");
    pipe_rollback = pipe->add_subcommand("rollback", "Return to an earlier stage for rework");
    for (auto* c : {pipe_create, pipe_status, pipe_advance, pipe_unit, pipe_rollback})
      c->add_option("project", o.project_id, "Project id")->required();
    for (auto* c : {pipe_advance, pipe_unit}) {
      c->add_option("--evidence", o.evidence, "Evidence as kind=reference (repeatable)");
      c->add_option("--supplementary", o.supplementary,
                    "Supplementary evidence as kind=reference (repeatable)");
      c->add_option("--timestamp", o.timestamp, "Evidence timestamp (default: now, UTC)");
    }
    pipe_unit->add_option("--unit", o.unit_id, "Unit id")->required();
    pipe_rollback->add_option("--to", o.rollback_to, "Target stage")->required();
    pegasus = pipe->add_subcommand("pegasus", "PEGASUS process tracking");
    pegasus->require_subcommand(1);
    pegasus_step = pegasus->add_subcommand("step-done", "Mark a PEGASUS step complete");
    pegasus_step->add_option("step", o.step, "Step number 1..20")->required();
    pegasus_layers = pegasus->add_subcommand("layers", "Show or mark argumentation layers");
    pegasus_layers->add_option("--mark", o.mark, "Layer to mark done (repeatable)")
        ->check(CLI::IsMember({"structure", "formalization", "consistency", "completeness",
                               "conformity"}));
    for (auto* c : {pegasus_step, pegasus_layers})
      c->add_option("--project", o.layer_project, "Project id")->required();
  }

  // --- commands -----------------------------------------------------------

  kinematics::LongitudinalParams lon() const {
    return {o.p, o.amax, o.bmin, o.bmax};
  }

  int do_distance(std::ostream& out) {
    const auto params = lon();
    params.validate();
    kinematics::LateralParams lat{o.lat_p, o.lat_amax, o.lat_b1, o.lat_b2, o.mu};
    const double d_lon = kinematics::longitudinal_safe_distance({o.vr, o.vf, 0.0}, params);
    const double d_lat = kinematics::lateral_safe_distance({o.v1, o.v2, 0.0}, lat);
    out << "longitudinal safe distance: " << num(d_lon) << " m\n";
    out << "two-second gap: " << num(kinematics::two_second_gap(o.vr)) << " m\n";
    out << "lateral safe distance: " << num(d_lat) << " m\n";
    std::optional<kinematics::LongitudinalParams> adhesion;
    if (o.mu_adh) {
      kinematics::AdhesionContext ctx;
      ctx.adhesion_coefficient = *o.mu_adh;
      adhesion = kinematics::effective_braking(params, ctx);
      out << "longitudinal safe distance at mu_adh=" << num(*o.mu_adh) << ": "
          << num(kinematics::longitudinal_safe_distance({o.vr, o.vf, 0.0}, *adhesion)) << " m\n";
    }
    if (o.sweep.empty()) return kOk;

    static const std::regex re(R"(^vr=([-+0-9.eE]+)\.\.([-+0-9.eE]+)$)");
    std::smatch m;
    if (!std::regex_match(o.sweep, m, re)) throw UsageError("--sweep expects vr=A..B");
    const double a = std::stod(m[1]), b = std::stod(m[2]);
    if (!(a >= 0.0) || !(b > a)) throw UsageError("--sweep needs 0 <= A < B");
    svg::Series dmin{"d_min", {}, {}}, two{"two-second gap", {}, {}}, adh{"d_min (adhesion)", {}, {}};
    std::ostringstream csv;
    csv << "vr,d_min,two_second_gap" << (adhesion ? ",d_min_adhesion" : "") << "\n";
    for (int i = 0; i < o.sweep_points; ++i) {
      const double vr = a + (b - a) * i / (o.sweep_points - 1);
      const double d = kinematics::longitudinal_safe_distance({vr, o.vf, 0.0}, params);
      const double g = kinematics::two_second_gap(vr);
      csv << num(vr) << ',' << num(d) << ',' << num(g);
      dmin.x.push_back(vr), dmin.y.push_back(d);
      two.x.push_back(vr), two.y.push_back(g);
      if (adhesion) {
        const double da = kinematics::longitudinal_safe_distance({vr, o.vf, 0.0}, *adhesion);
        csv << ',' << num(da);
        adh.x.push_back(vr), adh.y.push_back(da);
      }
      csv << '\n';
    }
    std::vector<svg::Series> series{dmin, two};
    if (adhesion) series.push_back(adh);
    const fs::path dir(o.out);
    write_file(dir / "distance_sweep.csv", csv.str());
    write_file(dir / "distance_sweep.svg",
               svg::line_plot("Safe distance vs rear speed (v_f = " + num(o.vf) + " m/s)",
                              "rear speed v_r [m/s]", "distance [m]", series));
    out << "wrote " << (dir / "distance_sweep.csv").string() << "\n";
    out << "wrote " << (dir / "distance_sweep.svg").string() << "\n";
    return kOk;
  }

  int do_simulate(std::ostream& out) {
    scenarios::ScenarioSpec spec;
    if (!o.catalog_id.empty()) {
      auto found = scenarios::find_in_catalog(o.catalog_id);
      if (!found) throw UsageError("unknown catalog id '" + o.catalog_id + "' (see: catalog list)");
      spec = *found;
    } else if (!o.scenario_file.empty()) {
      spec = scenarios::from_json(read_file(o.scenario_file));
    } else {
      throw UsageError("simulate needs --catalog or --file");
    }
    if (o.dt) spec.dt = *o.dt;
    if (o.horizon) spec = scenarios::with_horizon(std::move(spec), *o.horizon);
    spec.validate();

    simulator::RunOptions ropts;
    ropts.ego = o.ego == "rss" ? simulator::EgoPolicy::Rss : simulator::EgoPolicy::Scripted;
    ropts.adversary = o.adversary == "worst-case" ? simulator::AdversaryPolicy::WorstCase
                                                  : simulator::AdversaryPolicy::Scripted;
    const simulator::RunResult r = simulator::run(spec, ropts);
    const simulator::Trace& t = r.trace;

    out << "scenario: " << spec.id << " (ego " << o.ego << ", adversary " << o.adversary << ")\n";
    out << "frames: " << t.frames.size() << "\n";
    if (t.collision)
      out << "collision: t=" << num(t.collision->time) << " s between " << t.collision->agents.first
          << " and " << t.collision->agents.second << ", relative speed "
          << num(t.collision->relative_speed) << " m/s\n";
    else
      out << "collision: none\n";
    std::array<int, 5> dangerous{};
    for (const auto& f : t.frames)
      if (auto it = f.verdicts.find(f.world.ego_id); it != f.verdicts.end())
        for (int k = 0; k < 5; ++k) dangerous[k] += it->second[k].dangerous();
    out << "ego Dangerous frames per rule:";
    for (int k = 0; k < 5; ++k) out << " r" << k + 1 << "=" << dangerous[k];
    out << "\n";

    const fs::path dir(o.out);
    const std::string stem = file_stem(spec.id);
    const auto wants = [&](const char* f) {
      return std::find(o.formats.begin(), o.formats.end(), f) != o.formats.end();
    };
    std::vector<fs::path> written;
    if (wants("json")) {
      written.push_back(dir / (stem + ".trace.json"));
      write_file(written.back(), simulator::to_json(t));
    }
    if (wants("csv")) {
      written.push_back(dir / (stem + ".trace.csv"));
      write_file(written.back(), simulator::to_csv(t));
    }
    if (wants("svg")) {
      written.push_back(dir / (stem + ".gap.svg"));
      write_file(written.back(), simulator::longitudinal_plot_svg(t));
      written.push_back(dir / (stem + ".lateral.svg"));
      write_file(written.back(), simulator::lateral_plot_svg(t));
    }
    for (const auto& p : written) out << "wrote " << p.string() << "\n";
    if (o.blame) print_blame(out, simulator::assign_blame(t));
    return t.collision || r.ego_rule_violation ? kSafetyViolation : kOk;
  }

  static void print_blame(std::ostream& out, const simulator::BlameReport& b) {
    if (b.blamed.empty()) {
      out << "blame: none\n";
      return;
    }
    out << "blame:";
    for (const auto& id : b.blamed) out << " " << id;
    out << "\n";
    for (const auto& [id, entries] : b.rationale)
      for (const auto& e : entries)
        out << "  " << id << " at t=" << num(e.time) << " s, rule " << e.rule << ": " << e.text << "\n";
  }

  int do_blame(std::ostream& out) {
    const simulator::Trace t = simulator::trace_from_json(read_file(o.trace_file));
    print_blame(out, simulator::assign_blame(t));
    return kOk;
  }

  int do_soundness(std::ostream& out) {
    const auto specs = sweep::random_follow_lead(o.runs, o.seed);
    simulator::RunOptions ropts;
    ropts.all_agent_verdicts = false;
    ropts.keep_frames = false;
    const auto res = sweep::simulate_batch(specs, ropts, o.serial ? sweep::Mode::Serial : sweep::Mode::Parallel);
    std::size_t collisions = 0;
    for (std::size_t i = 0; i < res.size(); ++i)
      if (res[i].collision) {
        if (collisions++ < 10) out << "collision in " << specs[i].id << "\n";
      }
    out << "runs: " << res.size() << " seed: " << o.seed << " collisions: " << collisions << "\n";
    return collisions == 0 ? kOk : kSafetyViolation;
  }

  int do_oracle(std::ostream& out) {
    const sweep::Mode mode = o.serial ? sweep::Mode::Serial : sweep::Mode::Parallel;
    const auto lon_cases = sweep::random_longitudinal_cases(o.tuples, o.seed);
    const auto lon_cf = sweep::safe_distance_batch(lon_cases, mode);
    const auto lon_or = sweep::longitudinal_oracle_batch(lon_cases, o.oracle_dt, mode);
    std::size_t lon_bad = 0;
    double lon_worst = 0.0;
    for (std::size_t i = 0; i < lon_cases.size(); ++i) {
      const double tol = o.oracle_dt * (lon_cases[i].v_rear + lon_cases[i].v_front) + 1e-3;
      const double err = std::abs(lon_cf[i] - lon_or[i]);
      lon_worst = std::max(lon_worst, err / tol);
      lon_bad += err > tol;
    }
    const auto lat_cases = sweep::random_lateral_cases(o.lateral_tuples, o.seed);
    const auto lat_cf = sweep::lateral_distance_batch(lat_cases, mode);
    const auto lat_or = sweep::lateral_oracle_batch(lat_cases, o.oracle_dt, mode);
    std::size_t lat_bad = 0;
    double lat_worst = 0.0;
    for (std::size_t i = 0; i < lat_cases.size(); ++i) {
      const auto& c = lat_cases[i];
      const double tol = o.oracle_dt * (std::abs(c.v1) + std::abs(c.v2) +
                                        2.0 * c.params.lat_accel_max * c.params.response_time) +
                         1e-3;
      const double err = std::abs(lat_cf[i] - lat_or[i]);
      lat_worst = std::max(lat_worst, err / tol);
      lat_bad += err > tol;
    }
    out << "longitudinal: " << lon_cases.size() << " tuples, " << lon_bad
        << " outside tolerance, worst error/tolerance " << num(lon_worst) << "\n";
    out << "lateral: " << lat_cases.size() << " tuples, " << lat_bad
        << " outside tolerance, worst error/tolerance " << num(lat_worst) << "\n";
    return lon_bad + lat_bad == 0 ? kOk : kSafetyViolation;
  }

  int do_classify(std::ostream& out) {
    VehicleState follower, cutter;
    follower.id = "follower";
    cutter.id = "cutter";
    follower.v_lon = o.follower_speed;
    cutter.v_lon = o.cutter_speed;
    cutter.s = follower.front() + o.gap + 0.5 * cutter.length;
    const auto c = scenarios::classify_lane_change(follower, cutter, lon());
    const double d_min =
        kinematics::longitudinal_safe_distance({o.follower_speed, o.cutter_speed, 0.0}, lon());
    out << "verdict: " << scenarios::to_string(c.verdict) << "\n";
    out << "gap: " << num(o.gap) << " m, safe distance: " << num(d_min) << " m\n";
    if (c.verdict == scenarios::LaneChangeVerdict::UnsafeChange)
      out << "intrusion: " << num(c.intrusion) << " m into the follower's safe distance\n";
    return c.verdict == scenarios::LaneChangeVerdict::UnsafeChange ? kSafetyViolation : kOk;
  }

  int do_catalog_list(std::ostream& out) {
    for (const auto& s : scenarios::build_catalog())
      out << s.id << "\t" << scenarios::to_string(s.family) << "\t" << s.description << "\n";
    return kOk;
  }

  int do_catalog_export(std::ostream& out) {
    std::vector<scenarios::ScenarioSpec> specs;
    if (o.export_all) {
      specs = scenarios::build_catalog();
    } else {
      if (o.export_id.empty()) throw UsageError("catalog export needs an id or --all");
      auto s = scenarios::find_in_catalog(o.export_id);
      if (!s) throw UsageError("unknown catalog id '" + o.export_id + "'");
      specs.push_back(*s);
    }
    for (const auto& s : specs) {
      const fs::path p = fs::path(o.out) / (file_stem(s.id) + ".scenario.json");
      write_file(p, scenarios::to_json(s));
      out << "wrote " << p.string() << "\n";
    }
    return kOk;
  }

  int do_stpa(const std::string& cmd, std::ostream& out) {
    const stpa::Model model = stpa::parse_model(read_file(o.model_file));
    const stpa::AsilTable table = o.asil_table.empty() ? stpa::AsilTable::default_table()
                                                       : stpa::load_asil_table(read_file(o.asil_table));
    if (cmd == "uca-grid") {
      const stpa::AnalysisBase base =
          stpa::step0_fundamentals(model.accidents, model.hazards, model.constraints, model.structure);
      out << stpa::uca_grid_json(base, model.ucas);
      return kOk;
    }
    const stpa::Analysis a = stpa::analyze(model, table);
    if (cmd == "validate") {
      out << "OK: " << a.base.accidents.size() << " accidents, " << a.base.hazards.size()
          << " hazards, " << a.base.structure.control_actions.size() << " control actions, "
          << a.events.size() << " hazardous events, " << a.ucas.size() << " confirmed UCAs, "
          << a.factors.size() << " causal factors\n";
      const auto gaps = stpa::completeness_report(a.events, a.ucas, a.factors);
      for (const auto& g : gaps) out << "incomplete: " << g << "\n";
      return kOk;
    }
    if (cmd == "hara") {
      out << stpa::to_json(a.events);
      return kOk;
    }
    const stpa::SafetyConcept sc = stpa::emit_safety_concept(a.base, a.events, a.ucas, a.factors);
    const auto gaps = stpa::traceability_gaps(sc, a.base, a.ucas);
    if (!gaps.empty()) {
      std::string msg = "traceability broken:";
      for (const auto& g : gaps) msg += "\n  - " + g;
      throw InvariantError(msg);
    }
    const fs::path dir(o.out);
    write_file(dir / "safety-concept.json", stpa::to_json(sc));
    write_file(dir / "safety-concept.txt", stpa::report(sc, a));
    write_file(dir / "item-definition.json", stpa::to_json(a.item));
    out << stpa::report(sc, a);
    out << "wrote " << (dir / "safety-concept.json").string() << "\n";
    return kOk;
  }

  fs::path project_path(const std::string& id) const {
    if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos)
      throw UsageError("project id must be a plain name, got '" + id + "'");
    return fs::path(o.dir) / (id + ".project.json");
  }

  pipeline::Project load_project(const std::string& id) const {
    const fs::path p = project_path(id);
    if (!fs::exists(p)) throw ParseError(p.string(), "no such project (create it first)");
    return pipeline::from_json(read_file(p.string()));
  }

  void save_project(const pipeline::Project& p) const {
    write_file(project_path(p.id), pipeline::to_json(p));
  }

  std::vector<pipeline::EvidenceRecord> batch() const {
    const std::string ts = o.timestamp.empty() ? utc_now() : o.timestamp;
    std::vector<pipeline::EvidenceRecord> out;
    for (const auto* list : {&o.evidence, &o.supplementary})
      for (const auto& s : *list) {
        auto [kind, ref] = split_kind_ref(s);
        out.push_back({kind, 0, ref, ts, list == &o.supplementary});
      }
    return out;
  }

  static std::string join_methods(const pipeline::StageDef& s) {
    std::string r;
    for (auto m : s.methods) r += (r.empty() ? "" : ",") + std::string(pipeline::to_string(m));
    return r.empty() ? "-" : r;
  }
  static std::string join_actors(const pipeline::StageDef& s) {
    std::string r;
    for (auto a : s.actors) r += (r.empty() ? "" : ",") + std::string(pipeline::to_string(a));
    return r;
  }

  static void print_status(std::ostream& out, const pipeline::Project& p) {
    out << "project " << p.id << ": stage " << p.current_stage << " ("
        << pipeline::stage(p.current_stage).name << ")\n";
    int pending = 0;
    for (const auto& s : pipeline::stage_table()) {
      const char* status = s.index < p.current_stage ? "done" : s.index == p.current_stage ? "current" : "pending";
      pending += s.index > p.current_stage;
      out << std::setw(3) << s.index << "  " << std::left << std::setw(48) << s.name << std::setw(9)
          << status << std::setw(18) << join_methods(s) << join_actors(s) << std::right << "\n";
    }
    out << pending << " stages pending\n";
    if (p.current_stage <= pipeline::kTypeApprovalStage) {
      const auto missing = pipeline::missing_evidence(p, p.current_stage);
      for (const auto& k : missing) out << "missing evidence: " << k << "\n";
    }
    for (const auto& u : p.units)
      out << "unit " << u.unit_id << ": produced=" << u.produced << " routine_tested=" << u.routine_tested
          << " licensed=" << u.licensed << "\n";
    out << "PEGASUS steps complete: " << p.pegasus.completed_steps.size() << "/20\n";
  }

  int do_pipeline(CLI::App* sub, std::ostream& out) {
    if (sub == pipe_create) {
      if (fs::exists(project_path(o.project_id)))
        throw InvariantError("project '" + o.project_id + "' already exists");
      const pipeline::Project p = pipeline::create_project(o.project_id);
      save_project(p);
      print_status(out, p);
      return kOk;
    }
    if (sub == pipe_status) {
      print_status(out, load_project(o.project_id));
      return kOk;
    }
    if (sub == pipe_advance) {
      pipeline::Project p = load_project(o.project_id);
      const int from = p.current_stage;
      const auto r = pipeline::advance_stage(p, batch());
      save_project(p);
      if (r.advanced) {
        out << "advanced: stage " << from << " -> " << p.current_stage << "\n";
        return kOk;
      }
      out << "refused: stage " << from << " is missing evidence\n";
      for (const auto& d : r.deficiencies) out << "  - " << d << "\n";
      return kGateRefused;
    }
    if (sub == pipe_unit) {
      pipeline::Project p = load_project(o.project_id);
      const auto r = pipeline::record_unit_cycle(p, o.unit_id, batch());
      save_project(p);
      out << "unit " << r.unit.unit_id << ": produced=" << r.unit.produced
          << " routine_tested=" << r.unit.routine_tested << " licensed=" << r.unit.licensed << "\n";
      for (const auto& d : r.deficiencies) out << "  - " << d << "\n";
      return r.unit.licensed ? kOk : kGateRefused;
    }
    if (sub == pipe_rollback) {
      pipeline::Project p = load_project(o.project_id);
      const int from = p.current_stage;
      pipeline::rollback(p, o.rollback_to);
      save_project(p);
      out << "rolled back: stage " << from << " -> " << p.current_stage << "\n";
      return kOk;
    }
    if (sub == pegasus_step) {
      pipeline::Project p = load_project(o.layer_project);
      const bool changed = pipeline::complete_pegasus_step(p, o.step);
      save_project(p);
      out << "step " << o.step << (changed ? " complete" : " was already complete") << "\n";
      return kOk;
    }
    pipeline::Project p = load_project(o.layer_project);
    for (const auto& name : o.mark) pipeline::mark_argumentation_layer(p, *pipeline::layer_from_string(name));
    if (!o.mark.empty()) save_project(p);
    for (const auto& [layer, done] : pipeline::argumentation_checklist(p))
      out << pipeline::to_string(layer) << ": " << (done ? "done" : "pending") << "\n";
    out << "step 20: " << (p.pegasus.completed_steps.count(20) ? "complete" : "open") << "\n";
    return kOk;
  }

  int dispatch(std::ostream& out) {
    if (distance->parsed()) return do_distance(out);
    if (simulate->parsed()) return do_simulate(out);
    if (sweep_soundness->parsed()) return do_soundness(out);
    if (sweep_oracle->parsed()) return do_oracle(out);
    if (classify->parsed()) return do_classify(out);
    if (catalog_list->parsed()) return do_catalog_list(out);
    if (catalog_export->parsed()) return do_catalog_export(out);
    if (blame->parsed()) return do_blame(out);
    for (const auto& [name, c] : stpa_cmds)
      if (c->parsed()) return do_stpa(name, out);
    for (CLI::App* c : {pipe_create, pipe_status, pipe_advance, pipe_unit, pipe_rollback, pegasus_step,
                        pegasus_layers})
      if (c->parsed()) return do_pipeline(c, out);
    throw UsageError("no command given");
  }
};

void collect(const CLI::App* app, const std::string& path, std::vector<HelpEntry>& out) {
  for (const CLI::Option* opt : app->get_options())
    out.push_back({path, opt->get_name(false, true), opt->get_description()});
  for (const CLI::App* sub : app->get_subcommands([](const CLI::App*) { return true; }))
    collect(sub, path + " " + sub->get_name(), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli;
  std::vector<const char*> argv{"avcert"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    cli.app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << cli.app.help("", CLI::AppFormatMode::Normal);
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << cli.app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return cli.app.exit(e, out, err) == 0 ? kOk : kUsage;
  }
  try {
    return cli.dispatch(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const stpa::CompletenessError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const pipeline::GateRefusal& e) {
    err << "refused: " << e.what() << "\n";
    return kGateRefused;
  } catch (const InvariantError& e) {
    err << "invalid: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kIoOrParse;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kIoOrParse;
  }
}

std::vector<HelpEntry> help_entries() {
  Cli cli;
  std::vector<HelpEntry> out;
  collect(&cli.app, "avcert", out);
  return out;
}

std::vector<std::string> undocumented_options() {
  Cli cli;
  std::vector<std::string> missing;
  std::vector<const CLI::App*> stack{&cli.app};
  while (!stack.empty()) {
    const CLI::App* app = stack.back();
    stack.pop_back();
    if (app->get_description().empty()) missing.push_back(app->get_name() + " (subcommand)");
    for (const CLI::Option* opt : app->get_options())
      if (opt->get_description().empty())
        missing.push_back(app->get_name() + " " + opt->get_name(false, true));
    for (const CLI::App* sub : app->get_subcommands([](const CLI::App*) { return true; }))
      stack.push_back(sub);
  }
  return missing;
}

}  // namespace avcert::cli
