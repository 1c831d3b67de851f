// hrcsim: batch collision experiments, pendulum force table and effective-mass
// tabulation.
//
// Exit codes: 0 success, 2 validation error (bad flags or input files),
// 3 I/O error, 1 anything else.
#include "hrc/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::vector<hrc::PolicyKind> parse_policies(const std::string& text) {
  if (text == "all") return {hrc::PolicyKind::FACTORY, hrc::PolicyKind::FIXED_MASS, hrc::PolicyKind::ADAPTIVE_MASS};
  const auto p = hrc::parse_policy(text);
  if (!p) throw hrc::ValidationError("--policy", "expected factory, fixed, adaptive or all, got '" + text + "'");
  return {*p};
}

void print_summary(const hrc::SummaryTable& summary) {
  std::printf("%-14s %6s %5s %5s %10s %10s %8s %8s\n", "policy", "speed", "reps", "fail", "time_mean", "time_med",
              "stops", "stops_med");
  for (const auto& r : summary.rows) {
    std::printf("%-14s %6.3f %5zu %5zu %10.3f %10.3f %8.3f %8.3f\n", hrc::to_string(r.policy), r.speed, r.reps,
                r.failures, r.task_time.mean, r.task_time.median, r.stop_count.mean, r.stop_count.median);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive collision-sensitivity experiments"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run seeded repetitions and write CSV reports");
  std::string robot_path, scenario_path, policy_text = "all", out_dir;
  std::vector<double> speeds;
  int reps = 100;
  std::uint64_t seed = 0;
  unsigned parallel = 0;
  double dt = 0.001;
  bool event_log = false;
  run->add_option("--robot", robot_path, "Robot description (JSON)")->required();
  run->add_option("--scenario", scenario_path, "Scenario (JSON)")->required();
  run->add_option("--policy", policy_text, "factory | fixed | adaptive | all")->capture_default_str();
  run->add_option("--speed", speeds, "Cartesian speed m/s (repeatable)")->required()->each([](const std::string& s) {
    if (!(std::stod(s) > 0.0)) throw CLI::ValidationError("--speed", "must be positive");
  });
  run->add_option("--reps", reps, "Repetitions per (policy, speed)")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Base seed; repetition i uses seed + i")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--parallel", parallel, "Worker threads (0 = all cores)")->capture_default_str();
  run->add_option("--dt", dt, "Simulation step s")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_flag("--event-log", event_log, "Also write events.jsonl");

  // table1
  auto* table1 = app.add_subcommand("table1", "Pendulum average-force table");
  double L = 0.64, mass = 5.6;
  std::string table_out;
  table1->add_option("--L", L, "String length m")->capture_default_str()->check(CLI::PositiveNumber);
  table1->add_option("--mass", mass, "Bucket mass kg")->capture_default_str()->check(CLI::PositiveNumber);
  table1->add_option("--out", table_out, "Output CSV file")->required();

  // effmass
  auto* effmass = app.add_subcommand("effmass", "Effective mass vs half mass along a trajectory");
  std::string em_robot, em_traj, em_out;
  std::vector<int> em_pads;
  effmass->add_option("--robot", em_robot, "Robot description (JSON)")->required();
  effmass->add_option("--trajectory", em_traj, "Trajectory CSV (time,q0,...)")->required();
  effmass->add_option("--out", em_out, "Output CSV file")->required();
  effmass->add_option("--pad", em_pads, "Only tabulate this pad id (repeatable)");

  // trajectory
  auto* traj = app.add_subcommand("trajectory", "Record joint samples of an unobstructed scenario run");
  std::string tr_robot, tr_scenario, tr_out;
  double tr_speed = 0.4, tr_period = 0.05;
  traj->add_option("--robot", tr_robot, "Robot description (JSON)")->required();
  traj->add_option("--scenario", tr_scenario, "Scenario (JSON)")->required();
  traj->add_option("--speed", tr_speed, "Cartesian speed m/s")->capture_default_str()->check(CLI::PositiveNumber);
  traj->add_option("--period", tr_period, "Sample period s")->capture_default_str()->check(CLI::PositiveNumber);
  traj->add_option("--out", tr_out, "Output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) {
      const hrc::RobotModel model = hrc::load_robot(robot_path);
      const hrc::ScenarioConfig scenario = hrc::load_scenario(scenario_path);
      hrc::BatchSpec spec;
      spec.policies = parse_policies(policy_text);
      spec.speeds = speeds;
      spec.reps = reps;
      spec.base_seed = seed;
      spec.parallel = parallel;
      spec.config.dt = dt;
      const hrc::BatchResult result = hrc::run_batch(model, scenario, spec);
      const double L_b = scenario.buckets.empty() ? 0.64 : scenario.buckets.front().string_length;
      const double m_b = scenario.buckets.empty() ? 5.6 : scenario.buckets.front().mass;
      hrc::emit_report(result.records, result.summary, hrc::make_table1(L_b, m_b, scenario.gravity), out_dir);
      if (event_log) {
        const auto path = std::filesystem::path(out_dir) / "events.jsonl";
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw hrc::IoError(path.string() + ": cannot open for writing");
        for (const auto& r : result.records) hrc::write_event_log(os, r.events);
        if (!os) throw hrc::IoError(path.string() + ": write failed");
      }
      print_summary(result.summary);
    } else if (*table1) {
      const hrc::Table1 t = hrc::make_table1(L, mass);
      hrc::write_table1_csv(table_out, t);
      for (std::size_t i = 0; i < t.speeds.size(); ++i) {
        std::printf("%.1f m/s:", t.speeds[i]);
        for (double f : t.force[i]) std::printf(" %8.2f", f);
        std::printf("  N\n");
      }
    } else if (*effmass) {
      const hrc::RobotModel model = hrc::load_robot(em_robot);
      const auto samples = hrc::read_trajectory_csv(em_traj);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (static_cast<std::size_t>(samples[i].q.size()) != model.dof()) {
          throw hrc::ValidationError(em_traj + ":row " + std::to_string(i + 1),
                                     "expected " + std::to_string(model.dof()) + " joint values");
        }
      }
      for (int id : em_pads) {
        if (std::none_of(model.pads.begin(), model.pads.end(), [&](const hrc::SkinPad& p) { return p.id == id; }))
          throw hrc::ValidationError("--pad", "no pad with id " + std::to_string(id));
      }
      auto rows = hrc::tabulate_effective_mass(model, samples);
      if (!em_pads.empty()) rows = hrc::filter_pads(rows, em_pads);
      hrc::write_effmass_csv(em_out, rows);
      std::size_t below = 0;
      for (const auto& r : rows) below += r.effective_mass < r.half_mass ? 1 : 0;
      std::printf("%zu rows, effective mass below half mass in %zu\n", rows.size(), below);
    } else if (*traj) {
      const hrc::RobotModel model = hrc::load_robot(tr_robot);
      const hrc::ScenarioConfig scenario = hrc::load_scenario(tr_scenario);
      hrc::write_trajectory_csv(tr_out, hrc::record_trajectory(model, scenario, tr_speed, tr_period));
    }
  } catch (const hrc::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const hrc::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const hrc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
