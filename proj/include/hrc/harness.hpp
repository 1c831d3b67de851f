// Batch experiments, summary statistics, the pendulum force table and CSV
// reporting.
#pragma once

#include "hrc/model.hpp"
#include "hrc/policy.hpp"
#include "hrc/simworld.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hrc {

// ---- pendulum force estimate ----------------------------------------------

struct PendulumReading {
  double theta_max = 0.0;  // rad
  double L = 0.0;          // m
  double m = 0.0;          // kg
  double delta_t = 0.0;    // s
};

/// Bob angular speed at the bottom of a swing reaching theta:
/// ω = √((2g/L)(1 − cos θ)). Throws std::invalid_argument for L ≤ 0.
double omega_from_angle(double theta, double L, double g = kDefaultGravity);

/// Average force that gave the bob its momentum over delta_t: m·L·ω/Δt.
/// Throws std::invalid_argument for Δt ≤ 0.
double pendulum_avg_force(const PendulumReading& r, double g = kDefaultGravity);

/// Published central value and half-width of one cell of the pendulum table.
struct ForceBand {
  double center = 0.0;
  double half_width = 0.0;
  bool contains(double f) const { return std::abs(f - center) <= half_width; }
};

struct Table1 {
  std::vector<double> speeds;      // m/s, one row each
  std::vector<double> angles;      // rad, per row
  std::vector<double> delta_ts;    // s, one column each
  std::vector<std::vector<double>> force;  // [row][col], N
  std::vector<std::vector<ForceBand>> bands;  // published bands, when known
};

/// Default rows (0.4 m/s: 10.3°, 0.6 m/s: 16.1°) and columns (20–50 ms).
Table1 make_table1(double L, double m, double g = kDefaultGravity);
Table1 make_table1(double L, double m, const std::vector<std::pair<double, double>>& speed_angle,
                   const std::vector<double>& delta_ts, double g = kDefaultGravity);

/// String length that makes one cell's force equal `force`.
double invert_length(double force, double theta, double m, double delta_t, double g = kDefaultGravity);

// ---- batches ---------------------------------------------------------------

struct Stats {
  std::size_t n = 0;
  double mean = 0.0, median = 0.0, p25 = 0.0, p75 = 0.0, min = 0.0, max = 0.0;
};

/// Linear-interpolation percentiles (type 7). Empty input gives n = 0 and zeros.
Stats compute_stats(std::vector<double> values);

struct SummaryRow {
  PolicyKind policy = PolicyKind::FACTORY;
  double speed = 0.0;
  std::size_t reps = 0;
  std::size_t failures = 0;
  Stats task_time;   // successful repetitions only
  Stats stop_count;  // successful repetitions only
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  const SummaryRow* find(PolicyKind policy, double speed) const;
};

/// Groups by (policy, speed) in first-appearance order.
SummaryTable summarize(const std::vector<ExperimentRecord>& records);

struct BatchSpec {
  std::vector<PolicyKind> policies;
  std::vector<double> speeds;
  int reps = 1;
  std::uint64_t base_seed = 0;
  unsigned parallel = 0;  // 0 = hardware concurrency
  SimConfig config;       // speed, seed and policy limits are overwritten per run
};

struct BatchResult {
  std::vector<ExperimentRecord> records;  // policy-major, then speed, then seed
  SummaryTable summary;
};

/// Runs every (policy, speed, rep) with seed = base_seed + rep. A repetition
/// that throws is recorded as a failed run; the batch continues.
BatchResult run_batch(const RobotModel& model, const ScenarioConfig& scenario, const BatchSpec& spec);

// ---- effective mass along a trajectory -------------------------------------

struct TrajectorySample {
  double time = 0.0;
  Eigen::VectorXd q;
};

struct EffMassRow {
  std::size_t sample = 0;
  double time = 0.0;
  std::optional<int> pad;  // none for torque-sensing robots (per link)
  std::size_t link = 0;
  double speed = 0.0;           // contact-point speed, finite differences
  double effective_mass = 0.0;  // along the contact-point velocity
  double half_mass = 0.0;
};

/// For every sample (but the last) and every pad — or every link with
/// geometry when the robot has no pads — the effective mass along the
/// representative point's direction of motion. Points slower than
/// kMinDirectionSpeed are skipped.
std::vector<EffMassRow> tabulate_effective_mass(const RobotModel& model,
                                                const std::vector<TrajectorySample>& trajectory);

/// Pads that registered at least one contact, ascending: the pads that can
/// actually meet an obstacle during the task.
std::vector<int> contact_pads(const std::vector<ExperimentRecord>& records);

/// Rows whose pad is in `pads`.
std::vector<EffMassRow> filter_pads(const std::vector<EffMassRow>& rows, const std::vector<int>& pads);

/// Joint-space samples of an unobstructed execution of the scenario script.
std::vector<TrajectorySample> record_trajectory(const RobotModel& model, const ScenarioConfig& scenario,
                                                double speed, double sample_period, double dt = 0.001);

// ---- CSV -------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;  // throws std::out_of_range
};

/// Reads a CSV written by this module: '#' lines are comments, the first other
/// line is the header. Throws IoError when the file cannot be read.
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_records_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);
void write_contacts_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);
void write_summary_csv(const std::filesystem::path& path, const SummaryTable& summary);
void write_table1_csv(const std::filesystem::path& path, const Table1& table);
void write_effmass_csv(const std::filesystem::path& path, const std::vector<EffMassRow>& rows);
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectorySample>& samples);
std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path);

/// records.csv, contacts.csv, summary.csv and table1.csv in out_dir (created
/// if missing). Throws IoError with the offending path.
void emit_report(const std::vector<ExperimentRecord>& records, const SummaryTable& summary, const Table1& table1,
                 const std::filesystem::path& out_dir);

}  // namespace hrc
