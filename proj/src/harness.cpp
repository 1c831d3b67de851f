#include "hrc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hrc {

namespace {

constexpr double kDeg = M_PI / 180.0;

// Central values and half-widths published for the pendulum table.
const std::map<std::pair<int, int>, ForceBand>& published_bands() {
  static const std::map<std::pair<int, int>, ForceBand> bands = {
      {{400, 20}, {126, 11}}, {{400, 30}, {84, 7}}, {{400, 40}, {63, 5}}, {{400, 50}, {50, 4}},
      {{600, 20}, {198, 10}}, {{600, 30}, {132, 7}}, {{600, 40}, {99, 5}}, {{600, 50}, {79, 4}},
  };
  return bands;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;  // a failure surfaces as the open error below
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(path.string() + ": cannot open for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError(path.string() + ": write failed");
}

std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += ',';
    s += cols[i];
  }
  return s;
}

void header(std::ostream& os, const std::vector<std::string>& cols, const std::string& doc) {
  os << "# columns: " << doc << '\n' << join(cols) << '\n';
}

std::string clean(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

// ---- pendulum --------------------------------------------------------------

double omega_from_angle(double theta, double L, double g) {
  if (!(L > 0.0)) throw std::invalid_argument("omega_from_angle: L must be positive");
  return std::sqrt(2.0 * g / L * (1.0 - std::cos(theta)));
}

double pendulum_avg_force(const PendulumReading& r, double g) {
  if (!(r.delta_t > 0.0)) throw std::invalid_argument("pendulum_avg_force: delta_t must be positive");
  return r.m * r.L * omega_from_angle(r.theta_max, r.L, g) / r.delta_t;
}

double invert_length(double force, double theta, double m, double delta_t, double g) {
  // F = m √(2 g L (1 − cos θ)) / Δt  →  L = (F Δt / m)² / (2 g (1 − cos θ))
  const double v = force * delta_t / m;
  return v * v / (2.0 * g * (1.0 - std::cos(theta)));
}

Table1 make_table1(double L, double m, double g) {
  return make_table1(L, m, {{0.4, 10.3 * kDeg}, {0.6, 16.1 * kDeg}}, {0.020, 0.030, 0.040, 0.050}, g);
}

Table1 make_table1(double L, double m, const std::vector<std::pair<double, double>>& speed_angle,
                   const std::vector<double>& delta_ts, double g) {
  Table1 t;
  t.delta_ts = delta_ts;
  for (const auto& [speed, angle] : speed_angle) {
    t.speeds.push_back(speed);
    t.angles.push_back(angle);
    std::vector<double> row;
    std::vector<ForceBand> band_row;
    for (double dt : delta_ts) {
      row.push_back(pendulum_avg_force(PendulumReading{angle, L, m, dt}, g));
      const auto key = std::make_pair(static_cast<int>(std::lround(speed * 1000)), static_cast<int>(std::lround(dt * 1000)));
      const auto it = published_bands().find(key);
      band_row.push_back(it != published_bands().end() ? it->second : ForceBand{});
    }
    t.force.push_back(std::move(row));
    t.bands.push_back(std::move(band_row));
  }
  return t;
}

// ---- statistics ------------------------------------------------------------

Stats compute_stats(std::vector<double> v) {
  Stats s;
  s.n = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  auto pct = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  s.median = pct(0.5);
  s.p25 = pct(0.25);
  s.p75 = pct(0.75);
  s.min = v.front();
  s.max = v.back();
  return s;
}

const SummaryRow* SummaryTable::find(PolicyKind policy, double speed) const {
  for (const auto& r : rows) {
    if (r.policy == policy && r.speed == speed) return &r;
  }
  return nullptr;
}

SummaryTable summarize(const std::vector<ExperimentRecord>& records) {
  struct Group {
    PolicyKind policy;
    double speed;
    std::vector<const ExperimentRecord*> members;
  };
  std::vector<Group> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.policy == r.policy && g.speed == r.speed; });
    if (it == groups.end()) {
      groups.push_back(Group{r.policy, r.speed, {}});
      it = std::prev(groups.end());
    }
    it->members.push_back(&r);
  }
  SummaryTable table;
  for (auto& g : groups) {
    std::sort(g.members.begin(), g.members.end(),
              [](const ExperimentRecord* a, const ExperimentRecord* b) { return a->seed < b->seed; });
    SummaryRow row;
    row.policy = g.policy;
    row.speed = g.speed;
    row.reps = g.members.size();
    std::vector<double> times, stops;
    for (const auto* r : g.members) {
      if (!r->success) {
        ++row.failures;
        continue;
      }
      times.push_back(r->task_time);
      stops.push_back(static_cast<double>(r->stop_count));
    }
    row.task_time = compute_stats(std::move(times));
    row.stop_count = compute_stats(std::move(stops));
    table.rows.push_back(row);
  }
  return table;
}

// ---- batches ---------------------------------------------------------------

BatchResult run_batch(const RobotModel& model, const ScenarioConfig& scenario, const BatchSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("run_batch: reps must be at least 1");
  validate_pair(model, scenario);

  struct Job {
    PolicyKind policy;
    double speed;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (PolicyKind p : spec.policies) {
    for (double v : spec.speeds) {
      for (int rep = 0; rep < spec.reps; ++rep) {
        jobs.push_back(Job{p, v, spec.base_seed + static_cast<std::uint64_t>(rep)});
      }
    }
  }

  BatchResult result;
  result.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      SimConfig cfg = spec.config;
      cfg.cartesian_speed = job.speed;
      cfg.rng_seed = job.seed;
      cfg.policy = PolicyParams::from_scenario(scenario);
      try {
        result.records[i] = run_task(model, scenario, job.policy, cfg);
      } catch (const std::exception& e) {
        ExperimentRecord r;
        r.policy = job.policy;
        r.speed = job.speed;
        r.seed = job.seed;
        r.success = false;
        r.failure = e.what();
        result.records[i] = std::move(r);
      }
    }
  };
  unsigned threads = spec.parallel ? spec.parallel : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  result.summary = summarize(result.records);
  return result;
}

// ---- effective mass along a trajectory -------------------------------------

std::vector<EffMassRow> tabulate_effective_mass(const RobotModel& model,
                                                const std::vector<TrajectorySample>& trajectory) {
  struct Site {
    std::optional<int> pad;
    std::size_t link;
    Eigen::Vector3d point;
  };
  std::vector<Site> sites;
  if (!model.pads.empty()) {
    std::vector<const SkinPad*> pads;
    for (const auto& p : model.pads) pads.push_back(&p);
    std::sort(pads.begin(), pads.end(), [](const SkinPad* a, const SkinPad* b) { return a->id < b->id; });
    for (const auto* p : pads) sites.push_back(Site{p->id, p->link, pad_representative_point(model, *p)});
  } else {
    for (std::size_t l = 0; l < model.links.size(); ++l) {
      if (!model.links[l].collision_geometry.empty()) {
        sites.push_back(Site{std::nullopt, l, link_representative_point(model, l)});
      }
    }
  }

  std::vector<EffMassRow> rows;
  for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
    const double dt = trajectory[k + 1].time - trajectory[k].time;
    if (!(dt > 0.0)) continue;
    const Eigen::VectorXd qdot = (trajectory[k + 1].q - trajectory[k].q) / dt;
    const Frames frames = forward_kinematics(model, trajectory[k].q);
    for (const auto& s : sites) {
      const Eigen::Vector3d v = point_jacobian(model, frames, s.link, s.point) * qdot;
      const double speed = v.norm();
      if (speed < kMinDirectionSpeed) continue;
      EffMassRow r;
      r.sample = k;
      r.time = trajectory[k].time;
      r.pad = s.pad;
      r.link = s.link;
      r.speed = speed;
      r.effective_mass = effective_mass(model, frames, s.link, s.point, v / speed);
      r.half_mass = half_mass(model, s.link);
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<int> contact_pads(const std::vector<ExperimentRecord>& records) {
  std::vector<int> pads;
  for (const auto& r : records)
    for (const auto& c : r.contacts)
      if (c.pad) pads.push_back(*c.pad);
  std::sort(pads.begin(), pads.end());
  pads.erase(std::unique(pads.begin(), pads.end()), pads.end());
  return pads;
}

std::vector<EffMassRow> filter_pads(const std::vector<EffMassRow>& rows, const std::vector<int>& pads) {
  std::vector<EffMassRow> out;
  for (const auto& r : rows)
    if (r.pad && std::find(pads.begin(), pads.end(), *r.pad) != pads.end()) out.push_back(r);
  return out;
}

std::vector<TrajectorySample> record_trajectory(const RobotModel& model, const ScenarioConfig& scenario,
                                                double speed, double sample_period, double dt) {
  ScenarioConfig free = scenario;
  free.buckets.clear();
  free.clamp.reset();
  SimConfig cfg;
  cfg.dt = dt;
  cfg.cartesian_speed = speed;
  cfg.jitter = JitterConfig{0.0, 0.0};
  cfg.trajectory_sample_period = sample_period;
  const ExperimentRecord rec = run_task(model, free, PolicyKind::FACTORY, cfg);
  std::vector<TrajectorySample> out;
  for (std::size_t i = 0; i < rec.trajectory.size(); ++i) {
    out.push_back(TrajectorySample{static_cast<double>(i) * sample_period, rec.trajectory[i]});
  }
  return out;
}

// ---- CSV -------------------------------------------------------------------

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("csv: no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path.string() + ": cannot open for reading");
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  if (is.bad()) throw IoError(path.string() + ": read failed");
  return t;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_records_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
  auto os = open_out(path);
  header(os, {"policy", "speed", "seed", "success", "task_time", "stop_count", "contacts", "clamp_peak_force", "failure"},
         "policy; commanded Cartesian speed m/s; rng seed; 1 if the script completed; task time s; number of "
         "STOP reactions; number of contact events; peak clamp force N; failure reason (empty on success)");
  for (const auto& r : records) {
    os << to_string(r.policy) << ',' << format_double(r.speed) << ',' << r.seed << ',' << (r.success ? 1 : 0)
       << ',' << format_double(r.task_time) << ',' << r.stop_count << ',' << r.contacts.size() << ','
       << format_double(r.clamp_peak_force) << ',' << clean(r.failure) << '\n';
  }
  finish(os, path);
}

void write_contacts_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
  auto os = open_out(path);
  header(os,
         {"policy", "speed", "seed", "time", "obstacle", "class", "link", "pad", "contact_speed", "m_R_used",
          "mass_model", "estimated_force", "reaction", "measured_force"},
         "policy; commanded speed m/s; rng seed; detection time s; obstacle name; transient or quasi_static; "
         "isolated link index; pad id (empty for torque sensing); representative-point speed m/s; robot mass "
         "used kg; mass model; estimated impact force N; STOP or CONTINUE; measured clamp peak N (clamp only)");
  for (const auto& r : records) {
    for (const auto& c : r.contacts) {
      os << to_string(r.policy) << ',' << format_double(r.speed) << ',' << r.seed << ',' << format_double(c.time)
         << ',' << clean(c.obstacle) << ',' << to_string(c.contact_class) << ',' << c.link << ','
         << opt_int(c.pad) << ',' << format_double(c.speed) << ',' << format_double(c.m_R_used) << ','
         << to_string(c.mass_model) << ',' << format_double(c.estimated_force) << ',' << to_string(c.reaction)
         << ',' << (c.measured_force ? format_double(*c.measured_force) : std::string()) << '\n';
    }
  }
  finish(os, path);
}

void write_summary_csv(const std::filesystem::path& path, const SummaryTable& summary) {
  auto os = open_out(path);
  std::vector<std::string> cols = {"policy", "speed", "reps", "failures"};
  for (const char* m : {"task_time", "stop_count"}) {
    for (const char* s : {"mean", "median", "p25", "p75", "min", "max"}) cols.push_back(std::string(m) + "_" + s);
  }
  header(os, cols,
         "policy; commanded speed m/s; repetitions; failed repetitions; then mean, median, 25th and 75th "
         "percentile (linear interpolation), min and max of task time s and stop count over successful "
         "repetitions");
  for (const auto& r : summary.rows) {
    os << to_string(r.policy) << ',' << format_double(r.speed) << ',' << r.reps << ',' << r.failures;
    for (const Stats* s : {&r.task_time, &r.stop_count}) {
      for (double v : {s->mean, s->median, s->p25, s->p75, s->min, s->max}) os << ',' << format_double(v);
    }
    os << '\n';
  }
  finish(os, path);
}

void write_table1_csv(const std::filesystem::path& path, const Table1& t) {
  auto os = open_out(path);
  header(os, {"speed", "theta_deg", "delta_t_ms", "force", "band_center", "band_half_width", "within_band"},
         "impact speed m/s; maximum swing angle deg; assumed contact duration ms; average force N; published "
         "central value N; published half-width N; 1 if force lies inside the published band");
  for (std::size_t i = 0; i < t.speeds.size(); ++i) {
    for (std::size_t j = 0; j < t.delta_ts.size(); ++j) {
      const ForceBand& b = t.bands[i][j];
      const bool known = b.half_width > 0.0;
      os << format_double(t.speeds[i]) << ',' << format_double(t.angles[i] / kDeg) << ','
         << format_double(t.delta_ts[j] * 1000.0) << ',' << format_double(t.force[i][j]) << ','
         << (known ? format_double(b.center) : "") << ',' << (known ? format_double(b.half_width) : "") << ','
         << (known ? (b.contains(t.force[i][j]) ? "1" : "0") : "") << '\n';
    }
  }
  finish(os, path);
}

void write_effmass_csv(const std::filesystem::path& path, const std::vector<EffMassRow>& rows) {
  auto os = open_out(path);
  header(os, {"sample", "time", "pad", "link", "speed", "effective_mass", "half_mass"},
         "trajectory sample index; time s; pad id (empty when tabulated per link); link index; point speed m/s; "
         "effective mass along the point's motion kg; half-mass model kg");
  for (const auto& r : rows) {
    os << r.sample << ',' << format_double(r.time) << ',' << opt_int(r.pad) << ',' << r.link << ','
       << format_double(r.speed) << ',' << format_double(r.effective_mass) << ',' << format_double(r.half_mass)
       << '\n';
  }
  finish(os, path);
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectorySample>& samples) {
  auto os = open_out(path);
  const std::size_t n = samples.empty() ? 0 : static_cast<std::size_t>(samples.front().q.size());
  std::vector<std::string> cols = {"time"};
  for (std::size_t i = 0; i < n; ++i) cols.push_back("q" + std::to_string(i));
  header(os, cols, "time s; joint positions rad or m, base to tip");
  for (const auto& s : samples) {
    os << format_double(s.time);
    for (Eigen::Index i = 0; i < s.q.size(); ++i) os << ',' << format_double(s.q[i]);
    os << '\n';
  }
  finish(os, path);
}

std::vector<TrajectorySample> read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.empty() || t.header.front() != "time") {
    throw ValidationError(path.string(), "trajectory header must start with 'time'");
  }
  std::vector<TrajectorySample> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() != t.header.size()) {
      throw ValidationError(path.string() + ":row " + std::to_string(r + 1), "wrong number of columns");
    }
    TrajectorySample s;
    s.q.resize(static_cast<Eigen::Index>(row.size() - 1));
    try {
      s.time = std::stod(row[0]);
      for (std::size_t i = 1; i < row.size(); ++i) s.q[static_cast<Eigen::Index>(i - 1)] = std::stod(row[i]);
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ":row " + std::to_string(r + 1), "not a number");
    }
    out.push_back(std::move(s));
  }
  return out;
}

void emit_report(const std::vector<ExperimentRecord>& records, const SummaryTable& summary, const Table1& table1,
                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": " + ec.message());
  write_records_csv(out_dir / "records.csv", records);
  write_contacts_csv(out_dir / "contacts.csv", records);
  write_summary_csv(out_dir / "summary.csv", summary);
  write_table1_csv(out_dir / "table1.csv", table1);
}

}  // namespace hrc
