#include "rollobs/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rollobs {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

template <std::size_t N>
void write_header(std::ostream& out, const std::array<std::string_view, N>& columns) {
  for (std::size_t i = 0; i < N; ++i) {
    if (i) out << ',';
    out << columns[i];
  }
  out << '\n';
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json vec_json(const Vec& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

double parse_field(std::string_view text, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  return value;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void write_timeseries(const std::vector<TimeseriesRow>& rows, const std::filesystem::path& dir) {
  const auto path = dir / "timeseries.csv";
  auto out = open_output(path);
  write_header(out, kTimeseriesColumns);
  std::string line;
  for (const auto& r : rows) {
    line.clear();
    for (double v : {r.t, r.vy, r.r, r.vy_hat, r.r_hat, r.theta1_true, r.theta2_true, r.theta1_hat, r.theta2_hat,
                     r.Z1, r.Z1_bar, r.err_norm_X, r.err_norm_Y, r.state_norm_X, r.est_norm_X}) {
      line += format_double(v);
      line += ',';
    }
    line += r.pe_min_eig ? format_double(*r.pe_min_eig) : "nan";
    line += '\n';
    out << line;
  }
  finish(out, path);
}

void write_snapshots(const std::vector<Snapshot>& snapshots, const Grid& grid, const std::filesystem::path& dir) {
  const auto path = dir / "snapshots.csv";
  auto out = open_output(path);
  write_header(out, kSnapshotColumns);
  for (const auto& s : snapshots) {
    if (s.z.rows() < 2 || s.z_hat.rows() < 2 || s.z.cols() != grid.nodes() || s.z_hat.cols() != grid.nodes())
      throw ConfigError("snapshot shape does not match the grid");
    for (Eigen::Index j = 0; j < grid.nodes(); ++j) {
      out << format_double(s.t) << ',' << format_double(grid.xi(j)) << ',' << format_double(s.z(0, j)) << ','
          << format_double(s.z(1, j)) << ',' << format_double(s.z_hat(0, j)) << ',' << format_double(s.z_hat(1, j))
          << '\n';
    }
  }
  finish(out, path);
}

std::string summary_to_json(const RunSummary& summary) {
  nlohmann::json j;
  j["final_theta_hat"] = vec_json(summary.final_theta_hat);
  j["theta_tolerance"] = summary.theta_tolerance;
  auto phases = nlohmann::json::array();
  for (const auto& p : summary.phases) {
    phases.push_back({{"start", p.start},
                      {"end", p.end},
                      {"theta", vec_json(p.theta)},
                      {"theta_reached_at", optional_json(p.theta_reached_at)},
                      {"err_norm_X_min", p.err_norm_X_min},
                      {"err_norm_X_max", p.err_norm_X_max}});
  }
  j["phases"] = phases;
  j["pe"] = {{"window", summary.pe.window},
             {"threshold", summary.pe.threshold},
             {"first_ready_t", optional_json(summary.pe.first_ready_t)},
             {"min_eig", optional_json(summary.pe.min_eig)},
             {"max_eig", optional_json(summary.pe.max_eig)},
             {"fraction_above_threshold", summary.pe.fraction_above_threshold}};
  j["wall_clock_seconds"] = summary.wall_clock_seconds;
  return j.dump(2) + "\n";
}

void write_summary(const RunSummary& summary, const std::filesystem::path& dir) {
  const auto path = dir / "summary.json";
  auto out = open_output(path);
  out << summary_to_json(summary);
  finish(out, path);
}

std::vector<TimeseriesRow> read_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  std::string expected;
  for (std::size_t i = 0; i < kTimeseriesColumns.size(); ++i) {
    if (i) expected += ',';
    expected += kTimeseriesColumns[i];
  }
  if (line != expected) throw IoError(path.string() + ": unexpected header");

  std::vector<TimeseriesRow> rows;
  std::size_t line_no = 1;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    values.clear();
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_field(rest.substr(0, comma), path, line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (values.size() != kTimeseriesColumns.size())
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 16 fields");
    TimeseriesRow r;
    double* fields[] = {&r.t,          &r.vy,          &r.r,          &r.vy_hat,     &r.r_hat,
                        &r.theta1_true, &r.theta2_true, &r.theta1_hat, &r.theta2_hat, &r.Z1,
                        &r.Z1_bar,      &r.err_norm_X,  &r.err_norm_Y, &r.state_norm_X, &r.est_norm_X};
    for (std::size_t i = 0; i < 15; ++i) *fields[i] = values[i];
    if (!std::isnan(values[15])) r.pe_min_eig = values[15];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace rollobs
