#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rollobs/simulation.hpp"

namespace rollobs {

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

void write_timeseries(const std::vector<TimeseriesRow>& rows, const std::filesystem::path& dir);
void write_snapshots(const std::vector<Snapshot>& snapshots, const Grid& grid, const std::filesystem::path& dir);
void write_summary(const RunSummary& summary, const std::filesystem::path& dir);

std::string summary_to_json(const RunSummary& summary);

/// Reads a timeseries.csv written by write_timeseries. Throws IoError on a
/// missing file or a header that does not match the schema.
std::vector<TimeseriesRow> read_timeseries(const std::filesystem::path& path);

}  // namespace rollobs
