#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace treewalk {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Locale-independent, round-trip-exact decimal text for a double.
std::string format_double(double value);

/// One named pass/fail verdict with supporting numbers.
struct CheckResult {
  std::string name;
  bool passed = false;
  nlohmann::ordered_json details;
};

nlohmann::ordered_json checks_json(const std::vector<CheckResult>& checks);
bool all_passed(const std::vector<CheckResult>& checks);

/// Plot-ready CSV payload produced by an experiment.
struct CsvArtifact {
  std::string filename;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> csv_row(std::initializer_list<double> values);

void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& body);
void write_csv_file(const std::filesystem::path& path, const CsvArtifact& table);

/// Appends a timestamped line to run.log under the output directory.  The
/// sidecar log is the only artifact allowed to differ between reruns of an
/// identical configuration.
void append_run_log(const std::filesystem::path& out_dir, const std::string& message);

}  // namespace treewalk
