#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace dualaction::cli {

inline constexpr int kSchemaVersion = 1;

/// Runs one command line (program name excluded). The JSON report, or the CSV
/// series with --format csv, goes to --out or else to `out`; usage problems go
/// to `err`. Returns 0 on success, 2 on usage or precondition errors and 1 on
/// numeric failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Skeleton shared by every report.
nlohmann::json make_report(const std::string& command);

/// Problems found when checking `report` against the published report
/// schema, each prefixed with its JSON path. Empty when valid.
std::vector<std::string> validate_report(const nlohmann::json& report);

/// Commands accepted by run(), in schema order.
const std::vector<std::string>& command_names();

}  // namespace dualaction::cli
