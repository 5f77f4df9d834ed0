#include <algorithm>

#include "dualaction/cli.hpp"
#include "dualaction/error.hpp"

namespace dualaction::cli {

using nlohmann::json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "classify", "action", "bounds", "propagate", "spin", "hj-check", "legendre-check"};
  return names;
}

json make_report(const std::string& command) {
  return json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"status", "ok"},
              {"exit_code", 0},
              {"parameters", json::object()},
              {"summary", json::object()},
              {"results", json::object()},
              {"tolerances", json::object()},
              {"error", nullptr}};
}

namespace {

const std::vector<std::string>& error_codes() {
  static const std::vector<std::string> codes = [] {
    std::vector<std::string> c;
    for (ErrorCode e : {ErrorCode::invalid_argument, ErrorCode::unsupported_order,
                        ErrorCode::domain, ErrorCode::blow_up, ErrorCode::rule,
                        ErrorCode::unsolvable, ErrorCode::root_failure,
                        ErrorCode::not_saddle, ErrorCode::caustic, ErrorCode::bandwidth,
                        ErrorCode::enumeration_cap}) {
      c.emplace_back(to_string(e));
    }
    c.emplace_back("internal");
    return c;
  }();
  return codes;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::vector<std::string> validate_report(const json& r) {
  std::vector<std::string> problems;
  auto fail = [&](const std::string& path, const std::string& what) {
    problems.push_back(path + ": " + what);
  };
  if (!r.is_object()) {
    fail("$", "report must be an object");
    return problems;
  }
  static const std::vector<std::string> keys = {
      "schema_version", "command", "status",  "exit_code", "parameters",
      "summary",        "results", "tolerances", "error"};
  for (const auto& k : keys) {
    if (!r.contains(k)) fail("$." + k, "missing");
  }
  for (const auto& item : r.items()) {
    if (!contains(keys, item.key())) fail("$." + item.key(), "unexpected property");
  }
  if (!problems.empty()) return problems;

  if (r["schema_version"] != kSchemaVersion) fail("$.schema_version", "must be 1");
  if (!r["command"].is_string() || !contains(command_names(), r["command"].get<std::string>())) {
    fail("$.command", "unknown command");
  }
  const bool ok_status = r["status"] == "ok";
  if (!ok_status && r["status"] != "error") fail("$.status", "must be \"ok\" or \"error\"");
  if (!r["exit_code"].is_number_integer()) {
    fail("$.exit_code", "must be an integer");
  } else {
    const int code = r["exit_code"].get<int>();
    if (code < 0 || code > 2) fail("$.exit_code", "must be 0, 1 or 2");
    if (ok_status != (code == 0)) fail("$.exit_code", "must be 0 exactly when status is ok");
  }
  for (const char* k : {"parameters", "summary", "results", "tolerances"}) {
    if (!r[k].is_object()) fail(std::string("$.") + k, "must be an object");
  }
  if (r["tolerances"].is_object()) {
    for (const auto& item : r["tolerances"].items()) {
      if (!item.value().is_number()) fail("$.tolerances." + item.key(), "must be a number");
    }
  }
  const json& e = r["error"];
  if (ok_status) {
    if (!e.is_null()) fail("$.error", "must be null when status is ok");
  } else if (!e.is_object()) {
    fail("$.error", "must be an object when status is error");
  } else {
    if (!e.contains("code") || !e["code"].is_string() ||
        !contains(error_codes(), e["code"].get<std::string>())) {
      fail("$.error.code", "missing or unknown");
    }
    if (!e.contains("message") || !e["message"].is_string()) {
      fail("$.error.message", "must be a string");
    }
    if (e.contains("node") && !e["node"].is_number_unsigned()) {
      fail("$.error.node", "must be a non-negative integer");
    }
    for (const auto& item : e.items()) {
      if (item.key() != "code" && item.key() != "message" && item.key() != "node") {
        fail("$.error." + item.key(), "unexpected property");
      }
    }
  }
  return problems;
}

}  // namespace dualaction::cli
