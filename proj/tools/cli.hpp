#pragma once

#include <string>
#include <vector>

namespace plap::cli {

inline constexpr const char* version = "0.1.0";
/// Default seed for every randomized suite ("PLAP" in ASCII).
inline constexpr unsigned long long default_seed = 0x504C4150ULL;

/// Exit codes: 0 all pass, 1 check or solve failure, 2 usage error.
struct RunOutput {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// Runs one command line in-process; args excludes the program name.
RunOutput run(const std::vector<std::string>& args);

/// The JSON report with its header removed, for byte comparisons across runs.
std::string report_body(const std::string& report_json);

}  // namespace plap::cli
