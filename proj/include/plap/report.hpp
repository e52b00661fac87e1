#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "plap/ratfunc.hpp"

namespace plap {

enum class CheckStatus { exact_zero, pass, fail };

std::string_view to_string(CheckStatus status);

struct CheckEntry {
  std::string id;         ///< stable dotted identifier, used for ordering
  std::string reference;  ///< which identity or inequality this entry certifies
  CheckStatus status = CheckStatus::fail;
  std::string witness;    ///< residual text, counterexample, or summary
  double residual = 0.0;  ///< numeric defect where one exists; 0 for exact checks
};

class CheckReport {
 public:
  void add(CheckEntry entry) { entries_.push_back(std::move(entry)); }
  void merge(const CheckReport& other);
  /// Entries ordered by id; assembly order never leaks into output.
  std::vector<CheckEntry> sorted() const;
  const std::vector<CheckEntry>& entries() const { return entries_; }
  bool passed() const;
  std::size_t failures() const;

 private:
  std::vector<CheckEntry> entries_;
};

/// Certifies residual == 0: canonical form decides, 32-point evaluation must agree.
CheckEntry exact_zero_entry(std::string id, std::string reference, const RationalFunction& residual);

}  // namespace plap
