#include "plap/report.hpp"

#include <algorithm>

namespace plap {

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::exact_zero: return "exact-zero";
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
  }
  return "fail";
}

void CheckReport::merge(const CheckReport& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

std::vector<CheckEntry> CheckReport::sorted() const {
  auto out = entries_;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

bool CheckReport::passed() const { return failures() == 0; }

std::size_t CheckReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.status == CheckStatus::fail; }));
}

CheckEntry exact_zero_entry(std::string id, std::string reference, const RationalFunction& residual) {
  CheckEntry e{std::move(id), std::move(reference), CheckStatus::fail, {}, 0.0};
  const bool canonical = residual.is_zero();
  const bool sampled = randomized_zero_test(residual, 32);
  if (canonical && sampled) {
    e.status = CheckStatus::exact_zero;
    e.witness = "0";
  } else if (canonical != sampled) {
    e.witness = "canonical and sampled zero tests disagree";
  } else {
    std::string text = residual.to_string();
    if (text.size() > 400) text = text.substr(0, 400) + "...";
    e.witness = text;
  }
  return e;
}

}  // namespace plap
