#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace smallball {

/// Outcome of one inequality check lhs <= rhs. The error budget is added to
/// the favourable side: margin = rhs + error_budget - lhs, passed iff margin >= 0.
struct VerificationReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double error_budget = 0.0;
  double margin = 0.0;
  bool passed = false;
  std::uint64_t seed = 0;
  std::string detail;
};

VerificationReport make_report(std::string check, double lhs, double rhs, double error_budget,
                               std::string detail, std::uint64_t seed = 0);

/// `check,lhs,rhs,budget,margin,passed,seed,detail` (commas in detail become ';').
inline constexpr const char* kReportCsvHeader = "check,lhs,rhs,budget,margin,passed,seed,detail";
std::string to_csv(const VerificationReport& r);
std::string to_csv(const std::vector<VerificationReport>& reports, bool header = true);

}  // namespace smallball
