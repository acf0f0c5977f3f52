#include "smallball/report.hpp"

#include <algorithm>

#include "smallball/error.hpp"
#include "smallball/sbd_io.hpp"

namespace smallball {

VerificationReport make_report(std::string check, double lhs, double rhs, double error_budget,
                               std::string detail, std::uint64_t seed) {
  if (!(error_budget >= 0.0)) throw PreconditionError("error budget must be non-negative");
  VerificationReport r;
  r.check = std::move(check);
  r.lhs = lhs;
  r.rhs = rhs;
  r.error_budget = error_budget;
  r.margin = rhs + error_budget - lhs;
  r.passed = r.margin >= 0.0;
  r.seed = seed;
  r.detail = std::move(detail);
  return r;
}

std::string to_csv(const VerificationReport& r) {
  std::string detail = r.detail;
  std::replace(detail.begin(), detail.end(), ',', ';');
  std::replace(detail.begin(), detail.end(), '\n', ' ');
  std::string line = r.check;
  for (double x : {r.lhs, r.rhs, r.error_budget, r.margin}) {
    line += ',';
    line += format_real(x);
  }
  line += r.passed ? ",true," : ",false,";
  line += std::to_string(r.seed);
  line += ',';
  line += detail;
  return line;
}

std::string to_csv(const std::vector<VerificationReport>& reports, bool header) {
  std::string out;
  if (header) {
    out += kReportCsvHeader;
    out += '\n';
  }
  for (const auto& r : reports) {
    out += to_csv(r);
    out += '\n';
  }
  return out;
}

}  // namespace smallball
