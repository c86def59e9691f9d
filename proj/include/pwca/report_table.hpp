#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pwca/numfmt.hpp"
#include "pwca/retrieval.hpp"

namespace pwca {

// Side-by-side comparison CSV: one row per method, one column per
// query->target direction (lexicographic by label) plus the row mean.
// All methods must cover the same directions with the same test size.
inline std::string emit_comparison_table(const std::vector<RetrievalReport>& reports) {
  if (reports.empty()) throw EmptyInput("emit_comparison_table: no reports");

  auto label = [](const RetrievalReport& r) {
    return "v" + std::to_string(r.query_view) + "->v" + std::to_string(r.target_view);
  };

  std::set<std::string> labels;
  std::map<std::string, std::map<std::string, double>> by_method; // method -> label -> ap
  for (const auto& r : reports) {
    const std::string lab = label(r);
    labels.insert(lab);
    auto& row = by_method[method_name(r.method)];
    if (row.count(lab)) throw InconsistentReports("duplicate report for " + lab);
    if (r.n_queries != reports.front().n_queries || r.k != reports.front().k ||
        r.tau != reports.front().tau || r.seed != reports.front().seed)
      throw InconsistentReports("reports do not share one test configuration");
    row[lab] = r.ap;
  }
  for (const auto& [method, row] : by_method)
    if (row.size() != labels.size())
      throw InconsistentReports("method " + method + " is missing a direction");

  std::ostringstream os;
  os << "method";
  for (const auto& lab : labels) os << "," << lab;
  os << ",mean\n";
  for (const auto& [method, row] : by_method) {
    os << method;
    double sum = 0.0;
    for (const auto& lab : labels) {
      const double ap = row.at(lab);
      os << "," << fmt17(ap);
      sum += ap;
    }
    os << "," << fmt17(sum / static_cast<double>(labels.size())) << "\n";
  }
  return os.str();
}

} // namespace pwca
