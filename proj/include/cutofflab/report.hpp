/// @file report.hpp
/// @brief Reporting utilities: config hashing, CSV emission, and the Markdown
///        summary with failing checks listed first.
#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cutofflab {

/// FNV-1a over the canonical (sorted-key) JSON dump of the configuration.
inline std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

/// CSV writer: fixed header, rows of doubles at full round-trip precision.
inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_csv: cannot open " + path);
  out << header << "\n";
  out << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

/// Markdown summary: failures first (with margins), then passes.
inline std::string markdown_summary(const std::string& title,
                                    const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  os << "# " << title << "\n\n";
  std::size_t fails = 0;
  for (const auto& c : checks)
    if (!c.pass)
      ++fails;
  os << (fails == 0 ? "All checks passed.\n" : "FAILURES PRESENT.\n") << "\n";
  for (bool want_pass : {false, true}) {
    for (const auto& c : checks) {
      if (c.pass != want_pass)
        continue;
      os << "- [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name
         << " (margin " << std::setprecision(6) << c.margin << ")";
      if (!c.detail.empty())
        os << ": " << c.detail;
      os << "\n";
    }
  }
  return os.str();
}

} // namespace cutofflab
