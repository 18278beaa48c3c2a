// SPDX-License-Identifier: Apache-2.0
//
// Check records and their two text renderings: an aligned table and one
// key=value record per line.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace ncg {

inline constexpr const char* kVersion = "0.1.0";

struct CheckRecord {
  std::string name;
  std::string claim;
  std::string expected;
  std::string computed;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

inline std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

class Report {
 public:
  Report(std::string command, std::uint64_t seed) : command_(std::move(command)), seed_(seed) {}

  void add(CheckRecord r) { records_.push_back(std::move(r)); }
  const std::vector<CheckRecord>& records() const noexcept { return records_; }
  const std::string& command() const noexcept { return command_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [](const auto& r) { return r.passed; }));
  }
  std::size_t failed() const { return records_.size() - passed(); }
  bool all_passed() const { return failed() == 0; }

  void write_table(std::ostream& os) const {
    std::size_t wn = 4, wc = 8;
    for (const auto& r : records_) {
      wn = std::max(wn, r.name.size());
      wc = std::max(wc, r.computed.size());
    }
    os << "ncgeom " << kVersion << "  command=" << command_ << "  seed=" << seed_ << '\n';
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    os << pad("check", wn) << "  " << "status  " << pad("computed", wc) << "  " << "expected" << '\n';
    for (const auto& r : records_) {
      os << pad(r.name, wn) << "  " << (r.passed ? "PASS    " : "FAIL    ") << pad(r.computed, wc) << "  "
         << r.expected;
      if (r.tolerance > 0.0) os << " (tol " << fmt(r.tolerance, 3) << ")";
      os << '\n';
    }
    os << "summary: " << passed() << " passed, " << failed() << " failed, " << records_.size() << " total\n";
  }

  void write_records(std::ostream& os) const {
    os << "record=env version=" << kVersion << " command=" << command_ << " seed=" << seed_ << '\n';
    for (const auto& r : records_) {
      os << "record=check name=" << r.name << " status=" << (r.passed ? "pass" : "fail") << " computed=" << quote(r.computed)
         << " expected=" << quote(r.expected) << " tolerance=" << fmt(r.tolerance, 3) << " seconds=" << fmt(r.seconds, 3)
         << " claim=" << quote(r.claim) << '\n';
    }
    os << "record=summary passed=" << passed() << " failed=" << failed() << " total=" << records_.size() << '\n';
  }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(" \t\"=") == std::string::npos && !s.empty()) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    return out + '"';
  }

  std::string command_;
  std::uint64_t seed_;
  std::vector<CheckRecord> records_;
};

}  // namespace ncg
