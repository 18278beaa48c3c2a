// SPDX-License-Identifier: Apache-2.0
//
// Runs the numbered acceptance checks and prints one PASS/FAIL line each.
// Exit status is 0 only if every selected check passed.
#include <cstdint>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ncgeom/verification.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  std::uint64_t seed = ncg::verify::Options{}.seed;
  app.add_option("--criterion", only, "run a single check (1-12); default all")
      ->check(CLI::Range(1, ncg::verify::kCriteria));
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  const ncg::verify::Options opt{seed, std::nullopt};
  int failed = 0;
  for (int n = 1; n <= ncg::verify::kCriteria; ++n) {
    if (only != 0 && n != only) continue;
    const auto r = ncg::verify::run_criterion(n, opt);
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.computed << " [want " << r.expected
              << "] (" << ncg::fmt(r.seconds, 3) << " s)\n";
    failed += r.passed ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
