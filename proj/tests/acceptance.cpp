// Acceptance runner: one PASS/FAIL line per criterion, details for failures.
//   acceptance [--quick] [--inject-fault] [--criterion K]... [--verbose]

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "dlp/verify.hpp"

int main(int argc, char** argv) {
  dlp::VerifyOptions opt;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--quick")) {
      opt.quick = true;
    } else if (!std::strcmp(argv[i], "--inject-fault")) {
      opt.inject_fault = true;
    } else if (!std::strcmp(argv[i], "--verbose")) {
      verbose = true;
    } else if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
      opt.only.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--quick] [--inject-fault] [--criterion K]... [--verbose]\n";
      return 2;
    }
  }
  opt.on_result = [&](const dlp::CriterionResult& r) {
    std::cout << dlp::format_result_line(r) << '\n';
    if (verbose || !r.passed)
      for (const auto& n : r.notes) std::cout << "        " << n << '\n';
    std::cout.flush();
  };
  const auto results = dlp::run_acceptance(opt);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criterion(s) failed" : std::string("acceptance: all passed"))
            << '\n';
  return failed ? 1 : 0;
}
