#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace destride {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::size_t cases = 0;
  double max_dev = 0.0;
  std::string detail;
};

/// Names accepted by `run_selftest`, in run order.
const std::vector<std::string>& selftest_properties();

/// Runs the seeded property suites (all of them, or only `property`).
/// Throws ArgumentError for an unknown property name.
std::vector<PropertyResult> run_selftest(std::uint64_t seed, const std::optional<std::string>& property = {});

}  // namespace destride
