#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qcnf {

// One measured quantity against its bound. pass is decided by the check
// itself (some compare from below, some from above, some combine flags).
struct CheckItem {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string detail;
};

struct CheckSuite {
    std::string name;
    std::vector<CheckItem> items;
    bool pass() const;
};

struct CheckOptions {
    std::uint64_t seed = 1;
    int threads = 1;
    // Multiplies every tolerance; 0 turns each strict check into a failure.
    double tolerance_scale = 1.0;
};

// Release criteria, numbered 1..11.
inline constexpr int kCriteria = 11;
CheckItem criterion(int index, const CheckOptions& options);
std::string criterion_title(int index);

// Suites: norms, homological, nf, elliptic, euler, charts, dynamics, all.
// Throws invalid_argument for an unknown suite.
const std::vector<std::string>& suite_names();
CheckSuite run_suite(const std::string& suite, const CheckOptions& options);

std::string suite_json(const std::vector<CheckSuite>& suites);

} // namespace qcnf
