#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasefeyn/moments.hpp"

namespace phasefeyn {

// One verification outcome. Failures carry everything needed to act on them:
// module, operation, observed vs expected, and the tolerance applied.
struct CheckResult {
    std::string name;
    std::string module;
    std::string operation;
    std::string observed;
    std::string expected;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

CheckResult check_close(const std::string& name, const std::string& module,
                        const std::string& operation, Complex observed, Complex expected,
                        double tolerance, bool relative);
CheckResult check_bound(const std::string& name, const std::string& module,
                        const std::string& operation, double observed, double bound);

// Closed-form identity suites, seeded and deterministic.
std::vector<CheckResult> verify_identities(int m, std::uint64_t seed);
std::vector<CheckResult> verify_moments(int m, std::uint64_t seed, int n_cases = 20);
std::vector<CheckResult> verify_ccr(double s, double t, double y, int m);
std::vector<CheckResult> verify_growth(int m, std::uint64_t seed, int n_fields = 20);

// Mixed second lambda/mu central difference of the master transform,
// the order-2 oracle for moment2.
Complex mixed_wick_oracle(const GaussKernelSpec& spec, const PhaseFunction& k,
                          const PhaseFunction& h, const PhaseFunction& f, double step);

}  // namespace phasefeyn
