#pragma once

#include "qsg/groupoid.hpp"

#include <string>
#include <vector>

namespace qsg {

struct SuiteConfig {
    std::vector<std::string> suites{"all"};
    std::vector<std::string> fixtures;  // empty: the defaults of each suite
    std::vector<int> loopNs;            // empty: {16} for loops, {8, 16, 32, 64} for convergence
    CheckOptions opt;
};

struct FixtureInfo {
    std::string name;
    std::string anchor;
    std::string kind;
    bool negative = false;
    std::vector<std::string> suites;
};

struct CheckInfo {
    std::string suite;
    std::string check;
    std::string anchor;
};

std::vector<std::string> suiteNames();
std::vector<FixtureInfo> fixtureList();
std::vector<CheckInfo> checkList();

// Throws std::invalid_argument on unknown suites or fixtures, fixtures that no selected suite
// accepts, and non-positive numeric parameters. Nothing is computed before this passes.
void validateConfig(const SuiteConfig& cfg);

// Deterministic given cfg: reports come in a fixed order and depend only on (cfg, build).
std::vector<CheckReport> runSuites(const SuiteConfig& cfg);

// Individual suites on one fixture; exposed for tests.
std::vector<CheckReport> axiomsSuite(const std::string& fixture, bool asControl, const CheckOptions& opt);
std::vector<CheckReport> hamiltonianSuite(const std::string& fixture, const CheckOptions& opt);
std::vector<CheckReport> fusionSuite(const std::string& fixture, const CheckOptions& opt);
std::vector<CheckReport> moritaSuite(const std::string& fixture, const CheckOptions& opt);
std::vector<CheckReport> loopsSuite(int N, const CheckOptions& opt);
std::vector<CheckReport> convergenceSuite(const std::vector<int>& Ns, const CheckOptions& opt);

// Checks that build a fiber product or a reduction at every sample use at most this many points.
constexpr int kHeavySampleCap = 100;

}  // namespace qsg
