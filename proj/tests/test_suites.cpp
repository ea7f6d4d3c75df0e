#include "qsg/suites.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace qsg;

namespace {

SuiteConfig config(std::vector<std::string> suites, std::vector<std::string> fixtures = {}, int samples = 4) {
    SuiteConfig c;
    c.suites = std::move(suites);
    c.fixtures = std::move(fixtures);
    c.opt.samples = samples;
    return c;
}

bool listed(const std::set<std::string>& ids, const std::string& check) {
    if (ids.count(check)) return true;
    const std::string pre = "detects_", post = "_failure";
    return check.rfind(pre, 0) == 0 && check.size() > pre.size() + post.size() &&
           check.compare(check.size() - post.size(), post.size(), post) == 0 &&
           ids.count("detects_<check>_failure");
}

}  // namespace

TEST(Config, RejectsUnknownNamesAndBadNumbers) {
    EXPECT_THROW(validateConfig(config({"nonsense"})), std::invalid_argument);
    EXPECT_THROW(validateConfig(config({"axioms"}, {"amm-su9"})), std::invalid_argument);
    EXPECT_THROW(validateConfig(config({"agw"}, {"amm-su2"})), std::invalid_argument);
    EXPECT_THROW(validateConfig(config({"axioms"}, {}, 0)), std::invalid_argument);
    SuiteConfig c = config({"axioms"});
    c.opt.nm.fdStep = -1;
    EXPECT_THROW(validateConfig(c), std::invalid_argument);
    c = config({"axioms"});
    c.opt.nm.rankThreshold = 0;
    EXPECT_THROW(validateConfig(c), std::invalid_argument);
    c = config({"loops"});
    c.loopNs = {2};
    EXPECT_THROW(validateConfig(c), std::invalid_argument);
    c = config({"convergence"});
    c.loopNs = {16};
    EXPECT_THROW(validateConfig(c), std::invalid_argument);
}

TEST(Config, AcceptsDocumentedInvocations) {
    EXPECT_NO_THROW(validateConfig(config({"axioms"}, {"amm-su2"})));
    EXPECT_NO_THROW(validateConfig(config({"axioms"}, {"zero-form-negative"})));
    EXPECT_NO_THROW(validateConfig(config({"loops"}, {"loop-su2-N16"})));
    SuiteConfig c = config({"convergence"});
    c.loopNs = {8, 16, 32, 64};
    EXPECT_NO_THROW(validateConfig(c));
    EXPECT_NO_THROW(validateConfig(config({"all"})));
}

TEST(Registry, FixturesCarryAnchorsAndSuites) {
    for (const auto& f : fixtureList()) {
        EXPECT_FALSE(f.anchor.empty()) << f.name;
        EXPECT_FALSE(f.suites.empty()) << f.name;
    }
    for (const auto& c : checkList()) EXPECT_FALSE(c.anchor.empty()) << c.check;
}

TEST(Registry, EveryReportedCheckIsListed) {
    std::set<std::string> ids;
    for (const auto& c : checkList()) ids.insert(c.check);
    std::vector<CheckReport> rs;
    for (auto cfg : {config({"axioms"}), config({"hamiltonian"}, {"cotangent-su2", "amm-su2"}),
                     config({"fusion"}, {"cotangent-su2", "amm-su2"}), config({"morita"}), config({"agw"}, {"agw-su2"})}) {
        auto part = runSuites(cfg);
        rs.insert(rs.end(), part.begin(), part.end());
    }
    SuiteConfig loops = config({"loops"});
    loops.loopNs = {4};
    auto part = runSuites(loops);
    rs.insert(rs.end(), part.begin(), part.end());
    SuiteConfig conv = config({"convergence"});
    conv.loopNs = {8, 16};
    part = runSuites(conv);
    rs.insert(rs.end(), part.begin(), part.end());
    for (const auto& r : rs) {
        EXPECT_TRUE(listed(ids, r.check)) << r.check;
        EXPECT_FALSE(r.anchor.empty()) << r.check;
    }
}

TEST(Run, NamedNegativeFixtureFailsNondegeneracy) {
    const auto rs = runSuites(config({"axioms"}, {"zero-form-negative"}, 20));
    bool sawFail = false;
    for (const auto& r : rs)
        if (r.check == "nondegeneracy" || r.check == "nondegeneracy_special_points")
            sawFail |= r.verdict == Verdict::Fail;
    EXPECT_TRUE(sawFail);
}

TEST(Run, DeterministicAcrossWorkerCounts) {
    const SuiteConfig c = config({"axioms"}, {"amm-su2"}, 12);
    setWorkerCount(1);
    const auto a = runSuites(c);
    setWorkerCount(3);
    const auto b = runSuites(c);
    setWorkerCount(1);
    ASSERT_EQ(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].check, b[i].check);
        EXPECT_EQ(a[i].maxResidual, b[i].maxResidual);
        EXPECT_EQ(a[i].dims, b[i].dims);
        EXPECT_EQ(a[i].verdict, b[i].verdict);
    }
}
