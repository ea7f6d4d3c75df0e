#include "report_json.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>

namespace qsgcli {

using ojson = nlohmann::ordered_json;

std::string reportLine(const qsg::CheckReport& r) {
    ojson j;
    j["schema"] = kSchemaId;
    j["check"] = r.check;
    j["anchor"] = r.anchor;
    j["fixture"] = r.fixture;
    j["verdict"] = qsg::verdictName(r.verdict);
    j["samples"] = r.samples;
    j["indeterminate"] = r.indeterminate;
    j["max_residual"] = r.maxResidual;
    j["tolerance"] = r.tolerance;
    ojson dims = ojson::object();
    for (const auto& [k, v] : r.dims) dims[k] = v;
    j["dims"] = dims;
    ojson metrics = ojson::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    j["metrics"] = metrics;
    j["notes"] = r.notes;
    return j.dump();
}

void writeJsonl(std::ostream& os, const std::vector<qsg::CheckReport>& rs) {
    for (const auto& r : rs) os << reportLine(r) << '\n';
}

static std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void writeTable(std::ostream& os, const std::vector<qsg::CheckReport>& rs, double totalSeconds) {
    char line[512];
    std::snprintf(line, sizeof line, "%-42s %-26s %-13s %10s %9s %5s %5s %7s %7s\n", "check", "fixture",
                  "verdict", "max_resid", "tol", "n", "indet", "order", "time_s");
    os << line;
    int pass = 0, fail = 0, ind = 0;
    for (const auto& r : rs) {
        const std::string order = r.metric("fitted_order", -1) >= 0 ? fmt("%.3f", r.metric("fitted_order")) : "-";
        std::snprintf(line, sizeof line, "%-42s %-26s %-13s %10.3e %9.1e %5d %5d %7s %7.2f\n", r.check.c_str(),
                      r.fixture.c_str(), qsg::verdictName(r.verdict), r.maxResidual, r.tolerance, r.samples,
                      r.indeterminate, order.c_str(), r.wallSeconds);
        os << line;
        if (r.verdict == qsg::Verdict::Pass) ++pass;
        else if (r.verdict == qsg::Verdict::Fail) ++fail;
        else ++ind;
    }
    std::snprintf(line, sizeof line, "%d checks: %d pass, %d fail, %d indeterminate (%.1f s)\n", int(rs.size()), pass,
                  fail, ind, totalSeconds);
    os << line;
}

void writeListJsonl(std::ostream& os) {
    for (const auto& f : qsg::fixtureList()) {
        ojson j;
        j["kind"] = "fixture";
        j["name"] = f.name;
        j["fixture_kind"] = f.kind;
        j["negative"] = f.negative;
        j["anchor"] = f.anchor;
        j["suites"] = f.suites;
        os << j.dump() << '\n';
    }
    for (const auto& c : qsg::checkList()) {
        ojson j;
        j["kind"] = "check";
        j["suite"] = c.suite;
        j["check"] = c.check;
        j["anchor"] = c.anchor;
        os << j.dump() << '\n';
    }
}

void writeListTable(std::ostream& os) {
    os << "suites:";
    for (const auto& s : qsg::suiteNames()) os << ' ' << s;
    os << "\n\nfixtures:\n";
    for (const auto& f : qsg::fixtureList()) {
        os << "  " << f.name << (f.negative ? " (negative)" : "") << "  [" << f.kind << "]  suites:";
        for (const auto& s : f.suites) os << ' ' << s;
        os << "\n      \"" << f.anchor << "\"\n";
    }
    os << "\nchecks:\n";
    for (const auto& c : qsg::checkList())
        os << "  " << c.suite << '/' << c.check << "\n      \"" << c.anchor << "\"\n";
}

}  // namespace qsgcli
