#include "qsg/report.hpp"

#include <algorithm>
#include <atomic>

namespace qsg {

const char* verdictName(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "indeterminate";
    }
}

void CheckReport::setDim(const std::string& k, long v) {
    for (auto& [key, val] : dims)
        if (key == k) {
            val = v;
            return;
        }
    dims.emplace_back(k, v);
}

void CheckReport::setMetric(const std::string& k, double v) {
    for (auto& [key, val] : metrics)
        if (key == k) {
            val = v;
            return;
        }
    metrics.emplace_back(k, v);
}

long CheckReport::dim(const std::string& k, long fallback) const {
    for (const auto& [key, val] : dims)
        if (key == k) return val;
    return fallback;
}

double CheckReport::metric(const std::string& k, double fallback) const {
    for (const auto& [key, val] : metrics)
        if (key == k) return val;
    return fallback;
}

CheckReport aggregate(std::string check, std::string anchor, std::string fixture, double tolerance,
                      const std::vector<Sample>& samples, double cap) {
    CheckReport r;
    r.check = std::move(check);
    r.anchor = std::move(anchor);
    r.fixture = std::move(fixture);
    r.tolerance = tolerance;
    r.samples = static_cast<int>(samples.size());
    bool ok = true;
    for (const auto& s : samples) {
        if (s.indeterminate) {
            ++r.indeterminate;
            continue;
        }
        r.maxResidual = std::max(r.maxResidual, s.residual);
        ok = ok && s.ok;
    }
    if (r.indeterminate > cap * r.samples)
        r.verdict = Verdict::Indeterminate;
    else if (!ok || !(r.maxResidual <= tolerance))
        r.verdict = Verdict::Fail;
    else
        r.verdict = Verdict::Pass;
    return r;
}

CheckReport combine(std::string check, std::string anchor, std::string fixture,
                    const std::vector<CheckReport>& parts) {
    CheckReport r;
    r.check = std::move(check);
    r.anchor = std::move(anchor);
    r.fixture = std::move(fixture);
    bool anyFail = false, anyIndet = false;
    for (const auto& p : parts) {
        r.samples += p.samples;
        r.indeterminate += p.indeterminate;
        r.maxResidual = std::max(r.maxResidual, p.maxResidual);
        r.tolerance = std::max(r.tolerance, p.tolerance);
        r.setMetric(p.check + ".max_residual", p.maxResidual);
        for (const auto& d : p.dims) r.setDim(p.check + "." + d.first, d.second);
        anyFail = anyFail || p.verdict == Verdict::Fail;
        anyIndet = anyIndet || p.verdict == Verdict::Indeterminate;
        r.wallSeconds += p.wallSeconds;
    }
    r.verdict = anyFail ? Verdict::Fail : (anyIndet ? Verdict::Indeterminate : Verdict::Pass);
    return r;
}

namespace {
std::atomic<int> g_workers{1};
}

int workerCount() { return g_workers.load(); }
void setWorkerCount(int n) { g_workers.store(std::max(1, n)); }

}  // namespace qsg
