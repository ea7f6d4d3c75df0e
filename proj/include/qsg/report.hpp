#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qsg {

enum class Verdict { Pass, Fail, Indeterminate };
const char* verdictName(Verdict v);

struct CheckReport {
    std::string check;
    std::string anchor;
    std::string fixture;
    int samples = 0;
    int indeterminate = 0;
    double maxResidual = 0;
    double tolerance = 0;
    std::vector<std::pair<std::string, long>> dims;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::Pass;
    double wallSeconds = 0;  // not serialized; keeps reports reproducible

    bool passed() const { return verdict == Verdict::Pass; }
    void setDim(const std::string& k, long v);
    void setMetric(const std::string& k, double v);
    long dim(const std::string& k, long fallback = -1) const;
    double metric(const std::string& k, double fallback = 0) const;
};

// One pointwise evaluation inside a check.
struct Sample {
    double residual = 0;
    bool ok = true;  // structural condition (rank, dimension) held
    bool indeterminate = false;
};

// Aggregates pointwise samples: indeterminate points are excluded, and the check
// is indeterminate when they exceed the cap.
CheckReport aggregate(std::string check, std::string anchor, std::string fixture, double tolerance,
                      const std::vector<Sample>& samples, double indeterminateCap = 0.05);

// Combine sub-reports into one (max residual, summed counts, all must pass).
CheckReport combine(std::string check, std::string anchor, std::string fixture,
                    const std::vector<CheckReport>& parts);

int workerCount();
void setWorkerCount(int n);

// Deterministic parallel map: result i depends only on i.
template <class R>
std::vector<R> parallelMap(int n, const std::function<R(int)>& f) {
    std::vector<R> out(n);
    const int w = std::max(1, std::min(workerCount(), n));
    if (w <= 1) {
        for (int i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::thread> ts;
    std::vector<std::exception_ptr> errs(w);
    for (int t = 0; t < w; ++t)
        ts.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += w) out[i] = f(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    for (auto& th : ts) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace qsg
