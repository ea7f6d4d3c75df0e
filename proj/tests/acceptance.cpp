// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned here and do not
// follow command-line or report settings.
#include "oracles.hpp"
#include "qsg/agw.hpp"
#include "qsg/loops.hpp"
#include "qsg/suites.hpp"
#include "report_json.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace qsg;

namespace {

constexpr double kAxiomTol = 1e-6;
constexpr double kAxiomSeconds = 30.0;
constexpr int kAxiomSamples = 200;
constexpr int kRandomKernelPoints = 50, kTraceZeroKernelPoints = 5;
constexpr double kKKSTol = 1e-6;
constexpr int kKKSPoints = 100;
constexpr double kHamTol = 1e-6;
constexpr double kFusionTol = 1e-8;
constexpr double kGaugeRoundTripTol = 1e-8;
constexpr double kPullbackInverseTol = 1e-6;
constexpr double kOrderLo = 1.7, kOrderHi = 2.3;
constexpr double kFieldIdentityTol = 1e-10;
constexpr double kReconstructionTol = 1e-10;
constexpr double kEquivarianceTol = 1e-8;
constexpr int kEquivarianceSamples = 100;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [" << what << "]";
        }
    }
};

const CheckReport* find(const std::vector<CheckReport>& rs, const std::string& check) {
    for (const auto& r : rs)
        if (r.check == check) return &r;
    return nullptr;
}

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", v);
    return b;
}

// Report exists, passed, and its residual is within tol.
void requireResidual(Outcome& o, const std::vector<CheckReport>& rs, const std::string& check, double tol,
                     const std::string& where) {
    const CheckReport* r = find(rs, check);
    if (!r) {
        o.require(false, where + " " + check + " missing");
        return;
    }
    o.require(r->passed(), where + " " + check + " verdict " + verdictName(r->verdict));
    o.require(r->maxResidual <= tol, where + " " + check + " residual " + num(r->maxResidual) + " > " + num(tol));
    o.detail << ' ' << where << '/' << check << '=' << num(r->maxResidual);
}

CheckOptions defaults() {
    CheckOptions o;
    o.samples = kAxiomSamples;
    return o;
}

Point groupAt(const Mat& x) {
    Point p;
    p.g = {x};
    p.v = Vec(0);
    return p;
}

void criterion1(Outcome& o) {
    const CatalogEntry e = catalogByName("amm-su2");
    const CheckOptions opt = defaults();
    int traceZero = 0;
    Rng probe(0);
    for (int i = 0; i < opt.samples; ++i)
        if (std::abs(e.G.stratifiedObject(i, probe).g[0].trace()) < 1e-12) ++traceZero;
    o.require(traceZero > 0, "no trace-zero samples in the stratification");
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<CheckReport> rs{checkCocycle(e.G, e.C, opt), checkUnitInverseIdentities(e.G, e.C, opt),
                                      checkKernelSplitting(e.G, e.C, opt), checkPhiIso(e.G, e.C, opt)};
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& r : rs) {
        requireResidual(o, rs, r.check, kAxiomTol, "amm-su2");
        o.require(r.samples >= kAxiomSamples, r.check + " used fewer than 200 samples");
    }
    o.require(secs <= kAxiomSeconds, "runtime " + num(secs) + " s");
    o.detail << " trace_zero_samples=" << traceZero << " seconds=" << num(secs);
}

void criterion2(Outcome& o) {
    const CatalogEntry e = catalogByName("amm-su2");
    int agree = 0, total = 0, positive = 0;
    for (int k = 0; k < kRandomKernelPoints + kTraceZeroKernelPoints; ++k) {
        Rng rng = Rng::stream(0, "acceptance/kernel-oracle", k);
        const Mat x = k < kRandomKernelPoints ? rng.haarSU(2) : oracle::traceZeroSU2(rng);
        const UnitKernels K = unitKernels(e.G, e.C, groupAt(x));
        const int want = oracle::adPlusOneKernelDim(x);
        ++total;
        if (!K.indeterminate && K.kerA.dim() == want) ++agree;
        else o.require(false, "x#" + std::to_string(k) + " checker " + std::to_string(K.kerA.dim()) + " oracle " +
                                  std::to_string(want));
        positive += want > 0;
    }
    o.require(positive >= kTraceZeroKernelPoints, "trace-zero points did not produce kernels");
    o.detail << " agree=" << agree << "/" << total << " nonzero_kernels=" << positive;
}

void criterion3(Outcome& o) {
    for (const char* name : {"cotangent-su2", "amm-su2"}) {
        const CatalogEntry e = catalogByName(name);
        const CheckReport r = checkNondegeneracy(e.G, e.C, defaults());
        o.require(r.passed(), std::string(name) + " nondegeneracy " + verdictName(r.verdict));
        o.detail << ' ' << name << "=" << verdictName(r.verdict) << "(indet " << r.indeterminate << ")";
    }
    const CatalogEntry neg = catalogByName("zero-form-negative");
    Point zero;
    zero.v = Vec::Zero(3);
    const NondegeneracyResult z = nondegeneracyAt(neg.G, neg.C, zero);
    o.require(!z.pass, "zero-form control passed at mu = 0");
    o.require(!z.indeterminate, "zero-form control indeterminate at mu = 0");
    o.require(z.anchorKernel == 3, "anchor kernel " + std::to_string(z.anchorKernel));
    o.detail << " zero-form@0: pass=" << z.pass << " anchor_kernel=" << z.anchorKernel;
}

void criterion4(Outcome& o) {
    int entries = 0;
    for (const auto& f : fixtureList()) {
        if (f.negative || f.kind == "loop" || f.kind == "agw") continue;
        const auto rs = axiomsSuite(f.name, false, defaults());
        const CheckReport* r = find(rs, "dimension_identities");
        if (!r) {
            o.require(false, f.name + " dimension_identities missing");
            continue;
        }
        ++entries;
        o.require(r->passed() && r->indeterminate == 0, f.name + " verdict " + verdictName(r->verdict) +
                                                            " indet " + std::to_string(r->indeterminate));
        o.require(r->dim("dim_arrows_minus_twice_dim_objects") == 0, f.name + " dim Gamma != 2 dim P");
        o.require(r->dim("kernel_difference_failures") == 0, f.name + " kernel difference failures");
    }
    // The loop entry: the truncation keeps dim Gamma = 2 dim P.
    const LoopModel L = buildLoopGroupoid(2, 16);
    o.require(L.groupoid.G.arrowDim == 2 * L.groupoid.G.objectDim, "loop-su2-N16 dimension balance");
    o.detail << " entries=" << entries << " loop-su2-N16=" << L.groupoid.G.arrowDim << "/"
             << L.groupoid.G.objectDim;
}

void criterion5(Outcome& o) {
    const CheckOptions opt = defaults();
    const auto ham = hamiltonianSuite("cotangent-su2", opt);
    requireResidual(o, ham, "kks_orbit_form", kKKSTol, "cotangent-su2");
    if (const CheckReport* r = find(ham, "kks_orbit_form")) o.require(r->samples >= kKKSPoints, "orbit points < 100");
    const auto fus = fusionSuite("cotangent-su2", opt);
    requireResidual(o, fus, "kks_reduced_form", kKKSTol, "cotangent-su2");
    if (const CheckReport* r = find(fus, "kks_reduced_form")) {
        o.require(r->samples >= kKKSPoints, "reduced points < 100");
        o.require(r->dim("reduced_dim.min") == 2 && r->dim("reduced_dim.max") == 2, "reduced dimension not 2");
        o.detail << " reduced_dim=" << r->dim("reduced_dim.min") << ".." << r->dim("reduced_dim.max");
    }
}

void criterion6(Outcome& o) {
    const CheckOptions opt = defaults();
    for (const char* name : {"amm-su2", "cotangent-su2"}) {
        const auto rs = hamiltonianSuite(name, opt);
        int n = 0;
        for (const auto& r : rs) {
            o.require(r.passed(), std::string(name) + " " + r.check + "@" + r.fixture + " " + verdictName(r.verdict));
            const bool residualCheck = r.check == "compatible" || r.check == "minimal_nondegeneracy" ||
                                       r.check == "orthogonality_identity" || r.check == "quasi_hamiltonian";
            if (residualCheck)
                o.require(r.maxResidual <= kHamTol, r.check + "@" + r.fixture + " residual " + num(r.maxResidual));
            ++n;
        }
        o.require(find(rs, "detects_scaled_form_compatibility") != nullptr, "scaled-form control missing");
        if (std::string(name) == "amm-su2") {
            o.require(find(rs, "quasi_hamiltonian") != nullptr, "quasi-Hamiltonian axioms missing");
            o.require(find(rs, "detects_scaled_form_moment_identity") != nullptr, "scaled moment control missing");
        }
        o.detail << ' ' << name << ":" << n << " reports";
    }
}

void criterion7(Outcome& o) {
    const CheckOptions opt = defaults();
    for (const char* name : {"amm-su2", "cotangent-su2"}) {
        const auto rs = fusionSuite(name, opt);
        requireResidual(o, rs, "fusion_unit_law", kFusionTol, name);
        requireResidual(o, rs, "fusion_orbit_unit_law", kFusionTol, name);
        if (std::string(name) != "amm-su2") continue;
        const CheckReport* d = find(rs, "fusion_double");
        o.require(d && d->passed(), "D∘D fusion failed");
        if (d) {
            o.require(d->dim("quotient_dim.min") == 6 && d->dim("quotient_dim.max") == 6, "D∘D quotient dim not 6");
            o.detail << " D∘D quotient_dim=" << d->dim("quotient_dim.min");
        }
        int bimodule = 0;
        for (const auto& r : rs)
            if (r.fixture.find("∘") != std::string::npos) {
                ++bimodule;
                o.require(r.passed(), "D∘D " + r.check + " " + verdictName(r.verdict));
            }
        o.require(bimodule >= 3, "D∘D bimodule checks missing");
        o.detail << " D∘D bimodule checks=" << bimodule;
    }
}

void criterion8(Outcome& o) {
    const CheckOptions opt = defaults();
    const auto amm = moritaSuite("amm-su2", opt);
    requireResidual(o, amm, "gauge_round_trip_closed_form", kGaugeRoundTripTol, "amm-su2");
    requireResidual(o, amm, "gauge_round_trip", kGaugeRoundTripTol, "amm-su2");
    const auto cot = moritaSuite("cotangent-su2", opt);
    requireResidual(o, cot, "pullback_inverse", kPullbackInverseTol, "cotangent-su2");
    const CheckReport* r = find(cot, "related_reductions");
    o.require(r && r->passed(), "related reductions failed");
    if (r) {
        o.require(r->dim("dimension_mismatches") == 0, "reduced dimensions differ");
        o.require(r->dim("verdict_mismatches") == 0, "reduced verdicts differ");
        o.detail << " related_reductions: points=" << r->samples << " reduced_dim=" << r->dim("max_reduced_dim");
    }
}

void criterion9(Outcome& o) {
    const std::vector<int> Ns{8, 16, 32, 64};
    const auto rs = convergenceSuite(Ns, defaults());
    for (const char* row : {"convergence_holonomy_error", "convergence_hol_Omega_minus_dB", "convergence_round_trip_form"}) {
        const CheckReport* r = find(rs, row);
        if (!r) {
            o.require(false, std::string(row) + " missing");
            continue;
        }
        const double p = r->metric("fitted_order", -1);
        o.require(p >= kOrderLo && p <= kOrderHi, std::string(row) + " order " + num(p));
        o.detail << ' ' << row << "=" << num(p);
    }
    requireResidual(o, rs, "field_identity", kFieldIdentityTol, "loop-su2");
}

void criterion10(Outcome& o) {
    for (int n : {2, 3}) {
        const auto rs = agwSuite(n, defaults());
        const std::string where = "agw-su" + std::to_string(n);
        requireResidual(o, rs, "emap_reconstruction", kReconstructionTol, where);
        requireResidual(o, rs, "dressing_equivariance", kEquivarianceTol, where);
        if (const CheckReport* r = find(rs, "dressing_equivariance"))
            o.require(r->samples >= kEquivarianceSamples, "fewer than 100 (g, mu)");
        const CheckReport* b = find(rs, "beta_quadrature");
        const double p = b ? b->metric("fitted_order", -1) : -1;
        o.require(b && p >= kOrderLo && p <= kOrderHi, where + " beta order " + num(p));
        o.detail << ' ' << where << " beta_order=" << num(p);
    }
}

void criterion11(Outcome& o) {
    SuiteConfig cfg;
    cfg.suites = {"axioms", "hamiltonian", "convergence", "agw"};
    cfg.fixtures = {"amm-su2", "cotangent-su2", "loop-su2", "agw-su2"};
    cfg.opt.samples = 40;
    auto render = [&] {
        std::ostringstream os;
        qsgcli::writeJsonl(os, runSuites(cfg));
        return os.str();
    };
    const std::string a = render(), b = render();
    o.require(!a.empty(), "empty report");
    o.require(a == b, "reports differ");
    o.detail << " bytes=" << a.size();
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"AMM SU(2) axioms: cocycle, unit/inverse, kernel splitting, phi iso <= 1e-6, 200 samples, <= 30 s", criterion1},
        {"kernel oracle: dim(ker w ∩ A_x) = dim ker(Ad_x + 1), 50 random + 5 trace-zero x", criterion2},
        {"nondegeneracy dichotomy: cotangent and AMM pass; zero form fails at mu = 0 with anchor kernel 3", criterion3},
        {"dimension identities on every positive entry", criterion4},
        {"KKS: orbit form and reduced form vs <mu,[xi,eta]> <= 1e-6 at 100 points, reduced dim 2", criterion5},
        {"Hamiltonian spaces: orbits pass, scaled-form controls fail", criterion6},
        {"fusion unit law <= 1e-8; D∘D quotient dim 6 with bimodule checks", criterion7},
        {"Morita: gauge round trip <= 1e-8, pullback inverse <= 1e-6, related reductions agree", criterion8},
        {"loop convergence orders 2 ± 0.3; field identity <= 1e-10", criterion9},
        {"AGW: reconstruction <= 1e-10, equivariance <= 1e-8, beta O(M^-2)", criterion10},
        {"byte-identical JSON across runs", criterion11},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s |%s (%.1f s)\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
        failed += !o.ok;
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
