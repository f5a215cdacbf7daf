// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned here and nowhere else.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "freeprob/cumulants.hpp"
#include "freeprob/io.hpp"

using namespace freeprob;

namespace {

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Gate {
    int failures = 0;
    std::vector<std::string> notes;
    void check(bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            notes.push_back(what);
        }
    }
};

cplx phiphi_dirac1(cplx z) {
    // branch with W^{-1}(z) ~ z at infinity
    return 0.5 * (z * std::sqrt(1.0 + 4.0 / z) - z);
}

std::vector<cplx> sector_complement_probes(double radius, int count) {
    // points on |z| = radius avoiding the sector |arg z| < pi/4 around R+
    std::vector<cplx> out;
    for (int j = 0; j < count; ++j) {
        double theta = M_PI / 4 + 0.05 + (3 * M_PI / 2 - 0.1) * j / (count - 1);
        out.push_back(radius * cplx(std::cos(theta), std::sin(theta)));
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// --- criteria ----------------------------------------------------------------

void closed_form_transforms(Gate& g) {
    Measure d0 = Measure::point_mass(0.0, SupportKind::NonNegative);
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    TransformEngine e1(d1), e0(d0);
    TransformEngine mp(analytic_cauchy(ParametricLaw::marchenko_pastur(1.0)), 4.0,
                       SupportKind::NonNegative);
    double worst = 0.0;
    for (cplx z : sector_complement_probes(40.0, 32)) {
        worst = std::max(worst, std::abs(e1.phiphi(z) - phiphi_dirac1(z)));
        worst = std::max(worst, std::abs(mp.phiphi(z) - 1.0));
        worst = std::max(worst, std::abs(e0.phiphi(z)));
    }
    g.check(worst <= 1e-8, "worst closed-form defect " + fmt(worst) + " > 1e-8");
}

void additive_convolution(Gate& g) {
    Measure be = materialize(ParametricLaw::symmetric_bernoulli());
    ConvolutionResult arc = boxplus(be, be);
    double l1 = l1_density_distance(arc.measure, materialize(ParametricLaw::arcsine(-2.0, 2.0), 2048));
    g.check(l1 <= 1e-3, "bernoulli pair L1 " + fmt(l1) + " > 1e-3");

    Measure s1 = materialize(ParametricLaw::semicircle(1.0));
    ConvolutionConfig cfg;
    cfg.grid_points = 2400;
    ConvolutionResult s = boxplus(s1, s1, cfg);
    double var = std::abs(moment(s.measure, 2) - 2.0 * moment(s1, 2));
    g.check(var <= 1e-4, "semicircle variance defect " + fmt(var) + " > 1e-4");

    double phi_res = std::max(arc.residuals.at("phi_additivity"),
                              s.residuals.at("phi_additivity"));
    g.check(phi_res <= 1e-6, "phi additivity residual " + fmt(phi_res) + " > 1e-6");
}

void rd_convolution(Gate& g) {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    double l1 = l1_density_distance(boxplus_rd(d1, d1).measure,
                                    materialize(ParametricLaw::arcsine_positive(4.0), 1024));
    g.check(l1 <= 2e-3, "haar pair L1 " + fmt(l1) + " > 2e-3");

    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    double lv = levy_distance(boxplus_rd(mp, mp).measure,
                              dilate(materialize(ParametricLaw::marchenko_pastur(1.0), 1024), 2.0));
    g.check(lv <= 2e-3, "mp pair Levy " + fmt(lv) + " > 2e-3");

    Measure u01 = materialize(ParametricLaw::uniform(0.0, 1.0));
    const Measure* pairs[6][2] = {{&d1, &d1},   {&mp, &mp},  {&d1, &mp},
                                  {&u01, &u01}, {&u01, &mp}, {&d1, &u01}};
    for (int i = 0; i < 6; ++i) {
        double d = levy_distance(boxplus_rd(*pairs[i][0], *pairs[i][1]).measure,
                                 boxplus_rd_symmetric_route(*pairs[i][0], *pairs[i][1]).measure);
        g.check(d <= 2e-3, "route pair " + std::to_string(i) + " Levy " + fmt(d) + " > 2e-3");
    }
}

void corrected_relations(Gate& g) {
    ConvolutionConfig cfg;
    cfg.grid_points = 2400;
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    Measure a = real_part_law(d1, cfg);
    double l1 = l1_density_distance(a, materialize(ParametricLaw::arcsine(-1.0, 1.0), 1024));
    g.check(l1 <= 2e-3, "real part of haar L1 " + fmt(l1) + " > 2e-3");
    g.check(is_symmetric(a, 1e-6), "real part of haar not symmetric at 1e-6");

    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    Measure b = real_part_law(mp, cfg);
    double l2 = l1_density_distance(b, materialize(ParametricLaw::semicircle(0.5), 1024));
    g.check(l2 <= 2e-3, "real part of circular L1 " + fmt(l2) + " > 2e-3");
    g.check(is_symmetric(b, 1e-6), "real part of circular not symmetric at 1e-6");

    for (auto law : {ParametricLaw::dirac(1.0), ParametricLaw::marchenko_pastur(1.0),
                     ParametricLaw::arcsine_positive(4.0)}) {
        Measure m = materialize(law);
        AlphaSeries alpha = alpha_from_phiphi(m, 4);
        for (int k = 1; k <= 4; ++k) {
            double want = moment(m, static_cast<unsigned>(k));
            double got = moments_from_alpha(alpha, k);
            g.check(std::abs(got - want) <= 1e-4 * (1.0 + std::abs(want)),
                    "cumulant chain k=" + std::to_string(k) + " defect " +
                        fmt(std::abs(got - want)));
        }
    }
}

void asymptotic_estimate(Gate& g) {
    std::vector<Measure> cat = {Measure::point_mass(1.0, SupportKind::NonNegative),
                                materialize(ParametricLaw::marchenko_pastur(1.0)),
                                pushforward_square(materialize(ParametricLaw::uniform(0.0, 1.0)))};
    for (const Measure& m : cat) {
        double r3 = std::abs(estimate_ratio(m, cplx(-1e3, 0.0)) - 1.0);
        double r4 = std::abs(estimate_ratio(m, cplx(-1e4, 0.0)) - 1.0);
        g.check(r3 <= 0.05, "ratio defect " + fmt(r3) + " > 5% at 1e3");
        g.check(r4 <= 0.005, "ratio defect " + fmt(r4) + " > 0.5% at 1e4");
    }
}

void inequality_chain(Gate& g) {
    std::vector<Measure> cat = {Measure::point_mass(1.0, SupportKind::NonNegative),
                                Measure::point_mass(0.25, SupportKind::NonNegative),
                                materialize(ParametricLaw::marchenko_pastur(1.0)),
                                materialize(ParametricLaw::arcsine_positive(4.0)),
                                materialize(ParametricLaw::uniform(0.5, 2.0)),
                                pushforward_square(materialize(ParametricLaw::uniform(0.0, 1.0)))};
    int violations = 0;
    for (const Measure& m : cat) {
        for (double y : {10.0, 100.0}) {
            double lhs = truncated_second_moment(m) + tail_mass(m, 1.0);
            double mid = (y + 1.0) / y * harmonic_truncation(m, y);
            double rhs = (y + 1.0) / y * 2.0 * phiphi_negativity_probe(m, {y})[0];
            if (lhs > mid + 1e-9 || mid > rhs + 1e-9) ++violations;
        }
    }
    g.check(violations == 0, std::to_string(violations) + " inequality violations");
}

void monte_carlo_oracle(Gate& g) {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    Measure mp = materialize(ParametricLaw::marchenko_pastur(1.0));
    double t0 = now();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        double k1 = verify_boxplus_rd(d1, d1, 1024, 20, seed).ks;
        double k2 = verify_boxplus_rd(mp, mp, 1024, 20, seed).ks;
        g.check(k1 <= 0.05, "haar ensemble seed " + std::to_string(seed) + " KS " + fmt(k1));
        g.check(k2 <= 0.05, "mp ensemble seed " + std::to_string(seed) + " KS " + fmt(k2));
    }
    std::printf("             monte carlo runtime %.1fs on one core\n", now() - t0);
}

void series_verdicts(Gate& g) {
    std::vector<std::pair<SeriesSpec, Verdict>> cases;
    cases.push_back({SeriesSpec::scaled_haar_geometric(24), Verdict::Converges});
    cases.push_back({SeriesSpec::scaled_haar_power(0.4, 200), Verdict::Diverges});
    cases.push_back({SeriesSpec::scaled_haar_power(0.5, 200), Verdict::Diverges});
    cases.push_back({SeriesSpec::scaled_haar_power(0.6, 200), Verdict::Converges});
    cases.push_back({SeriesSpec::scaled_haar_power(1.1, 200), Verdict::Converges});
    cases.push_back({SeriesSpec::scaled_haar_power(2.0, 200), Verdict::Converges});
    std::size_t plain = cases.size();
    for (std::size_t i = 0; i < plain; ++i) {
        SeriesSpec s = cases[i].first;
        s.with_tail_atoms(2.0, 0.3, 2.0);
        cases.push_back({s, cases[i].second});
    }
    for (std::size_t i = 0; i < cases.size(); ++i) {
        ConvergenceReport r = verdict(cases[i].first);
        g.check(r.verdict == cases[i].second, "spec " + std::to_string(i) + " verdict mismatch");
        WeakConvergenceDiagnostics d = weak_convergence_diagnostic(r.nu);
        bool contradiction = r.verdict != Verdict::Inconclusive &&
                             d.verdict != Verdict::Inconclusive && r.verdict != d.verdict;
        g.check(!contradiction, "spec " + std::to_string(i) + " diagnostic contradiction");
    }

    // matrix partial sums against the recovered laws; the n = 1 comparison is
    // a point mass against its sampled eigenvalues, where the KS statistic
    // saturates on rounding alone, so the Levy metric decides there
    SeriesSpec geo = SeriesSpec::scaled_haar_geometric(8);
    NuSequenceResult nu = nu_sequence(geo);
    double lv = levy_distance(partial_sum_esd(geo, 1, 512, 3), nu.measures[0]);
    g.check(lv <= 1e-2, "partial sum n=1 Levy " + fmt(lv) + " > 1e-2");
    for (int n = 2; n <= 8; ++n) {
        double ks = ks_distance(partial_sum_esd(geo, n, 512, 3), nu.measures[n - 1]);
        g.check(ks <= 0.1, "partial sum n=" + std::to_string(n) + " KS " + fmt(ks) + " > 0.1");
    }
}

void combinatorial_oracle(Gate& g) {
    std::int64_t catalan[] = {1, 2, 5, 14, 42, 132};
    std::vector<std::int64_t> circular = {1, 0, 0, 0, 0, 0};
    for (int k = 1; k <= 6; ++k)
        g.check(moments_from_alpha_exact(circular, k) == catalan[k - 1],
                "circular moment k=" + std::to_string(k) + " not Catalan");
    std::vector<std::int64_t> haar = {1, -1, 2, -5, 14, -42};
    for (int k = 1; k <= 6; ++k)
        g.check(moments_from_alpha_exact(haar, k) == 1,
                "haar moment k=" + std::to_string(k) + " not 1");
}

void reproducibility(Gate& g) {
    Measure d1 = Measure::point_mass(1.0, SupportKind::NonNegative);
    std::string e1 = ensemble_report_to_json(verify_boxplus_rd(d1, d1, 64, 3, 2)).dump(2);
    std::string e2 = ensemble_report_to_json(verify_boxplus_rd(d1, d1, 64, 3, 2)).dump(2);
    g.check(e1 == e2, "ensemble report bytes differ between runs");

    SeriesSpec geo = SeriesSpec::scaled_haar_geometric(8);
    std::string c1 = convergence_report_to_json(verdict(geo)).dump(2);
    std::string c2 = convergence_report_to_json(verdict(geo)).dump(2);
    g.check(c1 == c2, "convergence report bytes differ between runs");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        void (*run)(Gate&);
    };
    Criterion criteria[] = {
        {"closed-form transform suite (defect <= 1e-8, 32 probes)", closed_form_transforms},
        {"additive convolution engine (L1 <= 1e-3, variance 1e-4, phi 1e-6)", additive_convolution},
        {"R-diagonal convolution engine (L1/Levy <= 2e-3, 6 route pairs)", rd_convolution},
        {"corrected relations (L1 <= 2e-3, cumulant chain 1e-4)", corrected_relations},
        {"asymptotic ratio (5% at 1e3, 0.5% at 1e4)", asymptotic_estimate},
        {"per-term inequality chain (zero violations at y=10,100)", inequality_chain},
        {"monte carlo oracle (N=1024, 20 trials, seeds 1..5, KS <= 0.05)", monte_carlo_oracle},
        {"two-series verdicts (12 specs, MC KS <= 0.1)", series_verdicts},
        {"combinatorial oracle (Catalan + all-ones moments, exact)", combinatorial_oracle},
        {"reproducibility (byte-identical reports, fixed seeds)", reproducibility},
    };
    int failed = 0, index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        Gate gate;
        double t0 = now();
        try {
            c.run(gate);
        } catch (const std::exception& e) {
            gate.check(false, std::string("exception: ") + e.what());
        }
        std::printf("criterion %2d %s %s (%.1fs)\n", index,
                    gate.failures == 0 ? "PASS" : "FAIL", c.name, now() - t0);
        for (const std::string& note : gate.notes) std::printf("             - %s\n", note.c_str());
        std::fflush(stdout);
        if (gate.failures) ++failed;
    }
    std::printf("%d/10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
