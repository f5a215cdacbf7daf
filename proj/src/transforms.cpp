#include "freeprob/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freeprob {

namespace {

constexpr double kPi = 3.14159265358979323846;

double auto_start_radius(const Measure& mu, const InversionConfig& cfg) {
    if (cfg.start_radius > 0.0) return cfg.start_radius;
    return 16.0 * (mu.support_radius() + 1.0);
}

using PairMap = std::function<std::pair<cplx, cplx>(cplx)>;

PairMap numeric_pair(const AnalyticMap& f) {
    return [f](cplx w) {
        double h = 1e-7 * (1.0 + std::abs(w));
        return std::make_pair(f(w), (f(w + h) - f(w - h)) / (2.0 * h));
    };
}

// Newton solve f(w) = target from a given seed.  Returns solution or throws.
cplx newton_solve(const PairMap& f, cplx target, cplx seed, const InversionConfig& cfg,
                  bool* ok = nullptr) {
    cplx w = seed;
    double scale = 1.0 + std::abs(target);
    auto [fw, dw] = f(w);
    double res = std::abs(fw - target);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (res <= cfg.newton_tol * scale) {
            if (ok) *ok = true;
            return w;
        }
        cplx d = dw;
        if (std::abs(d) < 1e-300) break;
        cplx step = (fw - target) / d;
        // backtracking line search
        double lambda = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 12; ++bt) {
            cplx cand = w - lambda * step;
            std::pair<cplx, cplx> fc;
            try {
                fc = f(cand);
            } catch (const Error&) {
                lambda *= 0.5;
                continue;
            }
            double rc = std::abs(fc.first - target);
            if (rc < res || (bt == 0 && rc <= cfg.newton_tol * scale)) {
                w = cand;
                fw = fc.first;
                dw = fc.second;
                res = rc;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) break;
    }
    if (res <= cfg.newton_tol * scale) {
        if (ok) *ok = true;
        return w;
    }
    if (ok) {
        *ok = false;
        return w;
    }
    throw InversionError("Newton iteration failed to converge", res);
}

// Continuation along the ray start_radius * target/|target| -> target.
cplx invert_by_continuation(const PairMap& f, cplx target, const InversionConfig& cfg,
                            double start_radius) {
    double r_t = std::abs(target);
    if (r_t == 0.0) throw InversionError("cannot invert toward the origin", 0.0);
    if (r_t >= start_radius) return newton_solve(f, target, target, cfg);

    cplx dir = target / r_t;
    int n = std::max(1, cfg.continuation_steps);
    double ratio = std::pow(r_t / start_radius, 1.0 / n);
    cplx w = start_radius * dir;  // asymptotic seed at the outer radius
    double r_prev = start_radius;
    for (int k = 0; k <= n; ++k) {
        double r = (k == n) ? r_t : start_radius * std::pow(ratio, k);
        cplx t = r * dir;
        cplx seed = w + (r - r_prev) * dir;  // f ~ identity at infinity
        bool ok = false;
        cplx sol = newton_solve(f, t, seed, cfg, &ok);
        if (!ok) {
            // bisect the continuation step once before giving up
            double rm = 0.5 * (r + r_prev);
            cplx wm = newton_solve(f, rm * dir, w + (rm - r_prev) * dir, cfg);
            sol = newton_solve(f, t, wm + (r - rm) * dir, cfg);
        }
        w = sol;
        r_prev = r;
    }
    return w;
}

// Lagrange extrapolation to 0 of (eps_j, value_j).
double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& val) {
    double out = 0.0;
    for (size_t j = 0; j < eps.size(); ++j) {
        double lj = 1.0;
        for (size_t m = 0; m < eps.size(); ++m)
            if (m != j) lj *= (0.0 - eps[m]) / (eps[j] - eps[m]);
        out += lj * val[j];
    }
    return out;
}

}  // namespace

// --- domains ----------------------------------------------------------------

bool UpperConeDomain::contains(cplx z) const {
    return z.imag() > alpha * std::abs(z.real()) && std::abs(z) > beta;
}

cplx UpperConeDomain::sample_point(double r) const { return cplx(0.0, r); }

bool SectorComplementDomain::contains(cplx z) const {
    if (std::abs(z) <= beta) return false;
    if (z.real() > 0.0 && std::abs(z.imag()) < alpha * z.real()) return false;
    return true;
}

cplx SectorComplementDomain::sample_point(double r) const { return cplx(-r, 0.0); }

// --- Cauchy transform -------------------------------------------------------

std::pair<cplx, cplx> cauchy_with_derivative(const Measure& mu, cplx z) {
    cplx g(0.0, 0.0), dg(0.0, 0.0);
    for (const auto& a : mu.atoms) {
        cplx d = z - a.location;
        if (std::abs(d) < 1e-13) throw PoleError("evaluation point hits an atom");
        g += a.weight / d;
        dg -= a.weight / (d * d);
    }
    if (!mu.samples.empty()) {
        double wgt = mu.sample_mass / static_cast<double>(mu.samples.size());
        for (double s : mu.samples) {
            cplx d = z - s;
            if (std::abs(d) < 1e-13) throw PoleError("evaluation point hits a sample");
            g += wgt / d;
            dg -= wgt / (d * d);
        }
    }
    if (mu.has_density() && z.imag() == 0.0 && z.real() >= mu.grid.front() &&
        z.real() <= mu.grid.back()) {
        throw PoleError("evaluation point lies on the density support");
    }
    // Exact per-cell integral of a linear density against 1/(z-t), expanded
    // about the cell midpoint: with u = z-m, h = half-width, x = h/u,
    //   I  = rho(m)*L + c1*(u*L - 2h),      L = log((u+h)/(u-h)),
    //   I' = -2h*rho(m)/(u^2-h^2) + c1*(L - 2hu/(u^2-h^2)).
    // The bracketed differences cancel catastrophically for narrow cells with
    // steep slopes (graded edge grids), so they are summed as series in x.
    for (size_t i = 0; i + 1 < mu.grid.size(); ++i) {
        double a = mu.grid[i], b = mu.grid[i + 1];
        double da = mu.density[i], db = mu.density[i + 1];
        if (da == 0.0 && db == 0.0) continue;
        double m = 0.5 * (a + b), h = 0.5 * (b - a);
        double c1 = (db - da) / (b - a);
        double rho_m = 0.5 * (da + db);
        cplx u = z - m;
        cplx x = h / u;
        cplx L, bracket, dbracket;
        if (std::abs(x) < 0.25) {
            cplx x2 = x * x, p = x;
            cplx s_l = 0.0, s_b = 0.0, s_d = 0.0;
            for (int k = 0; k < 16; ++k) {
                double odd = 2.0 * k + 1.0;
                s_l += p / odd;                       // x^(2k+1)/(2k+1)
                if (k >= 1) {
                    s_b += p / odd;                   // for u*L - 2h
                    s_d += p * (2.0 * k / odd);       // for L - 2hu/(u^2-h^2)
                }
                p *= x2;
            }
            L = 2.0 * s_l;
            bracket = 2.0 * u * s_b;                  // u*L - 2h
            dbracket = -2.0 * s_d;                    // L - 2hu/(u^2-h^2)
        } else {
            L = std::log((u + h) / (u - h));
            bracket = u * L - 2.0 * h;
            dbracket = L - 2.0 * h * u / (u * u - h * h);
        }
        cplx inv = 1.0 / (u * u - h * h);
        g += rho_m * L + c1 * bracket;
        dg += -2.0 * h * rho_m * inv + c1 * dbracket;
    }
    return {g, dg};
}

cplx cauchy(const Measure& mu, cplx z) { return cauchy_with_derivative(mu, z).first; }

AnalyticMap analytic_cauchy(const ParametricLaw& law) {
    using Tag = ParametricLaw::Tag;
    // all square roots are taken on the branch with r(z) ~ z at infinity,
    // realized as z * principal_sqrt(1 + O(1/z))
    switch (law.tag) {
        case Tag::Dirac: {
            double c = law.p1;
            return [c](cplx z) { return 1.0 / (z - c); };
        }
        case Tag::SymmetricBernoulli:
            return [](cplx z) { return z / (z * z - 1.0); };
        case Tag::Semicircle: {
            double v = law.p1;
            return [v](cplx z) {
                // (z - r)/(2v) rationalized to avoid cancellation at large |z|
                cplx r = z * std::sqrt(1.0 - 4.0 * v / (z * z));
                return 2.0 / (z + r);
            };
        }
        case Tag::MarchenkoPastur: {
            double l = law.p1;
            return [l](cplx z) {
                cplx r = z * std::sqrt(1.0 - 2.0 * (1.0 + l) / z +
                                       (1.0 - l) * (1.0 - l) / (z * z));
                // (z+l-1-r)/(2lz) rationalized: (z+l-1)^2 - r^2 = 4lz
                return 2.0 / (z + l - 1.0 + r);
            };
        }
        case Tag::Arcsine: {
            double m = 0.5 * (law.p1 + law.p2), c = 0.5 * (law.p2 - law.p1);
            return [m, c](cplx z) {
                cplx u = z - m;
                return 1.0 / (u * std::sqrt(1.0 - c * c / (u * u)));
            };
        }
        case Tag::ArcsinePositive: {
            double b = law.p1;
            return [b](cplx z) { return 1.0 / (z * std::sqrt(1.0 - b / z)); };
        }
        case Tag::Uniform: {
            double a = law.p1, b = law.p2;
            return [a, b](cplx z) { return std::log((z - a) / (z - b)) / (b - a); };
        }
    }
    throw ParameterError("unknown parametric law");
}

cplx reciprocal_cauchy(const Measure& mu, cplx z) {
    cplx g = cauchy(mu, z);
    if (std::abs(g) < 1e-300) throw PoleError("Cauchy transform vanishes at this point");
    return 1.0 / g;
}

// --- free-function inversions ------------------------------------------------

cplx invert_analytic(const AnalyticMap& f, cplx target, const InversionConfig& cfg) {
    double r0 = cfg.start_radius > 0.0 ? cfg.start_radius
                                       : std::max(16.0, 8.0 * std::abs(target));
    return invert_by_continuation(numeric_pair(f), target, cfg, r0);
}

// --- TransformEngine ---------------------------------------------------------

TransformEngine::TransformEngine(const Measure& mu, InversionConfig cfg)
    : has_measure_(true),
      mu_(mu),
      g_([mu](cplx z) { return freeprob::cauchy(mu, z); }),
      kind_(mu.support_kind),
      cfg_(cfg) {
    if (cfg_.start_radius <= 0.0) cfg_.start_radius = auto_start_radius(mu, cfg_);
}

TransformEngine::TransformEngine(AnalyticMap g, double support_radius, SupportKind kind,
                                 InversionConfig cfg)
    : g_(std::move(g)), kind_(kind), cfg_(cfg) {
    if (cfg_.start_radius <= 0.0) cfg_.start_radius = 16.0 * (support_radius + 1.0);
}

cplx TransformEngine::cauchy(cplx z) const { return g_(z); }

std::pair<cplx, cplx> TransformEngine::cauchy_pair(cplx z) const {
    if (has_measure_) return cauchy_with_derivative(mu_, z);
    double h = 1e-7 * (1.0 + std::abs(z));
    return {g_(z), (g_(z + h) - g_(z - h)) / (2.0 * h)};
}

std::pair<cplx, cplx> TransformEngine::f_pair(cplx z) const {
    auto [g, dg] = cauchy_pair(z);
    if (std::abs(g) < 1e-300) throw PoleError("Cauchy transform vanishes at this point");
    return {1.0 / g, -dg / (g * g)};
}

cplx TransformEngine::reciprocal_cauchy(cplx z) const { return f_pair(z).first; }

namespace {
// Nearest cached solution; returns index or -1.
int nearest_seed(const std::vector<std::pair<cplx, cplx>>& seeds, cplx target) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < seeds.size(); ++i) {
        double d = std::abs(seeds[i].first - target);
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}
}  // namespace

cplx TransformEngine::invert_f(cplx target) {
    auto F = [this](cplx w) { return f_pair(w); };
    int idx = nearest_seed(f_seeds_, target);
    if (idx >= 0 && std::abs(f_seeds_[idx].first - target) < 0.25 * (1.0 + std::abs(target))) {
        cplx seed = f_seeds_[idx].second + (target - f_seeds_[idx].first);
        bool ok = false;
        cplx w = newton_solve(F, target, seed, cfg_, &ok);
        if (ok) {
            f_seeds_.emplace_back(target, w);
            return w;
        }
    }
    cplx w = invert_by_continuation(F, target, cfg_, cfg_.start_radius);
    f_seeds_.emplace_back(target, w);
    return w;
}

std::pair<cplx, cplx> TransformEngine::phi_pair(cplx z) {
    cplx x = invert_f(z);
    cplx df = f_pair(x).second;  // F'(F^{-1}(z))
    return {x - z, 1.0 / df - 1.0};
}

cplx TransformEngine::phi(cplx z) { return invert_f(z) - z; }

cplx TransformEngine::v(cplx z) { return (1.0 / z) * (1.0 + phi(z) / z); }

std::pair<cplx, cplx> TransformEngine::w_pair(cplx z) {
    if (kind_ != SupportKind::NonNegative)
        throw SupportError("W transform requires a measure on [0, inf)");
    auto [p, dp] = phi_pair(z);
    cplx den = z + p;
    cplx wv = z * z / den;
    cplx dw = (2.0 * z * den - z * z * (1.0 + dp)) / (den * den);
    return {wv, dw};
}

cplx TransformEngine::w(cplx z) { return w_pair(z).first; }

// W(F(m)) = F(m)^2 / m, because F(m) + phi(F(m)) = m.  Solving
// F(m)^2 / m = target in m therefore computes W^{-1}(target) = F(m) with a
// single Newton layer over direct Cauchy-transform evaluations.
cplx TransformEngine::invert_w_param(cplx target) {
    auto H = [this](cplx m) {
        auto [f, df] = f_pair(m);
        return std::make_pair(f * f / m, (2.0 * f * df * m - f * f) / (m * m));
    };
    auto seeds_try = [&](cplx tgt, cplx m0, cplx* out) {
        // tangent-corrected seed first (the root moves like a square root of
        // the target near critical points of h), then unshifted, then additive
        cplx prev_t = H(m0).first;
        cplx dh = H(m0).second;
        cplx shifts[3] = {std::abs(dh) > 1e-12 ? (tgt - prev_t) / dh : (tgt - prev_t),
                          cplx(0.0), tgt - prev_t};
        for (const cplx& sh : shifts) {
            bool ok = false;
            cplx m = newton_solve(H, tgt, m0 + sh, cfg_, &ok);
            if (ok) {
                *out = m;
                return true;
            }
        }
        return false;
    };
    int idx = nearest_seed(w_seeds_, target);
    if (idx >= 0 && std::abs(w_seeds_[idx].first - target) < 0.25 * (1.0 + std::abs(target))) {
        cplx m;
        if (seeds_try(target, w_seeds_[idx].second, &m)) {
            w_seeds_.emplace_back(target, m);
            return m;
        }
    }
    // Cold start: descend vertically from far above the target.  The branch
    // points of h sit on the real axis, so a ray from the start radius can
    // cross them, while a vertical approach meets that geometry only at the
    // end, warm-started.
    double hi = std::max({cfg_.start_radius, 2.0 * std::abs(target), 1.0});
    bool ok = false;
    cplx top = target + cplx(0.0, hi);
    cplx m = newton_solve(H, top, top, cfg_, &ok);
    if (!ok)
        throw InversionError("W inversion failed at the continuation start", hi);
    double floor = 1e-9 * (1.0 + std::abs(target));
    for (double h = hi; h > 0.0;) {
        double factor = 0.4;
        for (;;) {
            double hn = h * factor > floor ? h * factor : 0.0;
            if (seeds_try(target + cplx(0.0, hn), m, &m)) {
                h = hn;
                break;
            }
            factor = 0.5 + 0.5 * factor;
            if (factor > 0.995)
                throw InversionError("W inversion continuation stalled", h);
        }
    }
    w_seeds_.emplace_back(target, m);
    return m;
}

std::pair<cplx, cplx> TransformEngine::phiphi_pair(cplx z) {
    if (z.imag() < 0.0) {
        auto [v0, d0] = phiphi_pair(std::conj(z));
        return {std::conj(v0), std::conj(d0)};
    }
    cplx m = invert_w_param(z);
    auto [f, df] = f_pair(m);
    // W'(W^{-1}(z)) = h'(m) / F'(m) with h(m) = F(m)^2 / m
    cplx dh = (2.0 * f * df * m - f * f) / (m * m);
    return {f - z, df / dh - 1.0};
}

cplx TransformEngine::phiphi(cplx z) {
    if (z.imag() < 0.0) return std::conj(phiphi(std::conj(z)));
    return f_pair(invert_w_param(z)).first - z;
}

// --- FunctionInverter --------------------------------------------------------

FunctionInverter::FunctionInverter(AnalyticMap f, InversionConfig cfg)
    : f_(std::move(f)), cfg_(cfg) {
    if (cfg_.start_radius <= 0.0) cfg_.start_radius = 16.0;
}

cplx FunctionInverter::invert(cplx target) {
    PairMap fp = numeric_pair(f_);
    int idx = nearest_seed(seeds_, target);
    if (idx >= 0 && std::abs(seeds_[idx].first - target) < 0.25 * (1.0 + std::abs(target))) {
        cplx seed = seeds_[idx].second + (target - seeds_[idx].first);
        bool ok = false;
        cplx w = newton_solve(fp, target, seed, cfg_, &ok);
        if (ok) {
            seeds_.emplace_back(target, w);
            return w;
        }
    }
    cplx w = invert_by_continuation(fp, target, cfg_, cfg_.start_radius);
    seeds_.emplace_back(target, w);
    return w;
}

// --- thin free functions over the engine -------------------------------------

cplx voiculescu_phi(const Measure& mu, cplx z, const InversionConfig& cfg) {
    TransformEngine eng(mu, cfg);
    return eng.phi(z);
}

cplx v_transform(const Measure& mu, cplx z, const InversionConfig& cfg) {
    TransformEngine eng(mu, cfg);
    return eng.v(z);
}

cplx w_transform(const Measure& mu, cplx z, const InversionConfig& cfg) {
    TransformEngine eng(mu, cfg);
    return eng.w(z);
}

cplx phiphi(const Measure& mu, cplx z, const InversionConfig& cfg) {
    TransformEngine eng(mu, cfg);
    return eng.phiphi(z);
}

cplx estimate_ratio(const Measure& mu, cplx z, const InversionConfig& cfg) {
    TransformEngine eng(mu, cfg);
    cplx den = z * z * (eng.cauchy(z) - 1.0 / z);
    if (std::abs(den) < 1e-14)
        throw ParameterError("z^2 [G(z) - 1/z] is numerically zero (degenerate measure)");
    return eng.phiphi(z) / den;
}

// --- Stieltjes inversion ------------------------------------------------------

Measure stieltjes_recover(const AnalyticMap& g, const RecoveryOptions& opt) {
    if (opt.grid.size() < 2) throw ParameterError("recovery grid needs at least 2 points");
    if (opt.eps_schedule.size() < 2)
        throw ParameterError("eps schedule needs at least 2 entries");
    for (size_t i = 0; i + 1 < opt.eps_schedule.size(); ++i)
        if (opt.eps_schedule[i] <= opt.eps_schedule[i + 1])
            throw ParameterError("eps schedule must be strictly decreasing");

    const auto& eps = opt.eps_schedule;
    double eps_min = eps.back();

    // optional atom at 0: weight = lim eps * (-Im g(i eps)), sqrt(eps) model
    double atom_weight = 0.0;
    if (opt.atom_scan_at_zero) {
        double e1 = eps[eps.size() - 1], e2 = eps[eps.size() - 2];
        double v1 = e1 * (-g(cplx(0.0, e1)).imag());
        double v2 = e2 * (-g(cplx(0.0, e2)).imag());
        double s1 = std::sqrt(e1), s2 = std::sqrt(e2);
        double a = (v1 * s2 - v2 * s1) / (s2 - s1);
        if (a > 5e-4) atom_weight = std::min(a, 1.0);
    }

    std::vector<double> dens(opt.grid.size(), 0.0);
    std::vector<double> vals(eps.size());
    double neg_mass = 0.0;
    for (size_t i = 0; i < opt.grid.size(); ++i) {
        double x = opt.grid[i];
        if (atom_weight > 0.0 && std::abs(x) < 2.0 * eps_min) {
            dens[i] = 0.0;
            continue;
        }
        for (size_t j = 0; j < eps.size(); ++j)
            vals[j] = -g(cplx(x, eps[j])).imag() / kPi;
        dens[i] = extrapolate_to_zero(eps, vals);
    }
    // trapezoid mass of the negative part, then clip
    for (size_t i = 0; i + 1 < opt.grid.size(); ++i) {
        double h = opt.grid[i + 1] - opt.grid[i];
        neg_mass += 0.5 * h * (std::min(dens[i], 0.0) + std::min(dens[i + 1], 0.0));
    }
    if (-neg_mass > 0.05)
        throw RecoveryError("recovered density has substantial negative mass");
    for (double& d : dens) d = std::max(d, 0.0);

    Measure out;
    out.support_kind = opt.support_kind;
    out.grid = opt.grid;
    out.density = std::move(dens);
    double dm = out.density_mass();
    if (dm <= 0.0 && atom_weight <= 0.0)
        throw RecoveryError("recovered measure carries no mass");
    double target_density_mass = 1.0 - atom_weight;
    if (dm > 0.0) {
        double s = target_density_mass / dm;
        for (double& d : out.density) d *= s;
    } else {
        atom_weight = 1.0;
    }
    if (atom_weight > 0.0) out.atoms.push_back({0.0, atom_weight});
    return out;
}

// --- calibration --------------------------------------------------------------

CalibrationReport calibrate_domain(const Measure& mu, const InversionConfig& cfg) {
    CalibrationReport rep;
    double radius = mu.support_radius();
    double beta = std::max(4.0 * radius, 1.0);
    double alpha = 1.0;
    rep.probes = 32;

    bool nonneg = mu.support_kind == SupportKind::NonNegative;
    for (int attempt = 0;; ++attempt) {
        TransformEngine eng(mu, cfg);
        bool ok = true;
        double worst = 0.0;
        cplx worst_probe;
        for (int k = 0; k < 32 && ok; ++k) {
            // boundary probes at |z| = beta on the admissible angular range
            double theta;
            cplx z;
            if (nonneg) {
                // sector complement: angles in (atan(alpha), 2 pi - atan(alpha))
                theta = std::atan(alpha) + (2.0 * (kPi - std::atan(alpha))) * (k + 0.5) / 32.0;
                z = beta * 1.0001 * cplx(std::cos(theta), std::sin(theta));
            } else {
                // upper cone: angles in (atan(alpha), pi - atan(alpha))
                theta = std::atan(alpha) + (kPi - 2.0 * std::atan(alpha)) * (k + 0.5) / 32.0;
                z = beta * 1.0001 * cplx(std::cos(theta), std::sin(theta));
            }
            try {
                if (nonneg) {
                    cplx pp = eng.phiphi(z);
                    cplx back = eng.w(z + pp);
                    worst = std::max(worst, std::abs(back - z));
                } else {
                    cplx p = eng.phi(z);
                    cplx back = eng.reciprocal_cauchy(z + p);
                    worst = std::max(worst, std::abs(back - z));
                }
            } catch (const Error&) {
                ok = false;
                worst_probe = z;
            }
        }
        if (ok) {
            rep.worst_residual = worst;
            break;
        }
        beta *= 2.0;
        if (attempt >= 8)
            throw CalibrationError("domain calibration failed; largest failing probe at |z|=" +
                                   std::to_string(std::abs(worst_probe)));
    }
    rep.sector = {alpha, beta};
    rep.cone = {alpha, beta};
    return rep;
}

}  // namespace freeprob
