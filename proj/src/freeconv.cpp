#include "freeprob/freeconv.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace freeprob {

namespace {

using PairMap = std::function<std::pair<cplx, cplx>(cplx)>;

bool is_dirac_at(const Measure& m, double c) {
    return m.is_degenerate() && std::abs(m.atoms[0].location - c) < 1e-14;
}

Measure translate(const Measure& m, double c) {
    Measure out = m;
    for (auto& a : out.atoms) a.location += c;
    for (auto& x : out.grid) x += c;
    for (auto& s : out.samples) s += c;
    if (out.support_kind == SupportKind::NonNegative && out.support_min() < 0.0)
        out.support_kind = SupportKind::RealLine;
    return out;
}

std::vector<double> recovery_grid(double lo, double hi, int n,
                                  const std::vector<double>& edges) {
    std::vector<double> g;
    g.reserve(n + 1 + 60 * edges.size());
    for (int i = 0; i <= n; ++i) g.push_back(lo + (hi - lo) * i / n);
    for (double e : edges) {
        for (double s = 0.2 * (hi - lo); s > 1e-9 * (hi - lo); s *= 0.82) {
            if (e + s > lo && e + s < hi) g.push_back(e + s);
            if (e - s > lo && e - s < hi) g.push_back(e - s);
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<double> auto_eps(const ConvolutionConfig& cfg, double span) {
    if (!cfg.eps_schedule.empty()) return cfg.eps_schedule;
    double s = std::max(1.0, 0.25 * span);
    return {1e-6 * s, 5e-7 * s, 2.5e-7 * s};
}

// Newton solver for an implicit contour equation, warm-started along the
// contour with a vertical-descent fallback from far above the support.
class ContourSolver {
public:
    ContourSolver(PairMap f, double high, InversionConfig cfg, double seed_scale = 1.0)
        : f_(std::move(f)), high_(high), cfg_(cfg), seed_scale_(seed_scale) {}

    // solve f(t) = u
    cplx solve(cplx u) {
        if (have_last_ && std::abs(u - last_u_) < 0.5 * (1.0 + std::abs(u))) {
            // tangent-corrected seed first (robust near critical points where
            // the root moves like a square root of u), then plain variants
            cplx v, d;
            bool have_d = eval(last_t_, &v, &d) && std::abs(d) > 1e-12;
            cplx shifts[3] = {have_d ? (u - last_u_) / d : (u - last_u_), cplx(0.0),
                              u - last_u_};
            for (const cplx& sh : shifts) {
                bool ok = false;
                cplx t = newton(u, last_t_ + sh, &ok);
                if (ok) return remember(u, t);
            }
        }
        // descend from Re u + i*high toward u, shrinking the step on failure
        bool ok = false;
        cplx t = newton(cplx(u.real(), high_), seed_scale_ * cplx(u.real(), high_), &ok);
        if (!ok) throw ConvolutionError("contour solve failed at height " +
                                        std::to_string(high_));
        double h = high_;
        while (h > u.imag()) {
            double factor = 0.5;
            for (;;) {
                double hn = std::max(h * factor, u.imag());
                bool ok2 = false;
                cplx tn = newton(cplx(u.real(), hn), t, &ok2);
                if (ok2) {
                    t = tn;
                    h = hn;
                    break;
                }
                factor = 0.5 + 0.5 * factor;
                if (factor > 0.999)
                    throw ConvolutionError("contour solve failed near Re z = " +
                                           std::to_string(u.real()));
            }
        }
        return remember(u, t);
    }

    double worst_defect() const { return worst_; }

private:
    cplx remember(cplx u, cplx t) {
        have_last_ = true;
        last_u_ = u;
        last_t_ = t;
        return t;
    }

    // f_ may throw (inner inversions); treat that as a rejected step
    bool eval(cplx t, cplx* v, cplx* d) {
        try {
            auto [pv, pd] = f_(t);
            *v = pv;
            *d = pd;
            return true;
        } catch (const Error&) {
            return false;
        }
    }

    cplx newton(cplx target, cplx seed, bool* ok) {
        *ok = false;
        cplx t = seed, v, d;
        if (!eval(t, &v, &d)) return t;
        double scale = 1.0 + std::abs(target);
        double res = std::abs(v - target);
        double last_step = 1e300;
        for (int it = 0; it < cfg_.max_iterations && res > cfg_.newton_tol * scale; ++it) {
            if (std::abs(d) < 1e-300) break;
            cplx step = (v - target) / d;
            last_step = std::abs(step);
            double lam = 1.0;
            bool improved = false;
            for (int bt = 0; bt < 14; ++bt) {
                cplx tn = t - lam * step, vn, dn;
                if (eval(tn, &vn, &dn)) {
                    double rn = std::abs(vn - target);
                    if (rn < res) {
                        t = tn;
                        v = vn;
                        d = dn;
                        res = rn;
                        improved = true;
                        break;
                    }
                }
                lam *= 0.5;
            }
            if (!improved) break;
        }
        double rel = res / scale;
        if (rel <= 100.0 * cfg_.newton_tol) {  // near-converged: accept, record
            *ok = true;
            worst_ = std::max(worst_, rel);
        } else if (rel <= 1e-4 && last_step <= 1e-9 * (1.0 + std::abs(t))) {
            // residual floor from noise in f near a critical point, but the
            // root itself is pinned down (derivative is large): accept
            *ok = true;
            worst_ = std::max(worst_, 100.0 * cfg_.newton_tol);
        }
        return t;
    }

    PairMap f_;
    double high_;
    InversionConfig cfg_;
    double seed_scale_ = 1.0;
    bool have_last_ = false;
    cplx last_u_, last_t_;
    double worst_ = 0.0;
};

// Joint solver for the R-diagonal convolution chain.  With one parameter m_k
// per summand and the common W^{-1} value t, the whole chain
//     phiphi_k(t) = F_k(m_k) - t,   u = (t + sum_k phiphi_k(t))^2 / t
// becomes the polynomial-in-F system
//     E_k      = F_k(m_k)^2 / m_k - t          (k = 1..K)
//     E_{K+1}  = Y^2 - u t,   Y = sum_k F_k(m_k) - (K-1) t,
// which involves only direct Cauchy-transform evaluations: no branch cuts, so
// continuation in (m_1..m_K, t) tracks second-sheet values of phiphi_k that the
// per-summand inversion cannot reach.  G of the convolution is 1/Y.
class RdJointSolver {
public:
    RdJointSolver(std::vector<const Measure*> ms, double high, InversionConfig cfg)
        : ms_(std::move(ms)), high_(high), cfg_(cfg) {
        for (const Measure* m : ms_) means_.push_back(moment(*m, 1));
    }

    cplx g_value(cplx u) {
        int K = static_cast<int>(ms_.size());
        if (have_last_ && std::abs(u - last_u_) < 0.5 * (1.0 + std::abs(u))) {
            Eigen::VectorXcd x = last_x_;
            if (tangent_shift(&x, last_u_, u - last_u_) && newton(u, &x))
                return remember(u, x);
            x = last_x_;
            if (inverse_scaled_shift(&x, last_u_, u) && newton(u, &x) &&
                g_close(x, u, last_g_))
                return remember(u, x);
            x = last_x_;
            if (newton(u, &x)) return remember(u, x);
        }
        // vertical descent from far above the support
        Eigen::VectorXcd x(K + 1);
        cplx top(u.real(), high_);
        x(K) = top;
        for (int k = 0; k < K; ++k) x(k) = top + 2.0 * means_[k];
        if (!newton(top, &x))
            throw ConvolutionError("joint solve failed at height " + std::to_string(high_));
        double h = high_;
        while (h > u.imag()) {
            double factor = 0.4;
            for (;;) {
                double hn = std::max(h * factor, u.imag());
                cplx un(u.real(), hn);
                cplx ub(u.real(), h);
                Eigen::VectorXcd xn = x;
                tangent_shift(&xn, ub, un - ub);
                bool solved = newton(un, &xn);
                if (!solved) {
                    Eval eb = evaluate(x, ub);
                    xn = x;
                    solved = eb.ok && inverse_scaled_shift(&xn, ub, un) && newton(un, &xn) &&
                             g_close(xn, un, 1.0 / eb.Y);
                }
                if (solved) {
                    x = xn;
                    h = hn;
                    break;
                }
                factor = 0.5 + 0.5 * factor;
                if (factor > 0.999) {
                    if (h <= 8.0 * u.imag()) {
                        // degenerate Jacobian right at a support edge: settle
                        // for the nearest resolvable contour height
                        worst_ = std::max(worst_, (h - u.imag()) / (1.0 + std::abs(u)));
                        return remember(cplx(u.real(), h), x);
                    }
                    throw ConvolutionError("joint solve stalled near Re z = " +
                                           std::to_string(u.real()));
                }
            }
        }
        return remember(u, x);
    }

    double worst_defect() const { return worst_; }

private:
    struct Eval {
        Eigen::VectorXcd E;
        Eigen::MatrixXcd J;
        cplx Y;
        double norm = 0.0;
        bool ok = false;
    };

    Eval evaluate(const Eigen::VectorXcd& x, cplx u) {
        int K = static_cast<int>(ms_.size());
        Eval ev;
        ev.E.setZero(K + 1);
        ev.J.setZero(K + 1, K + 1);
        cplx t = x(K);
        if (std::abs(t) < 1e-300) return ev;
        cplx Y = -double(K - 1) * t;
        try {
            for (int k = 0; k < K; ++k) {
                cplx m = x(k);
                auto [g, dg] = cauchy_with_derivative(*ms_[k], m);
                if (std::abs(g) < 1e-300) return ev;
                cplx f = 1.0 / g, df = -dg / (g * g);
                ev.E(k) = f * f / m - t;
                ev.J(k, k) = (2.0 * f * df * m - f * f) / (m * m);
                ev.J(k, K) = -1.0;
                ev.J(K, k) = 2.0 * df;  // completed with *Y below
                Y += f;
            }
        } catch (const Error&) {
            return ev;
        }
        ev.Y = Y;
        // E_{K+1} = Y^2/t - u rather than Y^2 - u t: the cleared-denominator
        // form has a spurious u-independent root at t = 0, Y = 0
        for (int k = 0; k < K; ++k) ev.J(K, k) *= Y / t;
        ev.E(K) = Y * Y / t - u;
        ev.J(K, K) = (-2.0 * Y * double(K - 1) * t - Y * Y) / (t * t);
        double scale_t = 1.0 + std::abs(t);
        double scale_y = 1.0 + std::abs(u);
        ev.norm = std::abs(ev.E(K)) / scale_y;
        for (int k = 0; k < K; ++k) ev.norm = std::max(ev.norm, std::abs(ev.E(k)) / scale_t);
        ev.ok = true;
        return ev;
    }

    // the rescaled seed may only be trusted where g barely moves (in the
    // blow-up regime g tends to a finite real limit); a jump means the Newton
    // landed on a root from the wrong sheet, which no residual check reveals
    bool g_close(const Eigen::VectorXcd& x, cplx u, cplx g0) {
        Eval ev = evaluate(x, u);
        if (!ev.ok || std::abs(ev.Y) < 1e-300) return false;
        return std::abs(1.0 / ev.Y - g0) <= 0.25 * (1.0 + std::abs(g0));
    }

    // seed for the t ~ Y^2/u blow-up below a spectral gap: the tangent (linear)
    // shift badly underestimates 1/u growth, so scale t by u0/u1 and carry each
    // m_k along its own branch h_k(m_k) = t
    bool inverse_scaled_shift(Eigen::VectorXcd* x, cplx u0, cplx u1) {
        int K = static_cast<int>(ms_.size());
        if (std::abs(u1) < 1e-300) return false;
        // only meaningful deep in the blow-up regime: elsewhere rescaling t can
        // hop to a root on the wrong sheet, which no local check rules out
        if (std::abs((*x)(K)) < 1e3 * (1.0 + std::abs(u0))) return false;
        Eval ev = evaluate(*x, u0);
        if (!ev.ok) return false;
        cplx dt = (*x)(K) * (u0 / u1 - 1.0);
        (*x)(K) += dt;
        for (int k = 0; k < K; ++k) {
            if (std::abs(ev.J(k, k)) < 1e-300) return false;
            (*x)(k) += dt / ev.J(k, k);
        }
        return true;
    }

    // first-order update of x for a change du of the contour point
    bool tangent_shift(Eigen::VectorXcd* x, cplx base_u, cplx du) {
        int K = static_cast<int>(ms_.size());
        Eval ev = evaluate(*x, base_u);
        if (!ev.ok) return false;
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(K + 1);
        rhs(K) = du;  // dE_{K+1}/du = -1
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(ev.J);
        if (!lu.isInvertible()) return false;
        *x += lu.solve(rhs);
        return true;
    }

    bool newton(cplx u, Eigen::VectorXcd* x) {
        Eval ev = evaluate(*x, u);
        if (!ev.ok) return false;
        double last_step = 1e300;
        for (int it = 0; it < cfg_.max_iterations && ev.norm > cfg_.newton_tol; ++it) {
            Eigen::FullPivLU<Eigen::MatrixXcd> lu(ev.J);
            Eigen::VectorXcd delta = lu.solve(ev.E);
            last_step = delta.norm() / (1.0 + x->norm());
            double lam = 1.0;
            bool improved = false;
            for (int bt = 0; bt < 14; ++bt) {
                Eigen::VectorXcd xn = *x - lam * delta;
                Eval en = evaluate(xn, u);
                if (en.ok && en.norm < ev.norm) {
                    *x = xn;
                    ev = en;
                    improved = true;
                    break;
                }
                lam *= 0.5;
            }
            if (!improved) break;
        }
        bool settled = ev.norm <= 100.0 * cfg_.newton_tol ||
                       // noise floor at a critical point; the solution is pinned
                       (ev.norm <= 1e-4 && last_step <= 1e-9);
        if (!settled) return false;
        // reject spurious roots: G maps the upper half-plane into the lower one,
        // and every contour point sits above the real axis
        cplx g = 1.0 / ev.Y;
        if (g.imag() > 1e-8 * (1.0 + std::abs(g))) return false;
        worst_ = std::max(worst_, ev.norm);
        return true;
    }

    cplx remember(cplx u, const Eigen::VectorXcd& x) {
        have_last_ = true;
        last_u_ = u;
        last_x_ = x;
        Eval ev = evaluate(x, u);
        last_g_ = 1.0 / ev.Y;
        return last_g_;
    }

    std::vector<const Measure*> ms_;
    std::vector<double> means_;
    double high_;
    InversionConfig cfg_;
    double worst_ = 0.0;
    bool have_last_ = false;
    cplx last_u_;
    cplx last_g_;
    Eigen::VectorXcd last_x_;
};

// attracting fixed point of w -> z + h2(z + h1(w))
cplx subordination_omega(const Measure& m1, const Measure& m2, cplx z, cplx seed,
                         double tol, double* defect) {
    auto h1 = [&](cplx w) { return reciprocal_cauchy(m1, w) - w; };
    auto h2 = [&](cplx w) { return reciprocal_cauchy(m2, w) - w; };
    cplx w = seed;
    cplx prev = w, prev2 = w;
    double d = 1e300;
    for (int it = 0; it < 4000; ++it) {
        cplx nw = z + h2(z + h1(w));
        d = std::abs(nw - w);
        prev2 = prev;
        prev = w;
        w = nw;
        if (d <= tol) break;
        // Aitken delta-squared acceleration on slow linear convergence
        if (it % 16 == 15) {
            cplx d1 = w - prev, d2 = prev - prev2;
            cplx den = d1 - d2;
            if (std::abs(den) > 1e-14 * std::abs(d1)) {
                cplx acc = w - d1 * d1 / den;
                if (acc.imag() > 0.0) {
                    cplx test = z + h2(z + h1(acc));
                    if (std::abs(test - acc) < d) w = acc;
                }
            }
        }
    }
    if (defect) *defect = std::max(*defect, d);
    return w;
}

}  // namespace

// --- boxplus -----------------------------------------------------------------

ConvolutionResult boxplus(const Measure& mu1, const Measure& mu2,
                          const ConvolutionConfig& cfg) {
    ConvolutionResult out;
    double r1 = mu1.support_radius(), r2 = mu2.support_radius();
    out.cone_domain = {1.0, 4.0 * (r1 + r2 + 1.0)};

    // dirac(c) acts by translation -- exact, no numerics needed
    if (mu2.is_degenerate()) {
        out.measure = translate(mu1, mu2.atoms[0].location);
        out.residuals["phi_additivity"] = 0.0;
        out.residuals["fixed_point"] = 0.0;
        return out;
    }
    if (mu1.is_degenerate()) return boxplus(mu2, mu1, cfg);

    double lo = mu1.support_min() + mu2.support_min();
    double hi = mu1.support_max() + mu2.support_max();
    double pad = 0.02 * (hi - lo) + 1e-6;
    std::vector<double> grid = recovery_grid(lo - pad, hi + pad, cfg.grid_points, {lo, hi});
    std::vector<double> eps = auto_eps(cfg, hi - lo);

    double tol = cfg.inversion.newton_tol;
    double fp_defect = 0.0;
    double high = std::max(2.0 * (r1 + r2), 4.0);

    // march each contour left to right, warm-starting the fixed point
    std::vector<std::vector<double>> imG(eps.size(), std::vector<double>(grid.size()));
    for (size_t j = 0; j < eps.size(); ++j) {
        cplx w = cplx(grid.front(), high);
        // descend to the contour height at the first abscissa
        for (double h = high; h > eps[j]; h = std::max(h * 0.5, eps[j])) {
            cplx z(grid.front(), h);
            w = subordination_omega(mu1, mu2, z, w, tol, &fp_defect);
            if (h == eps[j]) break;
        }
        for (size_t i = 0; i < grid.size(); ++i) {
            cplx z(grid[i], eps[j]);
            w = subordination_omega(mu1, mu2, z, w, tol, &fp_defect);
            imG[j][i] = cauchy(mu1, w).imag();
        }
    }
    if (fp_defect > 1e-6)
        throw ConvolutionError("subordination fixed point stagnated (defect " +
                               std::to_string(fp_defect) + ")");

    // Richardson extrapolation of the density over the eps schedule
    std::vector<double> dens(grid.size(), 0.0);
    constexpr double kPi = 3.14159265358979323846;
    for (size_t i = 0; i < grid.size(); ++i) {
        double v = 0.0;
        for (size_t j = 0; j < eps.size(); ++j) {
            double lj = 1.0;
            for (size_t m = 0; m < eps.size(); ++m)
                if (m != j) lj *= (0.0 - eps[m]) / (eps[j] - eps[m]);
            v += lj * (-imG[j][i] / kPi);
        }
        dens[i] = std::max(v, 0.0);
    }
    out.measure = Measure::from_density(std::move(grid), std::move(dens),
                                        SupportKind::RealLine);
    out.residuals["fixed_point"] = fp_defect;

    // additivity diagnostic: phi of the construction vs phi_1 + phi_2
    {
        TransformEngine e1(mu1, cfg.inversion), e2(mu2, cfg.inversion);
        double rho = out.cone_domain.beta * 1.05;
        InversionConfig icfg = cfg.inversion;
        icfg.start_radius = 8.0 * rho;
        AnalyticMap f_res = [&](cplx u) {
            double dd = 0.0;
            cplx om = subordination_omega(mu1, mu2, u, u, tol, &dd);
            return reciprocal_cauchy(mu1, om);
        };
        FunctionInverter inv(f_res, icfg);
        double worst = 0.0;
        for (int k = 0; k < cfg.probe_points; ++k) {
            double th = kPi * (0.3 + 0.4 * (k + 0.5) / cfg.probe_points);
            cplx z = rho * cplx(std::cos(th), std::sin(th));
            cplx phi_res = inv.invert(z) - z;
            worst = std::max(worst, std::abs(phi_res - e1.phi(z) - e2.phi(z)));
        }
        out.residuals["phi_additivity"] = worst;
    }
    return out;
}

// --- phiphi-sum recovery (Route A core) --------------------------------------

Measure measure_from_phiphi(const PairMap& pair_s, double radius_bound,
                            const ConvolutionConfig& cfg,
                            std::map<std::string, double>* residuals) {
    double b = std::max(radius_bound, 1e-6);
    // G(u) = 1/(t + s(t)) on the curve u = (t + s(t))^2 / t: this realizes
    // W^{-1} = id + s, then V = 1/W, phi(z) = z(z V(z) - 1), F^{-1} = id + phi
    // with a single implicit solve.
    PairMap P = [&pair_s](cplx t) {
        auto [s, ds] = pair_s(t);
        cplx y = t + s;
        cplx val = y * y / t;
        cplx der = (2.0 * y * (1.0 + ds) * t - y * y) / (t * t);
        return std::make_pair(val, der);
    };
    double high = std::max(2.0 * b, 8.0);
    ContourSolver solver(P, high, cfg.inversion);
    auto g_eval = [&](cplx u) {
        cplx t = solver.solve(u);
        auto [s, ds] = pair_s(t);
        (void)ds;
        return 1.0 / (t + s);
    };

    RecoveryOptions opt;
    opt.grid = recovery_grid(0.0, 1.02 * b, cfg.grid_points, {0.0, b});
    opt.eps_schedule = auto_eps(cfg, b);
    opt.atom_scan_at_zero = true;
    opt.support_kind = SupportKind::NonNegative;
    Measure rec = stieltjes_recover(g_eval, opt);
    if (residuals) (*residuals)["chain"] = solver.worst_defect();
    return rec;
}

// --- boxplus_rd --------------------------------------------------------------

ConvolutionResult boxplus_rd_many(const std::vector<const Measure*>& mus,
                                  const ConvolutionConfig& cfg) {
    if (mus.empty()) throw ParameterError("empty summand list");
    for (const Measure* m : mus)
        if (m->support_kind != SupportKind::NonNegative)
            throw SupportError("R-diagonal convolution requires measures on [0, inf)");

    ConvolutionResult out;
    double sqrt_sum = 0.0;
    for (const Measure* m : mus) sqrt_sum += std::sqrt(m->support_radius());
    double bound = sqrt_sum * sqrt_sum;
    out.sector_domain = {1.0, 4.0 * std::max(bound, 1.0)};

    std::vector<const Measure*> active;
    for (const Measure* m : mus)
        if (!is_dirac_at(*m, 0.0)) active.push_back(m);
    if (active.empty()) {
        out.measure = Measure::point_mass(0.0, SupportKind::NonNegative);
        out.residuals["chain"] = 0.0;
        out.residuals["phiphi_additivity"] = 0.0;
        return out;
    }
    if (active.size() == 1) {
        out.measure = *active[0];
        out.residuals["chain"] = 0.0;
        out.residuals["phiphi_additivity"] = 0.0;
        return out;
    }

    std::vector<TransformEngine> engines;
    engines.reserve(active.size());
    for (const Measure* m : active) engines.emplace_back(*m, cfg.inversion);
    double b = std::max(bound, 1e-6);
    RdJointSolver solver(active, std::max(2.0 * b, 8.0), cfg.inversion);
    RecoveryOptions opt;
    opt.grid = recovery_grid(0.0, 1.02 * b, cfg.grid_points, {0.0, b});
    opt.eps_schedule = auto_eps(cfg, b);
    opt.atom_scan_at_zero = true;
    opt.support_kind = SupportKind::NonNegative;
    out.measure = stieltjes_recover([&](cplx u) { return solver.g_value(u); }, opt);
    out.residuals["chain"] = solver.worst_defect();

    // close the loop: phiphi of the recovered measure vs the requested sum
    {
        TransformEngine rec_eng(out.measure, cfg.inversion);
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            cplx z(-4.0 * (1 << k) * std::max(bound, 1.0), 0.0);
            cplx s = 0.0;
            for (auto& e : engines) s += e.phiphi(z);
            worst = std::max(worst, std::abs(rec_eng.phiphi(z) - s));
        }
        out.residuals["phiphi_additivity"] = worst;
    }
    return out;
}

ConvolutionResult boxplus_rd(const Measure& mu1, const Measure& mu2,
                             const ConvolutionConfig& cfg) {
    return boxplus_rd_many({&mu1, &mu2}, cfg);
}

ConvolutionResult boxplus_rd_symmetric_route(const Measure& mu1, const Measure& mu2,
                                             const ConvolutionConfig& cfg) {
    if (mu1.support_kind != SupportKind::NonNegative ||
        mu2.support_kind != SupportKind::NonNegative)
        throw SupportError("R-diagonal convolution requires measures on [0, inf)");
    ConvolutionResult out;
    if (is_dirac_at(mu2, 0.0)) {
        out.measure = mu1;
        return out;
    }
    if (is_dirac_at(mu1, 0.0)) {
        out.measure = mu2;
        return out;
    }
    Measure s1 = sqrt_symmetrize(mu1);
    Measure s2 = sqrt_symmetrize(mu2);
    ConvolutionResult nu = boxplus(s1, s2, cfg);
    out.measure = pushforward_square(nu.measure);
    out.residuals = nu.residuals;
    out.sector_domain = {1.0, 4.0 * std::max(out.measure.support_radius(), 1.0)};
    return out;
}

// --- real part law -----------------------------------------------------------

Measure real_part_law(const Measure& mu, const ConvolutionConfig& cfg) {
    if (mu.support_kind != SupportKind::NonNegative)
        throw SupportError("real_part_law requires the law of X*X on [0, inf)");
    if (is_dirac_at(mu, 0.0)) return Measure::point_mass(0.0, SupportKind::RealLine);

    // The defining relation phi_a(z) = phiphi_mu((2z)^2) / (2z) linearizes
    // completely in the parameter q = sqrt(F_mu^{-1}(W_mu^{-1}((2z)^2))):
    //     u = z + phi_a(z) = q - F(q^2) / (2q),      G_a(u) = 1/z = 2q / F(q^2),
    // so recovery needs a single Newton solve over direct F evaluations.
    // (Check against dirac(1): F = m - 1 gives u = (q^2+1)/(2q) and
    // G_a = 2q/(q^2-1) = 1/sqrt(u^2-1), the arcsine(-1,1) transform.)
    PairMap P = [&mu](cplx q) {
        auto [g, dg] = cauchy_with_derivative(mu, q * q);
        cplx f = 1.0 / g, df = -dg / (g * g);
        cplx val = q - f / (2.0 * q);
        cplx der = 1.0 - df + f / (2.0 * q * q);
        return std::make_pair(val, der);
    };
    double R = std::sqrt(mu.support_radius());
    double high = std::max(4.0 * R, 8.0);
    // q ~ 2u at the top of the contour, so rescale the descent seed
    ContourSolver solver(P, high, cfg.inversion, /*seed_scale=*/2.0);
    auto g_eval = [&](cplx u) {
        cplx q = solver.solve(u);
        return 2.0 * q * freeprob::cauchy(mu, q * q);
    };

    RecoveryOptions opt;
    double pad = 0.02 * R + 1e-6;
    opt.grid = recovery_grid(-R - pad, R + pad, cfg.grid_points, {-R, 0.0, R});
    opt.eps_schedule = auto_eps(cfg, 2.0 * R);
    opt.atom_scan_at_zero = true;
    opt.support_kind = SupportKind::RealLine;
    return stieltjes_recover(g_eval, opt);
}

}  // namespace freeprob
