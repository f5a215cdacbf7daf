#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freeprob/cumulants.hpp"
#include "freeprob/io.hpp"

using namespace freeprob;

namespace {

// exit-code contract: 0 ok, 1 usage / malformed input, 2 numerical quality
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kQuality = 2;

std::string resolve_out(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("FREEPROB_OUT_DIR");
    if (!dir || !*dir) return path;
    return std::string(dir) + "/" + path;
}

void write_report(const std::string& path, const json& j) {
    std::string out = resolve_out(path);
    write_json_file(out, j);
    // timestamps live next to the report so the report itself stays
    // byte-identical across reruns
    write_json_file(out + ".meta", json{{"written_at", static_cast<long>(std::time(nullptr))}});
}

void write_csv_file(const std::string& path, const std::string& body) {
    std::string out = resolve_out(path);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ParameterError("cannot open output file: " + out);
    f << body;
}

void write_gnuplot(const std::string& path, const std::string& csv, const std::string& title) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set title '" << title << "'\n"
       << "plot '" << csv << "' using 1:3 with lines title 'pdf'\n";
    write_csv_file(path, gp.str());
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParameterError("cannot parse number: " + item);
        }
    }
    if (out.empty()) throw ParameterError("empty list: " + s);
    return out;
}

json config_json(const ConvolutionConfig& cfg, double quality_tol) {
    return json{{"route_tol", cfg.route_tol},
                {"grid_points", cfg.grid_points},
                {"newton_tol", cfg.inversion.newton_tol},
                {"quality_tol", quality_tol}};
}

json domain_json(const SectorComplementDomain& d) {
    return json{{"alpha", d.alpha}, {"beta", d.beta}};
}

json domain_json(const UpperConeDomain& d) {
    return json{{"alpha", d.alpha}, {"beta", d.beta}};
}

int check_quality(const std::map<std::string, double>& residuals, double tol,
                  const std::string& stage) {
    for (const auto& [name, value] : residuals) {
        if (value > tol) {
            std::cerr << "quality failure in " << stage << ": residual " << name << " = "
                      << value << " exceeds " << tol << "\n";
            return kQuality;
        }
    }
    return kOk;
}

struct CommonOpts {
    std::string out;
    std::string csv;
    std::string plot;
    double quality_tol = 1e-2;
    int grid = 0;  // 0 = library default
};

void add_common(CLI::App* cmd, CommonOpts* o, bool need_out) {
    CLI::Option* out = cmd->add_option("--out", o->out, "JSON report path");
    if (need_out) out->required();
    cmd->add_option("--csv", o->csv, "CSV data path");
    cmd->add_option("--plot", o->plot, "gnuplot script path (needs --csv)");
    cmd->add_option("--tol", o->quality_tol, "residual tolerance for the quality gate");
    cmd->add_option("--grid", o->grid, "recovery grid resolution override");
}

ConvolutionConfig make_cfg(const CommonOpts& o) {
    ConvolutionConfig cfg;
    if (o.grid > 0) cfg.grid_points = o.grid;
    return cfg;
}

json measure_summary(const Measure& mu) {
    json j;
    j["support"] = mu.support_kind == SupportKind::NonNegative ? "nonnegative" : "real";
    j["support_min"] = mu.support_min();
    j["support_max"] = mu.support_max();
    j["atom_mass"] = mu.atom_mass();
    j["density_mass"] = mu.density_mass();
    json moments = json::array();
    for (unsigned k = 1; k <= 4; ++k) moments.push_back(moment(mu, k));
    j["moments"] = moments;
    return j;
}

int run_measure_info(const std::string& mu_path, const CommonOpts& o) {
    Measure mu = load_measure(mu_path);
    json rep;
    rep["input"] = mu_path;
    rep["summary"] = measure_summary(mu);
    rep["measure"] = measure_to_json(mu);
    if (!o.out.empty()) write_report(o.out, rep);
    if (!o.csv.empty()) {
        std::ostringstream body;
        write_measure_csv(body, mu);
        write_csv_file(o.csv, body.str());
        if (!o.plot.empty()) write_gnuplot(o.plot, o.csv, "measure");
    }
    if (o.out.empty() && o.csv.empty()) std::cout << rep.dump(2) << "\n";
    return kOk;
}

int run_transform_eval(const std::string& mu_path, const std::string& transform,
                       const std::string& ray, const std::string& radii, const CommonOpts& o) {
    Measure mu = load_measure(mu_path);
    std::vector<double> dir = parse_list(ray);
    if (dir.size() > 2) throw ParameterError("--ray takes 're' or 're,im'");
    cplx direction(dir[0], dir.size() > 1 ? dir[1] : 0.0);
    if (direction == cplx(0.0)) throw ParameterError("--ray direction must be nonzero");
    direction /= std::abs(direction);

    TransformEngine eng(mu);
    std::vector<std::pair<cplx, cplx>> rows;
    for (double r : parse_list(radii)) {
        if (r <= 0.0) throw ParameterError("radii must be positive");
        cplx z = r * direction;
        cplx f;
        if (transform == "cauchy") f = eng.cauchy(z);
        else if (transform == "f") f = eng.reciprocal_cauchy(z);
        else if (transform == "phi") f = eng.phi(z);
        else if (transform == "v") f = eng.v(z);
        else if (transform == "w") f = eng.w(z);
        else if (transform == "phiphi") f = eng.phiphi(z);
        else if (transform == "estimate-ratio") f = estimate_ratio(mu, z);
        else throw ParameterError("unknown transform: " + transform);
        rows.push_back({z, f});
    }
    std::ostringstream body;
    write_transform_csv(body, rows);
    if (!o.csv.empty())
        write_csv_file(o.csv, body.str());
    else
        std::cout << body.str();
    if (!o.out.empty()) {
        CalibrationReport cal = calibrate_domain(mu);
        json rep;
        rep["transform"] = transform;
        rep["domain"] = domain_json(cal.sector);
        rep["config"] = config_json(ConvolutionConfig{}, o.quality_tol);
        json vals = json::array();
        for (const auto& [z, f] : rows)
            vals.push_back({{"re_z", z.real()}, {"im_z", z.imag()},
                            {"re_f", f.real()}, {"im_f", f.imag()}});
        rep["values"] = vals;
        write_report(o.out, rep);
    }
    return kOk;
}

int run_convolution(const std::string& mu1_path, const std::string& mu2_path, bool rd,
                    const CommonOpts& o) {
    Measure mu1 = load_measure(mu1_path);
    Measure mu2 = load_measure(mu2_path);
    ConvolutionConfig cfg = make_cfg(o);
    ConvolutionResult res = rd ? boxplus_rd(mu1, mu2, cfg) : boxplus(mu1, mu2, cfg);

    const std::string op = rd ? "boxplus-rd" : "boxplus";
    json rep;
    rep["operation"] = op;
    rep["residuals"] = res.residuals;
    rep["domain"] = rd ? domain_json(res.sector_domain) : domain_json(res.cone_domain);
    rep["config"] = config_json(cfg, o.quality_tol);
    rep["summary"] = measure_summary(res.measure);
    rep["measure"] = measure_to_json(res.measure);
    if (!o.out.empty()) write_report(o.out, rep);
    if (!o.csv.empty()) {
        std::ostringstream body;
        write_measure_csv(body, res.measure);
        write_csv_file(o.csv, body.str());
        if (!o.plot.empty()) write_gnuplot(o.plot, o.csv, op);
    }
    return check_quality(res.residuals, o.quality_tol, op);
}

int run_rd_verify(const std::string& mu1_path, const std::string& mu2_path, int size, int trials,
                  std::uint64_t seed, double ks_tol, const CommonOpts& o) {
    Measure mu1 = load_measure(mu1_path);
    Measure mu2 = load_measure(mu2_path);
    ConvolutionConfig cfg = make_cfg(o);
    EnsembleReport res = verify_boxplus_rd(mu1, mu2, size, trials, seed, cfg);

    json rep = ensemble_report_to_json(res);
    rep["size"] = size;
    rep["seed"] = seed;
    rep["ks_tol"] = ks_tol;
    rep["config"] = config_json(cfg, o.quality_tol);
    if (!o.out.empty()) write_report(o.out, rep);
    if (res.ks > ks_tol) {
        std::cerr << "quality failure in rd-verify: KS = " << res.ks << " exceeds " << ks_tol
                  << "\n";
        return kQuality;
    }
    return kOk;
}

int run_three_series(const std::string& spec_path, int horizon, const CommonOpts& o) {
    SeriesSpec spec = series_spec_from_json(load_json(spec_path), horizon);
    ConvolutionConfig cfg = make_cfg(o);
    ConvergenceReport rep = verdict(spec, cfg);
    json j = convergence_report_to_json(rep);
    j["config"] = config_json(cfg, o.quality_tol);
    if (!o.out.empty())
        write_report(o.out, j);
    else
        std::cout << j.dump(2) << "\n";
    return kOk;
}

int run_cumulants(const std::string& mu_path, int order, const CommonOpts& o) {
    if (order < 1 || order > 8) throw ParameterError("--order must be in 1..8");
    Measure mu = load_measure(mu_path);
    AlphaSeries alpha = alpha_from_phiphi(mu, order);
    json rep;
    rep["alpha"] = alpha.coefficients;
    json moments = json::array();
    for (int k = 1; k <= order; ++k) moments.push_back(moments_from_alpha(alpha, k));
    rep["moments_star_square"] = moments;
    rep["real_part_cumulants"] = real_part_cumulants(alpha);
    if (!o.out.empty())
        write_report(o.out, rep);
    else
        std::cout << rep.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical free-probability toolkit"};
    app.require_subcommand(1);

    std::string mu_path, mu2_path, spec_path;
    std::string transform = "phiphi", ray = "0,1", radii = "10,100";
    int size = 256, trials = 10, horizon = 200, order = 6;
    std::uint64_t seed = 1;
    double ks_tol = 0.05;
    CommonOpts o_info, o_eval, o_bp, o_rd, o_verify, o_series, o_cum;

    CLI::App* info = app.add_subcommand("measure-info", "summarize a measure");
    info->add_option("--mu", mu_path, "measure JSON")->required();
    add_common(info, &o_info, false);

    CLI::App* eval = app.add_subcommand("transform-eval", "evaluate a transform along a ray");
    eval->add_option("--mu", mu_path, "measure JSON")->required();
    eval->add_option("--transform", transform, "cauchy|f|phi|v|w|phiphi|estimate-ratio");
    eval->add_option("--ray", ray, "ray direction 're' or 're,im'");
    eval->add_option("--radii", radii, "comma-separated |z| values");
    add_common(eval, &o_eval, false);

    CLI::App* bp = app.add_subcommand("boxplus", "free additive convolution");
    bp->add_option("--mu1", mu_path, "first measure JSON")->required();
    bp->add_option("--mu2", mu2_path, "second measure JSON")->required();
    add_common(bp, &o_bp, false);

    CLI::App* bprd = app.add_subcommand("boxplus-rd", "R-diagonal convolution on [0, inf)");
    bprd->add_option("--mu1", mu_path, "first measure JSON")->required();
    bprd->add_option("--mu2", mu2_path, "second measure JSON")->required();
    add_common(bprd, &o_rd, false);

    CLI::App* verify = app.add_subcommand("rd-verify", "Monte Carlo check of boxplus-rd");
    verify->add_option("--mu1", mu_path, "first measure JSON")->required();
    verify->add_option("--mu2", mu2_path, "second measure JSON")->required();
    verify->add_option("--size", size, "matrix size");
    verify->add_option("--trials", trials, "trial count");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--ks-tol", ks_tol, "KS quality threshold");
    add_common(verify, &o_verify, true);

    CLI::App* series = app.add_subcommand("three-series", "two-series convergence verdict");
    series->add_option("--spec", spec_path, "series spec JSON")->required();
    series->add_option("--horizon", horizon, "default horizon for generated families");
    add_common(series, &o_series, false);

    CLI::App* cum = app.add_subcommand("cumulants", "determining series and moment table");
    cum->add_option("--mu", mu_path, "measure JSON")->required();
    cum->add_option("--order", order, "series order (1..8)");
    add_common(cum, &o_cum, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (info->parsed()) return run_measure_info(mu_path, o_info);
        if (eval->parsed()) return run_transform_eval(mu_path, transform, ray, radii, o_eval);
        if (bp->parsed()) return run_convolution(mu_path, mu2_path, false, o_bp);
        if (bprd->parsed()) return run_convolution(mu_path, mu2_path, true, o_rd);
        if (verify->parsed())
            return run_rd_verify(mu_path, mu2_path, size, trials, seed, ks_tol, o_verify);
        if (series->parsed()) return run_three_series(spec_path, horizon, o_series);
        if (cum->parsed()) return run_cumulants(mu_path, order, o_cum);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const SupportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kQuality;
    }
    return kUsage;
}
