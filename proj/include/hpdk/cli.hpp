#pragma once

#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpd_core.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "mmd.hpp"
#include "spherical.hpp"
#include "transform.hpp"

namespace hpdk::cli {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    require(used == s.size() && !s.empty(), ErrorKind::InvalidArgument, "not a number: '" + s + "'");
    return v;
}

inline RVec parse_reals(const std::string& s) {
    const auto items = split(s, ',');
    RVec v(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) v(i) = parse_double(items[i]);
    return v;
}

// "1.5", "2i", "-0.5+3i", "1e-3-2j"
inline cd parse_complex(std::string s) {
    require(!s.empty(), ErrorKind::InvalidArgument, "empty complex number");
    if (s.back() != 'i' && s.back() != 'j') return parse_double(s);
    s.pop_back();
    std::size_t split_at = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;)
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split_at = k;
            break;
        }
    auto imag = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_double(t);
    };
    if (split_at == std::string::npos) return cd(0.0, imag(s));
    return cd(parse_double(s.substr(0, split_at)), imag(s.substr(split_at)));
}

inline CVec parse_complex_list(const std::string& s) {
    const auto items = split(s, ',');
    CVec v(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) v(i) = parse_complex(items[i]);
    return v;
}

// JSON array of real vectors, e.g. [[0, 1], [0.5, 2]].
inline std::vector<RVec> read_points_file(const std::string& path) {
    const json j = read_json_file(path);
    require(j.is_array() && !j.empty(), ErrorKind::EmptyGrid, path + ": expected a non-empty array of points");
    std::vector<RVec> pts;
    try {
        for (const auto& p : j) {
            const auto v = p.get<std::vector<double>>();
            pts.push_back(Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, path + ": " + e.what());
    }
    for (const auto& p : pts) require_same_dim(static_cast<int>(p.size()), static_cast<int>(pts.front().size()));
    return pts;
}

inline json vec_json(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline std::string join(const RVec& v, char sep = ',') {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + num(v(i));
    return s;
}

struct Globals {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output;
    std::string format = "csv";
    bool json() const { return format == "json"; }
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string value_doc(const Globals& g, cd v, bool complex) {
    if (g.json()) return dump(complex ? json{{"re", v.real()}, {"im", v.imag()}} : json{{"value", v.real()}});
    return complex ? "re,im\n" + num(v.real()) + "," + num(v.imag()) + "\n" : "value\n" + num(v.real()) + "\n";
}

inline std::string kernel_eval_cmd(const Globals& g, const std::string& spec_text, const std::string& xf,
                                   const std::string& yf) {
    const KernelSpec spec = parse_kernel_spec(spec_text);
    const HpdMatrix x = read_matrix_file(xf), y = read_matrix_file(yf);
    return value_doc(g, kernel_eval(spec, x, y), std::holds_alternative<RadialSpec>(spec.v));
}

inline std::string kernel_gram_cmd(const Globals& g, const std::string& spec_text, const std::string& sf, bool psd) {
    const KernelSpec spec = parse_kernel_spec(spec_text);
    const GramMatrix gm = gram(spec, read_samples_file(sf), g.threads);
    const bool complex = !gm.entries.imag().isZero(0.0);
    const int m = gm.size();
    PsdReport rep;
    if (psd) rep = psd_check(gm);
    if (g.json()) {
        json rows = json::array();
        for (int i = 0; i < m; ++i) {
            json row = json::array();
            for (int k = 0; k < m; ++k) {
                const cd v = gm.entries(i, k);
                if (complex)
                    row.push_back(json::array({v.real(), v.imag()}));
                else
                    row.push_back(v.real());
            }
            rows.push_back(std::move(row));
        }
        json doc{{"kernel", gm.kernel}, {"fingerprint", gm.fingerprint}, {"size", m}, {"entries", rows}};
        if (psd) doc["psd"] = {{"min_eig", rep.min_eig}, {"trace", rep.trace}, {"is_psd", rep.is_psd}};
        return dump(doc);
    }
    std::string s;
    if (psd)
        s += "# min_eig=" + num(rep.min_eig) + ",trace=" + num(rep.trace) +
             ",is_psd=" + (rep.is_psd ? "true" : "false") + "\n";
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            const cd v = gm.entries(i, k);
            if (k) s += ",";
            s += complex ? num(v.real()) + (v.imag() < 0 ? "" : "+") + num(v.imag()) + "i" : num(v.real());
        }
        s += "\n";
    }
    return s;
}

inline std::string kernel_bench_cmd(const Globals& g, const std::string& spec_text, const std::string& dims_text,
                                    int m, int repeats) {
    const KernelSpec spec = parse_kernel_spec(spec_text);
    std::vector<int> dims;
    for (const auto& d : split(dims_text, ',')) {
        const double v = parse_double(d);
        require(v >= 1 && v == static_cast<int>(v), ErrorKind::InvalidArgument, "bad dimension " + d);
        dims.push_back(static_cast<int>(v));
    }
    require(!dims.empty(), ErrorKind::InvalidArgument, "no dimensions given");
    const BenchResult r = bench_gram(spec, dims, m, repeats, g.seed, g.threads);
    if (g.json()) {
        json rows = json::array(), summary = json::array();
        for (const auto& row : r.rows) rows.push_back({{"N", row.n}, {"repeat", row.repeat}, {"seconds", row.seconds}});
        for (const auto& s : r.summary)
            summary.push_back({{"N", s.n}, {"mean_s", s.mean_s}, {"std_s", s.std_s}, {"threads", s.threads},
                               {"alpha", s.alpha}});
        return dump({{"kernel", spec_text}, {"m", m}, {"rows", rows}, {"summary", summary}});
    }
    std::string s = "N,mean_s,std_s,threads,alpha\n";
    for (const auto& x : r.summary)
        s += std::to_string(x.n) + "," + num(x.mean_s) + "," + num(x.std_s) + "," + std::to_string(x.threads) + "," +
             num(x.alpha) + "\n";
    return s;
}

// f(x) / Gamma_M(2 alpha) = [det x / det(id + x)^2]^alpha on real 2x2 SPD points
// x = [[a, b], [b, c]] with 0 < a + c < 2; a, c, b sampled at cell midpoints of
// (0, 2), (0, 2), (-1, 1) with `n` cells per axis.
inline std::string plot_betaprime_cmd(const Globals& g, double alpha, const std::string& grid_text) {
    require(alpha > 1.0, ErrorKind::AlphaOutOfRange, "alpha must exceed N - 1 = 1");
    int n = 24;
    for (const auto& item : split(grid_text, ',')) {
        const auto eq = item.find('=');
        require(eq != std::string::npos && item.substr(0, eq) == "n", ErrorKind::InvalidArgument,
                "plot grid accepts only n=<cells per axis>");
        n = static_cast<int>(parse_double(item.substr(eq + 1)));
    }
    require(n >= 2 && n <= 400, ErrorKind::InvalidArgument, "plot grid n must be in [2, 400]");
    std::string s = g.json() ? "" : "x11,x12,x22,value\n";
    json pts = json::array();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                // Membership is decided on the integer numerators so boundary cells are dropped exactly.
                const long ni = 2 * i + 1, nk = 2 * k + 1, nj = 2 * j + 1 - n;
                if (ni + nk >= 2L * n || ni * nk - nj * nj <= 0) continue;
                const double a = 2.0 * (i + 0.5) / n, c = 2.0 * (k + 0.5) / n, b = -1.0 + 2.0 * (j + 0.5) / n;
                const double det = a * c - b * b;
                const double det1 = (1.0 + a) * (1.0 + c) - b * b;
                const double v = std::exp(alpha * (std::log(det) - 2.0 * std::log(det1)));
                if (g.json())
                    pts.push_back({a, b, c, v});
                else
                    s += num(a) + "," + num(b) + "," + num(c) + "," + num(v) + "\n";
            }
    if (g.json()) return dump({{"alpha", alpha}, {"columns", {"x11", "x12", "x22", "value"}}, {"points", pts}});
    return s;
}

inline std::string spherical_eval_cmd(const Globals& g, const std::string& lam, const std::string& spec) {
    const CVec l = parse_complex_list(lam);
    const Spectrum rho(parse_reals(spec));
    require_same_dim(static_cast<int>(l.size()), rho.size());
    return value_doc(g, spherical_function(l, rho), true);
}

inline std::string spherical_mc_cmd(const Globals& g, const std::string& lam, const std::string& xf,
                                    std::int64_t samples) {
    const CVec l = parse_complex_list(lam);
    const HpdMatrix x = read_matrix_file(xf);
    const McEstimate e = monte_carlo_spherical(l, x, samples, g.seed);
    if (g.json())
        return dump({{"re", e.mean.real()},
                     {"im", e.mean.imag()},
                     {"se_re", e.se_re},
                     {"se_im", e.se_im},
                     {"samples", e.samples},
                     {"seed", g.seed}});
    return "re,im,se_re,se_im,samples\n" + num(e.mean.real()) + "," + num(e.mean.imag()) + "," + num(e.se_re) + "," +
           num(e.se_im) + "," + std::to_string(e.samples) + "\n";
}

inline std::string transform_cmd(const Globals& g, bool forward, const std::string& fn, const std::string& pf,
                                 const std::string& grid_text, bool refine) {
    const auto pts = read_points_file(pf);
    const QuadratureGrid grid = parse_grid(grid_text);
    const QuadOptions opt{g.threads, refine};
    const int n = static_cast<int>(pts.front().size());
    std::string s = g.json() ? "" : std::string(forward ? "t" : "rho") + ",re,im,error_estimate,truncation_warning\n";
    json rows = json::array();
    const RadialFunction f = forward ? checked_radial(parse_radial(fn), n) : RadialFunction{};
    const SpectralDensity d = forward ? SpectralDensity{} : parse_density(fn);
    for (const auto& p : pts) {
        const QuadResult q = forward ? forward_transform(f, p, grid, opt) : inverse_transform(d, Spectrum(p), grid, opt);
        if (g.json())
            rows.push_back({{forward ? "t" : "rho", vec_json(p)},
                            {"re", q.value.real()},
                            {"im", q.value.imag()},
                            {"error_estimate", q.error_estimate},
                            {"truncation_warning", q.truncation_warning}});
        else
            s += join(p, ';') + "," + num(q.value.real()) + "," + num(q.value.imag()) + "," + num(q.error_estimate) +
                 "," + (q.truncation_warning ? "true" : "false") + "\n";
    }
    if (g.json())
        return dump({{"direction", forward ? "forward" : "inverse"},
                     {"function", fn},
                     {"grid", grid_to_json(grid)},
                     {"rows", rows}});
    return s;
}

inline std::string godement_cmd(const Globals& g, const std::string& fn, const std::string& tf,
                                const std::string& grid_text, double rel_tol) {
    const auto pts = read_points_file(tf);
    const RadialFunction f = checked_radial(parse_radial(fn), static_cast<int>(pts.front().size()));
    const GodementReport r = godement_check(f, pts, parse_grid(grid_text), rel_tol, QuadOptions{g.threads, true});
    if (g.json())
        return dump({{"function", fn},
                     {"verdict", verdict_name(r.verdict)},
                     {"min", r.min_value},
                     {"max", r.max_value},
                     {"argmin", vec_json(r.argmin)},
                     {"max_error", r.max_error},
                     {"values", r.values}});
    return "verdict,min,max,argmin,max_error\n" + std::string(verdict_name(r.verdict)) + "," + num(r.min_value) + "," +
           num(r.max_value) + "," + join(r.argmin, ';') + "," + num(r.max_error) + "\n";
}

inline std::string mmd_test_cmd(const Globals& g, const std::string& spec_text, const std::string& xf,
                                const std::string& yf, const std::string& method, double level, int n_perm) {
    const KernelSpec spec = parse_kernel_spec(spec_text);
    const auto x = read_samples_file(xf), y = read_samples_file(yf);
    require(!x.empty(), ErrorKind::InvalidArgument, "empty sample set");
    spec.bind(x.front().dim());
    const TestResult r = method == "linear" ? mmd_linear(spec, x, y, level)
                                            : permutation_test(spec, x, y, n_perm, level, g.seed, g.threads);
    if (g.json())
        return dump({{"statistic", r.statistic},
                     {"threshold", r.threshold},
                     {"reject", r.reject},
                     {"level", r.level},
                     {"method", method_name(r.method)}});
    return "statistic,threshold,reject,level,method\n" + num(r.statistic) + "," + num(r.threshold) + "," +
           (r.reject ? "true" : "false") + "," + num(r.level) + "," + method_name(r.method) + "\n";
}

inline std::string mmd_experiment_cmd(const Globals& g, const std::string& cf, bool seed_given,
                                      const std::string& log_path) {
    ExperimentConfig c = experiment_from_json(read_json_file(cf));
    if (seed_given) c.seed = g.seed;
    c.threads = g.threads;
    const ExperimentResult r = two_sample_experiment(c);
    if (!log_path.empty()) {
        std::string log;
        for (const auto& t : r.trials)
            log += json{{"r", c.r[t.r_index]},
                        {"trial", t.trial},
                        {"statistic", t.result.statistic},
                        {"threshold", t.result.threshold},
                        {"reject", t.result.reject}}
                       .dump() +
                   "\n";
        write_text_file(log_path, log);
    }
    if (g.json()) {
        json rows = json::array();
        for (const auto& row : r.rows)
            rows.push_back({{"r", row.r}, {"rejections", row.rejections}, {"trials", row.trials}, {"rate", row.rate()}});
        return dump({{"config", experiment_to_json(c)}, {"rows", rows}});
    }
    std::string s = "r,rejections,trials,rate\n";
    for (const auto& row : r.rows)
        s += num(row.r) + "," + std::to_string(row.rejections) + "," + std::to_string(row.trials) + "," +
             num(row.rate()) + "\n";
    return s;
}

inline std::string sample_spd_cmd(const Globals& g, int n, int count, double lo, double hi, const std::string& field) {
    require(n >= 1 && count >= 1, ErrorKind::InvalidArgument, "need n >= 1 and count >= 1");
    const auto xs = sample_spd(n, lo, hi, count, field == "complex" ? Field::Complex : Field::Real, g.seed);
    return dump(samples_to_json(xs));
}

// Exit codes: 0 success, 1 domain error, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernels, spherical functions and two-sample tests on Hermitian positive definite matrices", "hpdk"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--output", g.output, "write the result to this path instead of stdout");
    app.add_option("--format", g.format, "output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));

    std::function<std::string()> action;

    auto* kernel = app.add_subcommand("kernel", "evaluate kernels and Gram matrices");
    kernel->require_subcommand(1);
    std::string kspec, xf, yf, sf, dims = "5,20,50", pgrid = "n=24";
    bool psd = false;
    int m = 100, repeats = 3;
    double alpha = 2.0;
    auto* keval = kernel->add_subcommand("eval", "K(x, y) for two matrix files");
    keval->add_option("--kernel", kspec, "kernel spec, e.g. betaprime:alpha=2")->required();
    keval->add_option("--x", xf, "matrix JSON file")->required();
    keval->add_option("--y", yf, "matrix JSON file")->required();
    keval->callback([&] { action = [&] { return kernel_eval_cmd(g, kspec, xf, yf); }; });
    auto* kgram = kernel->add_subcommand("gram", "Gram matrix of a sample file");
    kgram->add_option("--kernel", kspec, "kernel spec")->required();
    kgram->add_option("--samples", sf, "samples JSON file")->required();
    kgram->add_flag("--psd-check", psd, "report the smallest eigenvalue against -1e-8 trace/m");
    kgram->callback([&] { action = [&] { return kernel_gram_cmd(g, kspec, sf, psd); }; });
    auto* kbench = kernel->add_subcommand("bench", "Gram runtime against matrix dimension");
    kbench->add_option("--kernel", kspec, "kernel spec")->required();
    kbench->add_option("--dims", dims, "comma separated dimensions")->capture_default_str();
    kbench->add_option("--m", m, "samples per Gram matrix")->capture_default_str();
    kbench->add_option("--repeats", repeats, "timed repeats per dimension")->capture_default_str();
    kbench->callback([&] { action = [&] { return kernel_bench_cmd(g, kspec, dims, m, repeats); }; });
    auto* kplot = kernel->add_subcommand("plot-betaprime", "Beta-prime values on 2x2 real SPD matrices, 0 < tr x < 2");
    kplot->add_option("--alpha", alpha, "Beta-prime parameter")->capture_default_str();
    kplot->add_option("--grid", pgrid, "n=<cells per axis>")->capture_default_str();
    kplot->callback([&] { action = [&] { return plot_betaprime_cmd(g, alpha, pgrid); }; });

    auto* sph = app.add_subcommand("spherical", "spherical functions");
    sph->require_subcommand(1);
    std::string lam, spectrum;
    std::int64_t samples = 100000;
    auto* seval = sph->add_subcommand("eval", "closed-form spherical function");
    seval->add_option("--lambda", lam, "complex list, e.g. 0+1i,0-2i")->required();
    seval->add_option("--spectrum", spectrum, "comma separated positive eigenvalues")->required();
    seval->callback([&] { action = [&] { return spherical_eval_cmd(g, lam, spectrum); }; });
    auto* smc = sph->add_subcommand("mc", "Haar Monte-Carlo estimate");
    smc->add_option("--lambda", lam, "complex list")->required();
    smc->add_option("--x", xf, "matrix JSON file")->required();
    smc->add_option("--samples", samples, "number of Haar draws")->capture_default_str();
    smc->callback([&] { action = [&] { return spherical_mc_cmd(g, lam, xf, samples); }; });

    auto* tr = app.add_subcommand("transform", "spherical transforms by quadrature");
    tr->require_subcommand(1);
    std::string fn, pf, grid_text = "T=12,P=64";
    bool no_refine = false;
    for (const bool fwd : {true, false}) {
        auto* sub = tr->add_subcommand(fwd ? "forward" : "inverse",
                                       fwd ? "transform of a radial function at t points"
                                           : "inverse transform of a spectral density at spectra");
        sub->add_option("--function", fn, fwd ? "radial function, e.g. gaussian:sigma=1" : "density, e.g. heat:kappa=1,n=2")
            ->required();
        sub->add_option("--points", pf, "JSON array of points")->required();
        sub->add_option("--grid", grid_text, "T=..,P=..[,rule=gl,panels=..]")->capture_default_str();
        sub->add_flag("--no-refine", no_refine, "skip the refined pass used for the error estimate");
        sub->callback([&, fwd] { action = [&, fwd] { return transform_cmd(g, fwd, fn, pf, grid_text, !no_refine); }; });
    }

    auto* god = app.add_subcommand("godement", "positivity of the spherical transform");
    god->require_subcommand(1);
    std::string tf;
    double rel_tol = 1e-6;
    auto* gcheck = god->add_subcommand("check", "scan the transform of a radial function over a t grid");
    gcheck->add_option("--function", fn, "radial function")->required();
    gcheck->add_option("--tgrid", tf, "JSON array of t points")->required();
    gcheck->add_option("--grid", grid_text, "quadrature grid")->capture_default_str();
    gcheck->add_option("--rel-tol", rel_tol, "negativity tolerance relative to the maximum")->capture_default_str();
    gcheck->callback([&] { action = [&] { return godement_cmd(g, fn, tf, grid_text, rel_tol); }; });

    auto* mmd = app.add_subcommand("mmd", "kernel two-sample tests");
    mmd->require_subcommand(1);
    std::string method = "linear", cf, log_path;
    double level = 0.05;
    int n_perm = 200;
    auto* mtest = mmd->add_subcommand("test", "one two-sample test");
    mtest->add_option("--kernel", kspec, "kernel spec")->required();
    mtest->add_option("--x", xf, "samples JSON file")->required();
    mtest->add_option("--y", yf, "samples JSON file")->required();
    mtest->add_option("--method", method, "linear or quadratic")->capture_default_str()->check(
        CLI::IsMember({"linear", "quadratic"}));
    mtest->add_option("--level", level, "test level")->capture_default_str();
    mtest->add_option("--n-perm", n_perm, "permutations for the quadratic test")->capture_default_str();
    mtest->callback([&] { action = [&] { return mmd_test_cmd(g, kspec, xf, yf, method, level, n_perm); }; });
    auto* mexp = mmd->add_subcommand("experiment", "rejection rate against spectral scaling r");
    mexp->add_option("--config", cf, "experiment JSON config")->required();
    mexp->add_option("--log", log_path, "per-trial JSONL log");
    mexp->callback([&] {
        action = [&] { return mmd_experiment_cmd(g, cf, app.get_option("--seed")->count() > 0, log_path); };
    });

    auto* smp = app.add_subcommand("sample", "random matrices");
    smp->require_subcommand(1);
    int dim = 3, count = 50;
    double lo = 1.0, hi = 2.0;
    std::string field = "real";
    auto* sspd = smp->add_subcommand("spd", "Q diag(v) Q^H with Haar Q and v uniform on [low, high]; JSON output");
    sspd->add_option("--n", dim, "matrix dimension")->capture_default_str();
    sspd->add_option("--count", count, "number of matrices")->capture_default_str();
    sspd->add_option("--low", lo, "lower eigenvalue bound")->capture_default_str();
    sspd->add_option("--high", hi, "upper eigenvalue bound")->capture_default_str();
    sspd->add_option("--field", field, "real or complex")->capture_default_str()->check(
        CLI::IsMember({"real", "complex"}));
    sspd->callback([&] { action = [&] { return sample_spd_cmd(g, dim, count, lo, hi, field); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    try {
        const std::string doc = action();
        if (g.output.empty())
            out << doc;
        else
            write_text_file(g.output, doc);
    } catch (const Error& e) {
        err << "error [" << kind_name(e.kind()) << "]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace hpdk::cli
