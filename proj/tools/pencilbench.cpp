// SPDX-License-Identifier: MIT
// pencilbench: instance generation, decomposition, conditioning and the
// instability experiments from the command line.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "pencilbench/pencilbench.hpp"

namespace pb = pencilbench;
using nlohmann::json;

namespace {

/// Bad flag values detected after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

pb::Dims parse_dims(const std::string& s) {
    static const std::regex re(R"((\d+)x(\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw UsageError("--dims must look like N1xN2xN3, got '" + s + "'");
    pb::Dims d{std::stol(m[1]), std::stol(m[2]), std::stol(m[3])};
    for (auto v : d)
        if (v < 1) throw UsageError("--dims entries must be positive");
    return d;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PENCILBENCH_SEED")) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(env, &pos);
            if (pos == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError("PENCILBENCH_SEED is not an unsigned integer");
    }
    return 0;
}

std::string base_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

void ensure_parent(const std::string& prefix) {
    const auto parent = std::filesystem::path(prefix).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

class Manifest {
public:
    Manifest(std::string command, json config, std::uint64_t seed)
        : command_(std::move(command)), config_(std::move(config)), seed_(seed),
          start_(std::chrono::steady_clock::now()) {}

    void output(const std::string& path) { outputs_.push_back(base_name(path)); }

    void write(const std::string& prefix) const {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const json j{{"command", command_},    {"config", config_},          {"seed", seed_},
                     {"version", pb::kVersion}, {"wall_time_seconds", wall}, {"outputs", outputs_}};
        pb::write_file(prefix + ".manifest.json", j.dump(2) + "\n");
    }

private:
    std::string command_;
    json config_;
    std::uint64_t seed_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) {
        if (!s.empty()) s += ',';
        s += c;
    }
    return s + "\n";
}

std::string fmt(double x) { return pb::format_double(x); }
std::string fmt(pb::Index x) { return std::to_string(x); }
std::string fmt_bool(bool b) { return b ? "1" : "0"; }

// ---- gen ------------------------------------------------------------------

struct GenOpts {
    std::string dims, model = "gaussian", out;
    pb::Index rank = 0;
    std::optional<std::uint64_t> seed;
};

int run_gen(const GenOpts& o) {
    const pb::Dims d = parse_dims(o.dims);
    const std::uint64_t seed = resolve_seed(o.seed);
    json cfg{{"dims", o.dims}, {"rank", o.rank}, {"model", o.model}};
    pb::Cpd cpd;
    if (o.model == "gaussian" || o.model == "orthoab") {
        if (o.rank < 1) throw UsageError("--rank must be >= 1");
        pb::Rng rng(seed);
        cpd = pb::sample_cpd(d, o.rank, o.model == "gaussian" ? pb::Sampling::GaussianAll
                                                              : pb::Sampling::OrthonormalAB_GaussianC,
                             rng);
    } else if (o.model == "odeco-bad") {
        const auto spec = pb::OdecoSpec::with_random_q(d, o.rank, seed);
        cpd = pb::make_bad_odeco(spec);
        json q = json::array();
        for (pb::Index j = 0; j < 2; ++j) q.push_back(std::vector<double>(spec.Q.col(j).begin(), spec.Q.col(j).end()));
        cfg["projection_q"] = q;
    } else {
        throw UsageError("--model must be gaussian, orthoab or odeco-bad");
    }
    ensure_parent(o.out);
    Manifest man("gen", cfg, seed);
    pb::write_cpd_json(o.out + ".cpd.json", cpd);
    pb::write_file(o.out + ".tns3", pb::to_tns3(pb::reconstruct(cpd)));
    man.output(o.out + ".cpd.json");
    man.output(o.out + ".tns3");
    man.write(o.out);
    return 0;
}

// ---- decompose ------------------------------------------------------------

struct DecomposeOpts {
    std::string tensor, projection = "hosvd", reference, out;
    pb::Index rank = 0;
    int retries = 5;
    double pencil_tol = 1e-10;
    bool refine = false;
    std::optional<std::uint64_t> seed;
};

int run_decompose(const DecomposeOpts& o) {
    const std::uint64_t seed = resolve_seed(o.seed);
    pb::PbaConfig cfg;
    cfg.rank = o.rank;
    cfg.max_projection_retries = o.retries;
    cfg.pencil_tol = o.pencil_tol;
    cfg.seed = seed;
    if (o.projection == "hosvd")
        cfg.projection_strategy = pb::ProjectionStrategy::HosvdLeadingTwo;
    else if (o.projection == "random")
        cfg.projection_strategy = pb::ProjectionStrategy::RandomOrthonormal;
    else
        throw UsageError("--projection must be hosvd or random");

    const pb::Tensor3 t = pb::read_tns3(o.tensor);
    std::optional<pb::Cpd> ref;
    if (!o.reference.empty()) ref = pb::read_cpd_json(o.reference);

    Manifest man("decompose",
                 {{"tensor", o.tensor},
                  {"rank", o.rank},
                  {"projection", o.projection},
                  {"retries", o.retries},
                  {"pencil_tol", o.pencil_tol},
                  {"refine", o.refine},
                  {"reference", o.reference}},
                 seed);
    const pb::PbaReport rep = pb::pba_decompose(t, cfg);
    pb::Cpd result = rep.cpd;
    double refined_residual = std::nan("");
    if (o.refine) {
        const auto als = pb::als_refine(t, rep.cpd);
        result = als.cpd;
        refined_residual = als.final_residual / t.norm();
    }
    double fe = std::nan(""), fe_refined = std::nan("");
    if (ref) {
        fe = pb::forward_error(*ref, rep.cpd).forward_error;
        if (o.refine) fe_refined = pb::forward_error(*ref, result).forward_error;
    }

    ensure_parent(o.out);
    pb::write_cpd_json(o.out + ".cpd.json", result);
    std::string csv = "rank,retries_used,backward_residual,pencil_separation,refined_residual,forward_error,"
                      "refined_forward_error\n";
    csv += csv_row({fmt(o.rank), std::to_string(rep.retries_used), fmt(rep.backward_residual),
                    fmt(rep.pencil_separation), fmt(refined_residual), fmt(fe), fmt(fe_refined)});
    pb::write_file(o.out + ".csv", csv);
    man.output(o.out + ".cpd.json");
    man.output(o.out + ".csv");
    man.write(o.out);
    return 0;
}

// ---- condition ------------------------------------------------------------

struct ConditionOpts {
    std::string cpd, out;
};

int run_condition(const ConditionOpts& o) {
    const pb::Cpd cpd = pb::read_cpd_json(o.cpd);
    Manifest man("condition", {{"cpd", o.cpd}}, 0);
    const pb::ConditionReport c = pb::condition_number(cpd);
    std::string csv = "kappa,sigma_min,sigma_max,pair_lower_bound,kruskal_a,kruskal_b,kruskal_c,"
                      "kruskal_identifiable,sglp_ok,entry_nonzero_ok,kappa_finite\n";
    csv += csv_row({fmt(c.kappa), fmt(c.sigma_min), fmt(c.sigma_max), fmt(c.pair_lower_bound),
                    fmt(c.kruskal_ranks[0]), fmt(c.kruskal_ranks[1]), fmt(c.kruskal_ranks[2]),
                    fmt_bool(c.kruskal_identifiable), fmt_bool(c.sglp_ok), fmt_bool(c.entry_nonzero_ok),
                    fmt_bool(std::isfinite(c.kappa))});
    std::cout << csv;
    if (!o.out.empty()) {
        ensure_parent(o.out);
        pb::write_file(o.out + ".csv", csv);
        man.output(o.out + ".csv");
        man.write(o.out);
    }
    return 0;
}

// ---- ccdf -----------------------------------------------------------------

struct CcdfOpts {
    std::string dims, model = "gaussian", quantity = "kappa", solver = "pba-hosvd", out;
    pb::Index rank = 0, trials = 10000;
    std::vector<double> alphas{1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
};

std::string ccdf_csv(const pb::CcdfSeries& s, const std::function<double(double)>& bound) {
    std::string csv = bound ? "x,empirical_ccdf,bound_ccdf\n" : "x,empirical_ccdf\n";
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        const double x = s.samples[i];
        if (!std::isfinite(x)) break;
        if (i + 1 < s.samples.size() && s.samples[i + 1] == x) continue;
        csv += bound ? csv_row({fmt(x), fmt(s.ccdf(x)), fmt(bound(x))}) : csv_row({fmt(x), fmt(s.ccdf(x))});
    }
    return csv;
}

int run_ccdf(const CcdfOpts& o) {
    const std::uint64_t seed = resolve_seed(o.seed);
    pb::McConfig cfg;
    cfg.dims = parse_dims(o.dims);
    cfg.rank = o.rank;
    cfg.trials = o.trials;
    cfg.master_seed = seed;
    cfg.alpha_grid = o.alphas;
    cfg.threads = o.threads;
    if (o.model == "gaussian")
        cfg.sampling = pb::Sampling::GaussianAll;
    else if (o.model == "orthoab")
        cfg.sampling = pb::Sampling::OrthonormalAB_GaussianC;
    else
        throw UsageError("--model must be gaussian or orthoab");
    if (o.trials < 1) throw UsageError("--trials must be >= 1");
    if (o.rank < 1 || o.rank > cfg.dims[1]) throw UsageError("--rank must satisfy 1 <= r <= n2");
    for (double a : o.alphas)
        if (!(a > 0.0)) throw UsageError("--alphas must be positive");

    Manifest man("ccdf",
                 {{"dims", o.dims},
                  {"rank", o.rank},
                  {"trials", o.trials},
                  {"model", o.model},
                  {"quantity", o.quantity},
                  {"solver", o.solver},
                  {"alphas", o.alphas},
                  {"threads", o.threads}},
                 seed);
    ensure_parent(o.out);
    const std::string name = base_name(o.out);
    std::string gp = "# gnuplot script; run from this directory\nset datafile separator ','\n"
                     "set key autotitle columnhead\nset logscale xy\nset terminal pngcairo size 800,600\n"
                     "set output '" + name + ".png'\nset ylabel 'P[X > x]'\n";

    if (o.quantity == "kappa") {
        const pb::KappaCcdf res = pb::run_kappa_ccdf(cfg);
        const auto m3 = static_cast<int>(cfg.dims[2]);
        const double scale = pb::bound_abscissa(1.0, cfg.rank, cfg.dims[2]);
        pb::write_file(o.out + ".csv",
                       ccdf_csv(res.series, [&](double x) { return pb::limiting_ccdf(m3, x / scale); }));
        std::string raw = "trial,kappa\n";
        for (std::size_t i = 0; i < res.kappa.size(); ++i) raw += csv_row({std::to_string(i), fmt(res.kappa[i])});
        pb::write_file(o.out + ".raw.csv", raw);
        std::string bound = "alpha,x,bound_ccdf,empirical_ccdf\n";
        for (const auto& b : res.bound) bound += csv_row({fmt(b.alpha), fmt(b.x), fmt(b.bound), fmt(b.empirical)});
        pb::write_file(o.out + ".bound.csv", bound);
        gp += "set xlabel 'condition number'\nplot '" + name + ".csv' using 1:2 with steps title 'empirical', \\\n"
              "     '' using 1:3 with lines dashtype 2 title 'limiting bound'\n";
        for (const auto& b : res.bound)
            std::cout << "alpha=" << fmt(b.alpha) << " x=" << fmt(b.x) << " empirical=" << fmt(b.empirical)
                      << " bound=" << fmt(b.bound) << "\n";
        man.output(o.out + ".raw.csv");
        man.output(o.out + ".bound.csv");
    } else if (o.quantity == "forward-error") {
        pb::FeSolver solver{};
        if (o.solver == "pba-random")
            solver = pb::FeSolver::PbaRandom;
        else if (o.solver == "pba-hosvd")
            solver = pb::FeSolver::PbaHosvd;
        else if (o.solver == "pba-als")
            solver = pb::FeSolver::PbaPlusAls;
        else
            throw UsageError("--solver must be pba-random, pba-hosvd or pba-als");
        const pb::ForwardErrorCcdf res = pb::run_forward_error_ccdf(cfg, solver);
        pb::write_file(o.out + ".csv", ccdf_csv(res.forward_error, {}));
        pb::write_file(o.out + ".omega.csv", ccdf_csv(res.omega, {}));
        std::string raw = "trial,ok,kappa,forward_error,omega\n";
        for (std::size_t i = 0; i < res.trials.size(); ++i) {
            const auto& tr = res.trials[i];
            raw += csv_row({std::to_string(i), fmt_bool(tr.ok), fmt(tr.kappa), fmt(tr.forward_error), fmt(tr.omega)});
        }
        pb::write_file(o.out + ".raw.csv", raw);
        gp += "set xlabel 'forward error / excess factor'\nplot '" + name +
              ".csv' using 1:2 with steps title 'forward error', \\\n     '" + name +
              ".omega.csv' using 1:2 with steps title 'excess factor'\n";
        std::cout << "censored=" << res.forward_error.censored << " of " << o.trials << "\n";
        man.output(o.out + ".omega.csv");
        man.output(o.out + ".raw.csv");
    } else {
        throw UsageError("--quantity must be kappa or forward-error");
    }
    pb::write_file(o.out + ".gp", gp);
    man.output(o.out + ".csv");
    man.output(o.out + ".gp");
    man.write(o.out);
    return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepOpts {
    std::string dims, out;
    pb::Index rank = 0;
    int kmin = 1, kmax = 50;
    double fit_min = 1e-12, fit_max = 1e-4;
    bool no_refine = false;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
};

int run_sweep(const SweepOpts& o) {
    const std::uint64_t seed = resolve_seed(o.seed);
    const pb::Dims d = parse_dims(o.dims);
    if (o.kmin < 1 || o.kmax < o.kmin) throw UsageError("need 1 <= --kmin <= --kmax");
    const auto spec = pb::OdecoSpec::with_random_q(d, o.rank, seed);
    Manifest man("sweep",
                 {{"dims", o.dims},
                  {"rank", o.rank},
                  {"kmin", o.kmin},
                  {"kmax", o.kmax},
                  {"refine", !o.no_refine},
                  {"fit_range", {o.fit_min, o.fit_max}},
                  {"threads", o.threads}},
                 seed);
    pb::SweepOptions so;
    so.refine = !o.no_refine;
    so.threads = o.threads;
    const auto rows = pb::adversarial_sweep(spec, o.kmin, o.kmax, so);

    std::string csv = "k,epsilon,pba_forward_error,refined_forward_error,omega\n";
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        csv += csv_row({std::to_string(r.k), fmt(r.epsilon_k), fmt(r.pba_forward_error), fmt(r.refined_forward_error),
                        fmt(r.omega)});
        if (r.epsilon_k >= o.fit_min && r.epsilon_k <= o.fit_max && r.pba_forward_error > 0.0)
            pts.emplace_back(r.epsilon_k, r.pba_forward_error);
    }
    ensure_parent(o.out);
    pb::write_file(o.out + ".csv", csv);
    const std::string name = base_name(o.out);
    std::string gp = "# gnuplot script; run from this directory\nset datafile separator ','\n"
                     "set key autotitle columnhead\nset logscale xy\nset terminal pngcairo size 800,600\n"
                     "set output '" + name + ".png'\nset xlabel 'epsilon'\nset ylabel 'forward error'\n";
    if (pts.size() >= 2) {
        const auto fit = pb::fit_powerlaw(pts);
        std::cout << "fitted power law: forward_error = " << fmt(fit.coefficient) << " * epsilon^" << fmt(fit.exponent)
                  << " (" << pts.size() << " points)\n";
        gp += "f(x) = " + fmt(fit.coefficient) + " * x**(" + fmt(fit.exponent) + ")\n";
    } else {
        std::cout << "fitted power law: not enough points in the fit range\n";
        gp += "f(x) = NaN\n";
    }
    gp += "plot '" + name + ".csv' using 2:3 with points pt 7 title 'PBA', \\\n"
          "     '' using 2:4 with points pt 5 title 'PBA + ALS', \\\n"
          "     f(x) with lines dashtype 2 title 'fit'\n";
    pb::write_file(o.out + ".gp", gp);
    man.output(o.out + ".csv");
    man.output(o.out + ".gp");
    man.write(o.out);
    return 0;
}

// ---- properties -----------------------------------------------------------

struct PropertiesOpts {
    std::string out;
    pb::Index trials = 1000, kruskal_trials = 100;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
};

int run_properties(const PropertiesOpts& o) {
    const std::uint64_t seed = resolve_seed(o.seed);
    if (o.trials < 1 || o.kruskal_trials < 1) throw UsageError("trial counts must be >= 1");
    Manifest man("properties", {{"trials", o.trials}, {"kruskal_trials", o.kruskal_trials}, {"threads", o.threads}},
                 seed);
    pb::NodecreaseParams np;
    np.trials = o.trials;
    np.seed = pb::mix_seed(seed, 1);
    np.threads = o.threads;
    pb::PairBoundParams pp;
    pp.trials = o.trials;
    pp.seed = pb::mix_seed(seed, 2);
    pp.threads = o.threads;
    pb::KruskalParams kp;
    kp.trials = o.kruskal_trials;
    kp.seed = pb::mix_seed(seed, 3);
    kp.threads = o.threads;
    const std::vector<pb::CheckReport> checks{pb::check_nodecrease(np), pb::check_pair_bound(pp),
                                              pb::check_kruskal_implies_identifiable_numerically(kp)};
    const std::string text = pb::checks_to_json(checks).dump(2) + "\n";
    std::cout << text;
    if (!o.out.empty()) {
        ensure_parent(o.out);
        pb::write_file(o.out + ".json", text);
        man.output(o.out + ".json");
        man.write(o.out);
    }
    bool ok = true;
    for (const auto& c : checks) ok = ok && c.failures == 0;
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pencilbench: pencil-based tensor decomposition and its instability"};
    app.set_version_flag("--version", std::string(pb::kVersion));
    app.require_subcommand(1);

    GenOpts gen;
    auto* g = app.add_subcommand("gen", "generate a random or adversarial CPD and its tensor");
    g->add_option("--dims", gen.dims, "N1xN2xN3")->required();
    g->add_option("--rank", gen.rank, "number of rank-1 terms")->required();
    g->add_option("--model", gen.model, "gaussian | orthoab | odeco-bad")->capture_default_str();
    g->add_option("--seed", gen.seed, "seed (fallback: PENCILBENCH_SEED, then 0)");
    g->add_option("--out", gen.out, "output prefix")->required();

    DecomposeOpts dec;
    auto* dc = app.add_subcommand("decompose", "run the pencil-based algorithm on a .tns3 tensor");
    dc->add_option("--tensor", dec.tensor, "input .tns3")->required()->check(CLI::ExistingFile);
    dc->add_option("--rank", dec.rank, "target rank")->required();
    dc->add_option("--projection", dec.projection, "hosvd | random")->capture_default_str();
    dc->add_option("--retries", dec.retries, "projection retries")->capture_default_str()->check(CLI::NonNegativeNumber);
    dc->add_option("--pencil-tol", dec.pencil_tol, "pencil tolerance")->capture_default_str();
    dc->add_flag("--refine", dec.refine, "refine with alternating least squares");
    dc->add_option("--reference", dec.reference, "reference .cpd.json for the forward error")
        ->check(CLI::ExistingFile);
    dc->add_option("--seed", dec.seed, "seed (fallback: PENCILBENCH_SEED, then 0)");
    dc->add_option("--out", dec.out, "output prefix")->required();

    ConditionOpts con;
    auto* cn = app.add_subcommand("condition", "condition number and diagnostics of a CPD");
    cn->add_option("--cpd", con.cpd, "input .cpd.json")->required()->check(CLI::ExistingFile);
    cn->add_option("--out", con.out, "optional output prefix for a CSV copy");

    CcdfOpts cc;
    auto* cf = app.add_subcommand("ccdf", "Monte Carlo ccdf of the condition number or forward error");
    cf->add_option("--dims", cc.dims, "N1xN2xN3")->required();
    cf->add_option("--rank", cc.rank, "rank")->required();
    cf->add_option("--trials", cc.trials, "number of trials")->capture_default_str();
    cf->add_option("--model", cc.model, "gaussian | orthoab")->capture_default_str();
    cf->add_option("--quantity", cc.quantity, "kappa | forward-error")->capture_default_str();
    cf->add_option("--solver", cc.solver, "pba-random | pba-hosvd | pba-als")->capture_default_str();
    cf->add_option("--alphas", cc.alphas, "alpha grid for the limiting bound")->delimiter(',');
    cf->add_option("--threads", cc.threads, "worker threads (0: all cores)");
    cf->add_option("--seed", cc.seed, "seed (fallback: PENCILBENCH_SEED, then 0)");
    cf->add_option("--out", cc.out, "output prefix")->required();

    SweepOpts sw;
    auto* sp = app.add_subcommand("sweep", "adversarial perturbation sweep around a bad odeco tensor");
    sp->add_option("--dims", sw.dims, "N1xN2xN3")->required();
    sp->add_option("--rank", sw.rank, "rank")->required();
    sp->add_option("--kmin", sw.kmin, "first k")->capture_default_str();
    sp->add_option("--kmax", sw.kmax, "last k")->capture_default_str();
    sp->add_option("--fit-min", sw.fit_min, "smallest epsilon in the fit")->capture_default_str();
    sp->add_option("--fit-max", sw.fit_max, "largest epsilon in the fit")->capture_default_str();
    sp->add_flag("--no-refine", sw.no_refine, "skip the ALS refinement column");
    sp->add_option("--threads", sw.threads, "worker threads (0: all cores)");
    sp->add_option("--seed", sw.seed, "seed (fallback: PENCILBENCH_SEED, then 0)");
    sp->add_option("--out", sw.out, "output prefix")->required();

    PropertiesOpts pr;
    auto* pp = app.add_subcommand("properties", "run the executable property checks");
    pp->add_option("--trials", pr.trials, "trials for the inequality checks")->capture_default_str();
    pp->add_option("--kruskal-trials", pr.kruskal_trials, "trials for the uniqueness check")->capture_default_str();
    pp->add_option("--threads", pr.threads, "worker threads (0: all cores)");
    pp->add_option("--seed", pr.seed, "seed (fallback: PENCILBENCH_SEED, then 0)");
    pp->add_option("--out", pr.out, "optional output prefix for the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*g) return run_gen(gen);
        if (*dc) return run_decompose(dec);
        if (*cn) return run_condition(con);
        if (*cf) return run_ccdf(cc);
        if (*sp) return run_sweep(sw);
        if (*pp) return run_properties(pr);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const pb::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const pb::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const pb::RankTooLarge& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const pb::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
