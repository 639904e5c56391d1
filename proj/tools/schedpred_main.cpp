// schedpred: exact simulation and Monte Carlo estimation for preemptive
// single-machine scheduling with a limited number of job-size predictions.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "schedpred/analysis.hpp"
#include "schedpred/harness.hpp"

namespace {

using namespace schedpred;

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

int cmd_simulate(const std::string& sizes_text, const std::string& known_text,
                 const std::string& pred_text, const std::string& alg, double lambda, double rho,
                 double p, std::uint64_t seed, const std::string& trace_path) {
    JobInstance x{parse_doubles(sizes_text)};
    validate_instance(x);
    const int n = x.n();

    PredictionView view;
    view.known = parse_ints(known_text);
    if (!pred_text.empty()) {
        view.predictions = parse_doubles(pred_text);
    } else {
        for (int idx : view.known) {
            if (idx < 0 || idx >= n) throw std::invalid_argument("known index out of range");
            view.predictions.push_back(x.sizes[static_cast<std::size_t>(idx)]);
        }
    }
    validate_view(view, n);
    if (alg == "spjf" && view.count() == 0) {
        for (int i = 0; i < n; ++i) {
            view.known.push_back(i);
            view.predictions.push_back(x.sizes[static_cast<std::size_t>(i)]);
        }
    }

    Rng rng(seed);
    PolicyContext ctx;
    ctx.n = n;
    ctx.truth = alg == "opt" ? &x : nullptr;
    ctx.view = &view;
    ctx.rng = &rng;
    auto policy = make_policy(parse_policy_config(alg, lambda, rho, p), ctx);
    ExecutionTrace trace = run(*policy, x);

    double opt = opt_objective(x);
    for (int i = 0; i < n; ++i) {
        std::printf("job %d: size %.12g, completion %.12g\n", i,
                    x.sizes[static_cast<std::size_t>(i)],
                    trace.completion[static_cast<std::size_t>(i)]);
    }
    std::printf("objective %.12g\nopt %.12g\nratio %.12g\n", trace.objective, opt,
                trace.objective / opt);
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + trace_path);
        write_trace_csv(trace, out);
        std::printf("event log written to %s\n", trace_path.c_str());
    }
    return 0;
}

int cmd_ratio(const std::string& alg, const std::string& dist_text, const std::string& sizes_text,
              int n, int b, long trials, std::uint64_t seed, const std::string& estimator,
              bool exact, const std::string& noise_text, double lambda, double rho, double p,
              long cap) {
    PointSpec pt;
    pt.experiment = "ratio";
    pt.algorithm = alg;
    JobInstance fixed;
    if (!sizes_text.empty()) {
        fixed = JobInstance{parse_doubles(sizes_text)};
        validate_instance(fixed);
        pt.dist = Explicit{fixed.sizes};
        pt.n = fixed.n();
        pt.fixed = &fixed;
    } else {
        pt.dist = parse_distribution(dist_text);
        pt.n = n;
    }
    pt.b = b;
    double p_eff = p >= 0 ? p : mixture_rtc_probability(pt.n, b);
    pt.policy = parse_policy_config(alg, lambda, rho, p_eff);
    if (alg == "preferential") { pt.lambda = lambda; pt.rho = rho; }
    if (alg == "noisy-switch") pt.rho = rho;
    if (alg == "mixture") pt.p = p_eff;
    pt.noise = parse_noise(noise_text);
    if (const auto* g = std::get_if<GaussianNoise>(&pt.noise)) pt.tau = g->tau;
    if (const auto* u = std::get_if<UniformNoise>(&pt.noise)) pt.tau = u->tau;
    if (const auto* a = std::get_if<AdversarialConstant>(&pt.noise)) pt.tau = a->c;
    pt.trials = trials;
    pt.estimator = parse_estimator(estimator);
    pt.seed = seed;
    pt.exact = exact;
    pt.enumeration_cap = cap;

    EstimateRow row = estimate_ratio(pt);
    write_csv({row}, std::cout);
    return 0;
}

int cmd_bounds(int n, int b, double w, bool has_w, double rho, bool has_rho, double lambda,
               bool has_lambda, double error, bool csv) {
    BoundQuery q;
    q.n = n;
    q.b = b;
    q.error = error;
    std::vector<std::pair<std::string, double>> table;

    auto range = crrr_ratio_range(q);
    table.emplace_back("crrr-lower", range.first);
    table.emplace_back("crrr-upper", range.second);
    table.emplace_back("switch-perfect", switch_perfect_ratio(q));
    table.emplace_back("mixture-perfect", mixture_perfect_ratio(q));
    table.emplace_back("mixture-rtc-probability", mixture_rtc_probability(n, b));
    table.emplace_back("lb-exponential-finite", lb_exponential_finite(q));
    table.emplace_back("lb-exponential-finite-quadrature", lb_generic_finite(ExpPhi{}, q));
    if (has_w) {
        q.w = w;
        table.emplace_back("lb-exponential-asymptotic", lb_generic_asymptotic(ExpPhi{}, w));
        table.emplace_back("lb-heavy-tail-asymptotic", lb_heavy_tail_asymptotic(w));
    }
    if (has_rho) {
        q.rho = rho;
        SmoothnessBound sb = noisy_switch_bound(q);
        table.emplace_back("noisy-switch-consistency", sb.consistency);
        table.emplace_back("noisy-switch-sensitivity", sb.sensitivity);
        table.emplace_back("noisy-switch-bound", sb.standard);
        table.emplace_back("noisy-switch-bound-precise", sb.precise);
        if (has_lambda) {
            q.lambda = lambda;
            table.emplace_back("preferential-robustness", 2.0 / (1.0 - lambda));
            table.emplace_back("preferential-bound", preferential_bound(q));
        }
    }
    if (csv) {
        std::printf("bound,value\n");
        for (const auto& [name, value] : table) std::printf("%s,%.12g\n", name.c_str(), value);
    } else {
        for (const auto& [name, value] : table) std::printf("%-36s %.12g\n", name.c_str(), value);
    }
    return 0;
}

int cmd_experiment(const std::string& preset_name, const std::string& config_path,
                   const std::string& out_path, const std::string& svg_path, long trials_override,
                   std::uint64_t seed_override, bool has_seed, int workers) {
    ExperimentSpec spec;
    if (!preset_name.empty()) {
        spec = preset(preset_name);
    } else if (!config_path.empty()) {
        spec = spec_from_json_file(config_path);
    } else {
        throw std::invalid_argument("experiment needs --preset or --config");
    }
    if (trials_override > 0) spec.trials = trials_override;
    if (has_seed) spec.seed = seed_override;
    if (workers > 0) spec.workers = workers;

    std::vector<EstimateRow> rows = run_experiment(spec);
    long failures = 0;
    for (const auto& r : rows) {
        if (r.failed) {
            ++failures;
            std::fprintf(stderr, "point failed (%s n=%d B=%d): %s\n", r.algorithm.c_str(), r.n,
                         r.b, r.error.c_str());
        }
    }
    write_csv_file(rows, out_path);
    std::printf("%zu rows -> %s%s\n", rows.size(), out_path.c_str(),
                failures ? " (with failures)" : "");

    if (!svg_path.empty()) {
        std::string x_field = "B";
        if (spec.noise.kind != "none" && spec.noise.taus.size() > 1) x_field = "tau";
        std::vector<std::string> series = {"algorithm"};
        if (spec.dists.size() > 1) series.insert(series.begin(), "experiment");
        if (spec.n_values.size() > 1) series.push_back("n");
        if (x_field != "B" &&
            (spec.b_values.size() > 1 || spec.b_fractions.size() > 1)) series.push_back("B");
        for (const auto& pol : spec.policies) {
            if (pol.lambdas.size() > 1) { series.push_back("lambda"); break; }
        }
        for (const auto& pol : spec.policies) {
            if (pol.rhos.size() > 1) { series.push_back("rho"); break; }
        }
        render_svg(rows, x_field, series, svg_path);
        std::printf("chart -> %s\n", svg_path.c_str());
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"preemptive scheduling with partial job-size predictions"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one policy on explicit sizes");
    std::string sizes, known, preds, alg = "rr", trace_path;
    double lambda = 0.5, rho = 0.5, p = -1.0;
    std::uint64_t seed = 42;
    sim->add_option("--sizes", sizes, "comma-separated job sizes")->required();
    sim->add_option("--known", known, "comma-separated known job indices");
    sim->add_option("--pred", preds, "predictions for the known jobs (default: true sizes)");
    sim->add_option("--alg", alg, "opt|rr|rtc|spjf|crrr|switch|noisy-switch|preferential|mixture");
    sim->add_option("--lambda", lambda, "preferential rate split");
    sim->add_option("--rho", rho, "breakpoint multiplier parameter");
    sim->add_option("--p", p, "mixture probability (-1: closed-form weight)");
    sim->add_option("--seed", seed, "random seed");
    sim->add_option("--trace", trace_path, "write the event log as CSV");

    // ratio
    auto* rat = app.add_subcommand("ratio", "Monte Carlo or exact competitive-ratio estimate");
    std::string dist = "exp:1", rsizes, estimator = "rom", noise = "none";
    int n = 10, b = 0;
    long trials = 10000, cap = 100000;
    bool exact = false;
    rat->add_option("--alg", alg, "policy name")->required();
    rat->add_option("--dist", dist, "size distribution, e.g. exp:1, pareto:1,1.1");
    rat->add_option("--sizes", rsizes, "explicit sizes (overrides --dist)");
    rat->add_option("--n", n, "number of jobs");
    rat->add_option("--B", b, "number of known jobs");
    rat->add_option("--trials", trials, "Monte Carlo trials");
    rat->add_option("--seed", seed, "master seed");
    rat->add_option("--estimator", estimator, "rom (ratio of means) or mor (mean of ratios)");
    rat->add_flag("--exact", exact, "exact enumeration instead of Monte Carlo");
    rat->add_option("--noise", noise, "none|gaussian:T|uniform:T|const:C");
    rat->add_option("--lambda", lambda, "preferential rate split");
    rat->add_option("--rho", rho, "breakpoint multiplier parameter");
    rat->add_option("--p", p, "mixture probability (-1: closed-form weight)");
    rat->add_option("--cap", cap, "enumeration cap");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "print the bound formulas at one point");
    int bn = 10, bb = 5;
    double w = 0.5, brho = 0.5, blambda = 0.5, berror = 0.0;
    bool csv = false;
    bnd->add_option("--n", bn, "number of jobs")->required();
    bnd->add_option("--B", bb, "number of known jobs")->required();
    auto* wopt = bnd->add_option("--w", w, "asymptotic fraction B/n");
    auto* ropt = bnd->add_option("--rho", brho, "breakpoint multiplier parameter");
    auto* lopt = bnd->add_option("--lambda", blambda, "preferential rate split");
    bnd->add_option("--error", berror, "normalized error n E[eta]/OPT");
    bnd->add_flag("--csv", csv, "CSV output");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a preset or JSON experiment spec");
    std::string preset_name, config_path, out_path = "rows.csv", svg_path;
    long etrials = 0;
    std::uint64_t eseed = 0;
    int workers = 0;
    exp->add_option("--preset", preset_name, "fig1|fig2|fig3-left|fig3-right|fig4");
    exp->add_option("--config", config_path, "JSON spec file");
    exp->add_option("--out", out_path, "output CSV path");
    exp->add_option("--svg", svg_path, "also render an SVG chart");
    exp->add_option("--trials", etrials, "override the trial count");
    auto* seed_opt = exp->add_option("--seed", eseed, "override the master seed");
    exp->add_option("--jobs", workers, "worker threads (0: hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(sizes, known, preds, alg, lambda, rho, p, seed, trace_path);
        }
        if (rat->parsed()) {
            return cmd_ratio(alg, dist, rsizes, n, b, trials, seed, estimator, exact, noise,
                             lambda, rho, p, cap);
        }
        if (bnd->parsed()) {
            return cmd_bounds(bn, bb, w, wopt->count() > 0, brho, ropt->count() > 0, blambda,
                              lopt->count() > 0, berror, csv);
        }
        if (exp->parsed()) {
            return cmd_experiment(preset_name, config_path, out_path, svg_path, etrials, eseed,
                                  seed_opt->count() > 0, workers);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
