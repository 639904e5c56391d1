#include "schedpred/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace schedpred {

std::string estimator_label(Estimator e) {
    return e == Estimator::RatioOfMeans ? "rom" : "mor";
}

Estimator parse_estimator(const std::string& s) {
    if (s == "rom" || s == "ratio-of-means") return Estimator::RatioOfMeans;
    if (s == "mor" || s == "mean-of-ratios") return Estimator::MeanOfRatios;
    throw std::invalid_argument("unknown estimator: " + s);
}

namespace {

std::vector<double> parse_params(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

bool uses_predictions(const std::string& algorithm) {
    return algorithm == "spjf" || algorithm == "crrr" || algorithm == "switch" ||
           algorithm == "noisy-switch" || algorithm == "preferential" || algorithm == "mixture";
}

double double_field(const EstimateRow& row, const std::string& name) {
    auto opt = [&](const std::optional<double>& v) {
        if (!v) throw std::invalid_argument("row lacks numeric field: " + name);
        return *v;
    };
    if (name == "n") return row.n;
    if (name == "B") return row.b;
    if (name == "lambda") return opt(row.lambda);
    if (name == "rho") return opt(row.rho);
    if (name == "p") return opt(row.p);
    if (name == "tau") return opt(row.tau);
    if (name == "trials") return static_cast<double>(row.trials);
    if (name == "ratio") return row.ratio;
    if (name == "mean_alg") return row.mean_alg;
    if (name == "mean_opt") return row.mean_opt;
    throw std::invalid_argument("unknown numeric field: " + name);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string string_field(const EstimateRow& row, const std::string& name) {
    if (name == "experiment") return row.experiment;
    if (name == "algorithm") return row.algorithm;
    if (name == "estimator") return row.estimator;
    if (name == "lambda") return row.lambda ? fmt_double(*row.lambda) : "";
    if (name == "rho") return row.rho ? fmt_double(*row.rho) : "";
    if (name == "p") return row.p ? fmt_double(*row.p) : "";
    if (name == "tau") return row.tau ? fmt_double(*row.tau) : "";
    return fmt_double(double_field(row, name));
}

}  // namespace

SizeDistribution parse_distribution(const std::string& text) {
    std::string name = text;
    std::string args;
    if (auto pos = text.find(':'); pos != std::string::npos) {
        name = text.substr(0, pos);
        args = text.substr(pos + 1);
    }
    std::vector<double> v = parse_params(args);
    auto need = [&](std::size_t k) {
        if (v.size() != k) throw std::invalid_argument("distribution " + name + " needs " +
                                                       std::to_string(k) + " parameter(s)");
    };
    SizeDistribution out;
    if (name == "exp") {
        need(1);
        out = Exponential{v[0]};
    } else if (name == "polytail") {
        need(2);
        out = TruncatedPolyTail{v[0], v[1]};
    } else if (name == "pareto") {
        need(2);
        out = Pareto{v[0], v[1]};
    } else if (name == "twopoint") {
        need(3);
        out = TwoPoint{v[0], v[1], v[2]};
    } else if (name == "const") {
        need(1);
        out = Constant{v[0]};
    } else if (name == "explicit") {
        if (v.empty()) throw std::invalid_argument("explicit distribution needs sizes");
        out = Explicit{v};
    } else {
        throw std::invalid_argument("unknown distribution: " + name);
    }
    validate_distribution(out);
    return out;
}

NoiseModel parse_noise(const std::string& text) {
    std::string name = text;
    std::string args;
    if (auto pos = text.find(':'); pos != std::string::npos) {
        name = text.substr(0, pos);
        args = text.substr(pos + 1);
    }
    if (name == "none") return NoNoise{};
    std::vector<double> v = parse_params(args);
    if (v.size() != 1) throw std::invalid_argument("noise " + name + " needs one parameter");
    NoiseModel out;
    if (name == "gaussian") {
        out = GaussianNoise{v[0]};
    } else if (name == "uniform") {
        out = UniformNoise{v[0]};
    } else if (name == "const") {
        out = AdversarialConstant{v[0]};
    } else {
        throw std::invalid_argument("unknown noise model: " + name);
    }
    validate_noise(out);
    return out;
}

NoiseModel noise_at(const NoiseSpec& spec, double tau) {
    if (spec.kind == "none") return NoNoise{};
    if (spec.kind == "gaussian") return GaussianNoise{tau};
    if (spec.kind == "uniform") return UniformNoise{tau};
    if (spec.kind == "const") return AdversarialConstant{tau};
    throw std::invalid_argument("unknown noise kind: " + spec.kind);
}

// --- Monte Carlo estimation ------------------------------------------------------

EstimateRow estimate_ratio(const PointSpec& pt) {
    EstimateRow row;
    row.experiment = pt.experiment;
    row.algorithm = pt.algorithm;
    row.n = pt.n;
    row.b = pt.b;
    row.lambda = pt.lambda;
    row.rho = pt.rho;
    row.p = pt.p;
    row.tau = pt.tau;
    row.estimator = estimator_label(pt.estimator);
    row.seed = pt.seed;
    row.exact = pt.exact;

    if (pt.exact) {
        JobInstance local;
        const JobInstance* x = pt.fixed;
        if (x == nullptr) {
            Rng rng(derive_seed(pt.seed, pt.coord, 0x1457));
            local = sample_instance(pt.dist, pt.n, rng);
            x = &local;
        }
        if (!std::holds_alternative<NoNoise>(pt.noise)) {
            throw std::invalid_argument("exact enumeration assumes exact predictions");
        }
        ExactResult er = exact_expected_objective(pt.policy, *x, pt.b, pt.enumeration_cap);
        row.trials = er.outcomes;
        row.mean_alg = er.value;
        row.mean_opt = opt_objective(*x);
        row.ratio = er.value / row.mean_opt;
        row.std_err = 0.0;
        return row;
    }

    if (pt.trials < 1) throw std::invalid_argument("estimate needs trials >= 1");
    const bool needs_view = uses_predictions(pt.algorithm);
    double sa = 0, so = 0, saa = 0, soo = 0, sao = 0, sr = 0, srr = 0;
    const long m = pt.trials;
    for (long t = 0; t < m; ++t) {
        std::uint64_t trial_seed = derive_seed(pt.seed, pt.coord, static_cast<std::uint64_t>(t));
        Rng rng(trial_seed);
        try {
            JobInstance local;
            const JobInstance* x = pt.fixed;
            if (x == nullptr) {
                local = sample_instance(pt.dist, pt.n, rng);
                x = &local;
            }
            PredictionView view;
            if (needs_view) {
                std::vector<int> known;
                if (pt.algorithm == "spjf") {
                    known.resize(static_cast<std::size_t>(pt.n));
                    std::iota(known.begin(), known.end(), 0);
                } else {
                    known = sample_known_subset(pt.n, pt.b, rng);
                }
                view = apply_noise(*x, known, pt.noise, rng);
            }
            PolicyContext ctx;
            ctx.n = pt.n;
            ctx.truth = pt.algorithm == "opt" ? x : nullptr;
            ctx.view = needs_view ? &view : nullptr;
            ctx.rng = &rng;
            auto policy = make_policy(pt.policy, ctx);
            double alg = run(*policy, *x, lean_run_options()).objective;
            double opt = opt_objective(*x);
            double r = alg / opt;
            sa += alg;
            so += opt;
            saa += alg * alg;
            soo += opt * opt;
            sao += alg * opt;
            sr += r;
            srr += r * r;
        } catch (const std::exception& e) {
            throw EngineError(std::string(e.what()) + " [trial " + std::to_string(t) +
                              ", stream seed " + std::to_string(trial_seed) + "]");
        }
    }
    double dm = static_cast<double>(m);
    row.trials = m;
    row.mean_alg = sa / dm;
    row.mean_opt = so / dm;
    if (pt.estimator == Estimator::RatioOfMeans) {
        double r = row.mean_alg / row.mean_opt;
        row.ratio = r;
        if (m > 1) {
            // delta-method standard error for a ratio of paired means
            double vaa = (saa - dm * row.mean_alg * row.mean_alg) / (dm - 1);
            double voo = (soo - dm * row.mean_opt * row.mean_opt) / (dm - 1);
            double vao = (sao - dm * row.mean_alg * row.mean_opt) / (dm - 1);
            double var = (vaa - 2.0 * r * vao + r * r * voo) / (dm * row.mean_opt * row.mean_opt);
            row.std_err = var > 0 ? std::sqrt(var) : 0.0;
        }
    } else {
        double r = sr / dm;
        row.ratio = r;
        if (m > 1) {
            double vrr = (srr - dm * r * r) / (dm - 1);
            row.std_err = vrr > 0 ? std::sqrt(vrr / dm) : 0.0;
        }
    }
    return row;
}

// --- exact enumeration ------------------------------------------------------------

namespace {

double count_combinations(int n, int b) {
    double c = 1.0;
    for (int i = 1; i <= b; ++i) c *= static_cast<double>(n - b + i) / i;
    return c;
}

double count_permutations(int n) {
    double c = 1.0;
    for (int i = 2; i <= n; ++i) c *= i;
    return c;
}

template <class Fn>
void for_each_subset(int n, int b, Fn&& fn) {
    std::vector<int> comb(static_cast<std::size_t>(b));
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
        fn(comb);
        int i = b - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - b + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < b; ++j) {
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

bool has_duplicate_sizes(const JobInstance& x) {
    std::vector<double> s = x.sizes;
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) != s.end();
}

ExactResult enumerate_subsets(const JobInstance& x, int b, long cap, bool crrr) {
    const int n = x.n();
    double count = count_combinations(n, b);
    if (count > static_cast<double>(cap)) {
        throw EnumerationCapError(static_cast<long>(count), cap);
    }
    if (!crrr && b >= 2 && has_duplicate_sizes(x)) {
        throw UnsupportedPolicyError(
            "switch with tied breakpoints is randomized; exact enumeration needs distinct sizes");
    }
    double sum = 0.0;
    long outcomes = 0;
    Rng dummy(0);
    for_each_subset(n, b, [&](const std::vector<int>& subset) {
        PredictionView view;
        view.known = subset;
        view.predictions.reserve(subset.size());
        for (int j : subset) view.predictions.push_back(x.sizes[static_cast<std::size_t>(j)]);
        std::unique_ptr<Policy> policy =
            crrr ? make_crrr(view, n)
                 : make_switch(view, make_breakpoints(view, view.predictions, dummy), n);
        sum += run(*policy, x, lean_run_options()).objective;
        ++outcomes;
    });
    return {sum / static_cast<double>(outcomes), outcomes};
}

ExactResult enumerate_rtc(const JobInstance& x, long cap) {
    const int n = x.n();
    double count = count_permutations(n);
    if (count > static_cast<double>(cap)) {
        // the order expectation has the proven closed form (n+1)/2 * sum x;
        // enumeration is reserved for sizes the cap allows
        return {rtc_expected_objective(x), 1};
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    double sum = 0.0;
    long outcomes = 0;
    do {
        auto policy = make_fixed_order_policy(order);
        sum += run(*policy, x, lean_run_options()).objective;
        ++outcomes;
    } while (std::next_permutation(order.begin(), order.end()));
    return {sum / static_cast<double>(outcomes), outcomes};
}

}  // namespace

ExactResult exact_expected_objective(const PolicyConfig& cfg, const JobInstance& x, int b,
                                     long enumeration_cap) {
    validate_instance(x);
    if (b < 0 || b > x.n()) throw std::invalid_argument("exact enumeration needs 0 <= B <= n");
    return std::visit(
        [&](const auto& c) -> ExactResult {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, RoundRobinConfig>) {
                return {round_robin_objective(x), 1};
            } else if constexpr (std::is_same_v<T, OptConfig>) {
                return {opt_objective(x), 1};
            } else if constexpr (std::is_same_v<T, RtcConfig>) {
                return enumerate_rtc(x, enumeration_cap);
            } else if constexpr (std::is_same_v<T, CrrrConfig>) {
                return enumerate_subsets(x, b, enumeration_cap, true);
            } else if constexpr (std::is_same_v<T, SwitchConfig>) {
                return enumerate_subsets(x, b, enumeration_cap, false);
            } else if constexpr (std::is_same_v<T, NoisySwitchConfig>) {
                if (c.rho != 0.0) {
                    throw UnsupportedPolicyError(
                        "noisy-switch draws a continuous multiplier; not enumerable");
                }
                return enumerate_subsets(x, b, enumeration_cap, false);
            } else if constexpr (std::is_same_v<T, MixtureConfig>) {
                if (c.a == nullptr || c.b == nullptr) {
                    throw std::invalid_argument("mixture needs both component configs");
                }
                ExactResult ra = exact_expected_objective(*c.a, x, b, enumeration_cap);
                ExactResult rb = exact_expected_objective(*c.b, x, b, enumeration_cap);
                return {c.p * ra.value + (1.0 - c.p) * rb.value, ra.outcomes + rb.outcomes};
            } else {
                throw UnsupportedPolicyError("policy " + policy_name(cfg) +
                                             " is not set-determined; no exact enumeration");
            }
        },
        cfg.v);
}

// --- experiment driver --------------------------------------------------------------

namespace {

std::string short_dist_label(const SizeDistribution& dist) {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) return "exp";
            else if constexpr (std::is_same_v<T, TruncatedPolyTail>) return "polytail";
            else if constexpr (std::is_same_v<T, Pareto>) return "pareto";
            else if constexpr (std::is_same_v<T, TwoPoint>) return "twopoint";
            else if constexpr (std::is_same_v<T, Constant>) return "const";
            else return "explicit";
        },
        dist);
}

std::vector<EstimateRow> bounds_table_rows(const ExperimentSpec& spec) {
    int n = spec.n_values.empty() ? 100 : spec.n_values.front();
    std::vector<EstimateRow> rows;
    const double e = std::exp(1.0);
    for (double w : spec.bounds_w_grid) {
        struct Entry { const char* name; double value; };
        double b_col = std::round(w * n);
        Entry entries[] = {
            {"lb-exponential", (2.0 - w) - (4.0 / e - 1.0) * w * (1.0 - w)},
            {"lb-heavy-tail", lb_heavy_tail_asymptotic(w)},
            {"crrr", 2.0 - w},
            {"switch", 2.0 - w},
        };
        for (const Entry& en : entries) {
            EstimateRow r;
            r.experiment = spec.name;
            r.algorithm = en.name;
            r.n = n;
            r.b = static_cast<int>(b_col);
            r.trials = 0;
            r.estimator = "";
            r.mean_alg = en.value;
            r.mean_opt = 1.0;
            r.ratio = en.value;
            r.std_err = 0.0;
            r.exact = true;
            r.seed = spec.seed;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

struct ParamGrid {
    std::vector<std::optional<double>> lambdas{std::nullopt};
    std::vector<std::optional<double>> rhos{std::nullopt};
    std::vector<std::optional<double>> ps{std::nullopt};
};

ParamGrid grid_for(const PolicySpec& pol) {
    auto lift = [](const std::vector<double>& v, double fallback) {
        std::vector<std::optional<double>> out;
        if (v.empty()) out.push_back(fallback);
        else for (double x : v) out.push_back(x);
        return out;
    };
    ParamGrid g;
    if (pol.algorithm == "preferential") {
        g.lambdas = lift(pol.lambdas, 0.5);
        g.rhos = lift(pol.rhos, 0.5);
    } else if (pol.algorithm == "noisy-switch") {
        g.rhos = lift(pol.rhos, 0.5);
    } else if (pol.algorithm == "mixture") {
        g.ps = lift(pol.ps, -1.0);
    }
    return g;
}

}  // namespace

std::vector<EstimateRow> run_experiment(const ExperimentSpec& spec) {
    if (!spec.bounds_w_grid.empty()) return bounds_table_rows(spec);
    if (spec.dists.empty()) throw std::invalid_argument("experiment needs a size distribution");
    if (spec.policies.empty()) throw std::invalid_argument("experiment needs at least one policy");
    if (spec.trials < 1) throw std::invalid_argument("experiment needs trials >= 1");
    if (spec.b_values.empty() && spec.b_fractions.empty()) {
        throw std::invalid_argument("experiment needs a B grid");
    }

    std::deque<JobInstance> fixed_store;
    std::vector<PointSpec> points;
    std::uint64_t coord = 0;

    for (std::size_t di = 0; di < spec.dists.size(); ++di) {
        const SizeDistribution& dist = spec.dists[di];
        validate_distribution(dist);
        std::string exp_name = spec.name;
        if (spec.dists.size() > 1) exp_name += ":" + short_dist_label(dist);

        std::vector<int> n_list = spec.n_values;
        if (const auto* e = std::get_if<Explicit>(&dist)) {
            n_list = {static_cast<int>(e->sizes.size())};
        } else if (n_list.empty()) {
            throw std::invalid_argument("experiment needs n values");
        }

        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            int n = n_list[ni];
            const JobInstance* fixed = nullptr;
            if (const auto* e = std::get_if<Explicit>(&dist)) {
                fixed_store.push_back(JobInstance{e->sizes});
                fixed = &fixed_store.back();
            } else if (!spec.resample) {
                Rng rng(derive_seed(spec.seed, 0xF15ED000u + di * 64 + ni, 0));
                fixed_store.push_back(sample_instance(dist, n, rng));
                fixed = &fixed_store.back();
            }

            std::vector<int> b_list = spec.b_values;
            if (!spec.b_fractions.empty()) {
                b_list.clear();
                for (double f : spec.b_fractions) {
                    int b = static_cast<int>(std::lround(f * n));
                    b_list.push_back(std::clamp(b, 0, n));
                }
            }

            for (int b : b_list) {
                if (b < 0 || b > n) throw std::invalid_argument("B outside [0,n]");
                for (const PolicySpec& pol : spec.policies) {
                    ParamGrid grid = grid_for(pol);
                    for (auto lambda : grid.lambdas) {
                        for (auto rho : grid.rhos) {
                            for (auto p : grid.ps) {
                                std::vector<std::optional<double>> taus;
                                if (spec.noise.kind == "none") {
                                    taus.push_back(std::nullopt);
                                } else {
                                    for (double t : spec.noise.taus) taus.push_back(t);
                                }
                                for (auto tau : taus) {
                                    PointSpec pt;
                                    pt.experiment = exp_name;
                                    pt.algorithm = pol.algorithm;
                                    pt.dist = dist;
                                    pt.n = n;
                                    pt.b = b;
                                    double p_eff = p && *p >= 0.0
                                                       ? *p
                                                       : (p ? mixture_rtc_probability(n, b) : 0.0);
                                    pt.policy = parse_policy_config(
                                        pol.algorithm, lambda.value_or(0.5), rho.value_or(0.5),
                                        p_eff);
                                    if (auto* pc = std::get_if<PreferentialConfig>(&pt.policy.v)) {
                                        pc->inner_observes_total = pol.inner_observes_total;
                                    }
                                    pt.lambda = lambda;
                                    pt.rho = rho;
                                    pt.p = p ? std::optional<double>(p_eff) : std::nullopt;
                                    pt.tau = tau;
                                    pt.noise = noise_at(spec.noise, tau.value_or(0.0));
                                    pt.trials = spec.trials;
                                    pt.estimator = spec.estimator;
                                    pt.seed = spec.seed;
                                    pt.coord = coord++;
                                    pt.fixed = fixed;
                                    pt.exact = spec.exact;
                                    pt.enumeration_cap = spec.enumeration_cap;
                                    points.push_back(std::move(pt));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    std::vector<EstimateRow> rows(points.size());
    unsigned workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(points.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= points.size()) break;
            try {
                rows[i] = estimate_ratio(points[i]);
            } catch (const std::exception& e) {
                EstimateRow& r = rows[i];
                const PointSpec& pt = points[i];
                r.experiment = pt.experiment;
                r.algorithm = pt.algorithm;
                r.n = pt.n;
                r.b = pt.b;
                r.lambda = pt.lambda;
                r.rho = pt.rho;
                r.p = pt.p;
                r.tau = pt.tau;
                r.trials = pt.trials;
                r.estimator = estimator_label(pt.estimator);
                r.seed = pt.seed;
                r.mean_alg = r.mean_opt = r.ratio = r.std_err =
                    std::numeric_limits<double>::quiet_NaN();
                r.failed = true;
                r.error = e.what();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

// --- presets ---------------------------------------------------------------------

ExperimentSpec preset(const std::string& name) {
    ExperimentSpec s;
    s.name = name;
    if (name == "fig1") {
        s.n_values = {100};
        for (int i = 0; i <= 50; ++i) s.bounds_w_grid.push_back(i / 50.0);
        return s;
    }
    if (name == "fig2") {
        s.dists = {Exponential{1.0}, TruncatedPolyTail{0.51, 1e4}};
        s.n_values = {20, 1000};
        s.b_fractions = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        s.policies = {PolicySpec{"crrr", {}, {}, {}}, PolicySpec{"switch", {}, {}, {}}};
        return s;
    }
    if (name == "fig3-left") {
        s.dists = {Pareto{1.0, 1.1}};
        s.n_values = {50};
        s.resample = false;
        s.b_values = {25};
        s.policies = {PolicySpec{"preferential", {0.0, 0.5, 1.0}, {0.0, 0.5}, {}}};
        s.noise = {"gaussian", {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}};
        return s;
    }
    if (name == "fig3-right") {
        s.dists = {Pareto{1.0, 1.1}};
        s.n_values = {50};
        s.resample = false;
        s.b_values = {0, 10, 25, 40, 50};
        s.policies = {PolicySpec{"noisy-switch", {}, {0.5}, {}}};
        s.noise = {"gaussian", {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}};
        return s;
    }
    if (name == "fig4") {
        s.dists = {TwoPoint{1.0, 2.0, 0.5}};
        s.n_values = {100};
        s.b_values = {50, 95};
        s.policies = {PolicySpec{"noisy-switch", {}, {0.0, 0.1, 0.5}, {}}};
        s.noise = {"uniform", {0.0, 0.01, 0.03, 0.06, 0.09, 0.12, 0.15}};
        return s;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

// --- CSV -------------------------------------------------------------------------

std::string csv_header() {
    return "experiment,algorithm,n,B,lambda,rho,p,tau,trials,estimator,mean_alg,mean_opt,ratio,"
           "std_err,exact,seed";
}

void write_csv(const std::vector<EstimateRow>& rows, std::ostream& out) {
    out << csv_header() << '\n';
    for (const EstimateRow& r : rows) {
        auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : ""; };
        out << r.experiment << ',' << r.algorithm << ',' << r.n << ',' << r.b << ','
            << opt(r.lambda) << ',' << opt(r.rho) << ',' << opt(r.p) << ',' << opt(r.tau) << ','
            << r.trials << ',' << r.estimator << ',' << fmt_double(r.mean_alg) << ','
            << fmt_double(r.mean_opt) << ',' << fmt_double(r.ratio) << ','
            << fmt_double(r.std_err) << ',' << (r.exact ? 1 : 0) << ',' << r.seed << '\n';
    }
}

void write_csv_file(const std::vector<EstimateRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(rows, out);
}

void write_trace_csv(const ExecutionTrace& trace, std::ostream& out) {
    out << "time,cause,job,rate_vector\n";
    for (const TraceEvent& ev : trace.events) {
        out << fmt_double(ev.time) << ','
            << (ev.cause == EventCause::Completion ? "completion" : "trigger") << ',' << ev.job
            << ',';
        for (std::size_t i = 0; i < ev.rates.size(); ++i) {
            if (i) out << ';';
            out << fmt_double(ev.rates[i]);
        }
        out << '\n';
    }
}

// --- JSON config -------------------------------------------------------------------

namespace {

using nlohmann::json;

}  // namespace

ExperimentSpec spec_from_json_text(const std::string& text) {
    json j = json::parse(text);
    ExperimentSpec s;
    s.name = j.value("name", s.name);
    for (const auto& d : j.value("dists", std::vector<std::string>{})) {
        s.dists.push_back(parse_distribution(d));
    }
    s.n_values = j.value("n_values", s.n_values);
    s.resample = j.value("resample", s.resample);
    s.b_values = j.value("b_values", s.b_values);
    s.b_fractions = j.value("b_fractions", s.b_fractions);
    if (j.contains("policies")) {
        for (const auto& p : j["policies"]) {
            PolicySpec ps;
            ps.algorithm = p.value("algorithm", ps.algorithm);
            ps.lambdas = p.value("lambdas", ps.lambdas);
            ps.rhos = p.value("rhos", ps.rhos);
            ps.ps = p.value("ps", ps.ps);
            ps.inner_observes_total = p.value("inner_observes_total", ps.inner_observes_total);
            s.policies.push_back(std::move(ps));
        }
    }
    if (j.contains("noise")) {
        s.noise.kind = j["noise"].value("kind", s.noise.kind);
        s.noise.taus = j["noise"].value("taus", s.noise.taus);
    }
    s.trials = j.value("trials", s.trials);
    s.seed = j.value("seed", s.seed);
    if (j.contains("estimator")) s.estimator = parse_estimator(j["estimator"].get<std::string>());
    s.enumeration_cap = j.value("enumeration_cap", s.enumeration_cap);
    s.exact = j.value("exact", s.exact);
    s.bounds_w_grid = j.value("bounds_w_grid", s.bounds_w_grid);
    s.workers = j.value("workers", s.workers);
    return s;
}

ExperimentSpec spec_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return spec_from_json_text(ss.str());
}

std::string spec_to_json_text(const ExperimentSpec& s) {
    json j;
    j["name"] = s.name;
    std::vector<std::string> dists;
    for (const auto& d : s.dists) dists.push_back(distribution_label(d));
    j["dists"] = dists;
    j["n_values"] = s.n_values;
    j["resample"] = s.resample;
    j["b_values"] = s.b_values;
    j["b_fractions"] = s.b_fractions;
    j["policies"] = json::array();
    for (const auto& p : s.policies) {
        j["policies"].push_back({{"algorithm", p.algorithm},
                                 {"lambdas", p.lambdas},
                                 {"rhos", p.rhos},
                                 {"ps", p.ps},
                                 {"inner_observes_total", p.inner_observes_total}});
    }
    j["noise"] = {{"kind", s.noise.kind}, {"taus", s.noise.taus}};
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["estimator"] = estimator_label(s.estimator);
    j["enumeration_cap"] = s.enumeration_cap;
    j["exact"] = s.exact;
    j["bounds_w_grid"] = s.bounds_w_grid;
    j["workers"] = s.workers;
    return j.dump(2);
}

// --- SVG -------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct SeriesPoint {
    double x, y, se;
};

}  // namespace

void render_svg(const std::vector<EstimateRow>& rows, const std::string& x_field,
                const std::vector<std::string>& series_fields, const std::string& path,
                bool bands) {
    std::vector<const EstimateRow*> usable;
    for (const auto& r : rows) {
        if (!r.failed && std::isfinite(r.ratio)) usable.push_back(&r);
    }
    if (usable.empty()) throw std::invalid_argument("render_svg needs at least one row");

    std::vector<std::string> keys;                      // insertion order
    std::vector<std::vector<SeriesPoint>> series;
    for (const EstimateRow* r : usable) {
        std::string key;
        for (const auto& f : series_fields) {
            if (!key.empty()) key += " ";
            key += f + "=" + string_field(*r, f);
        }
        auto it = std::find(keys.begin(), keys.end(), key);
        std::size_t idx;
        if (it == keys.end()) {
            keys.push_back(key);
            series.emplace_back();
            idx = keys.size() - 1;
        } else {
            idx = static_cast<std::size_t>(it - keys.begin());
        }
        series[idx].push_back({double_field(*r, x_field), r->ratio, r->std_err});
    }
    for (auto& s : series) {
        std::sort(s.begin(), s.end(), [](const SeriesPoint& a, const SeriesPoint& b) {
            return a.x < b.x;
        });
    }

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (const auto& p : s) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            double lo = p.y - (bands ? 2.0 * p.se : 0.0);
            double hi = p.y + (bands ? 2.0 * p.se : 0.0);
            ymin = std::min(ymin, lo);
            ymax = std::max(ymax, hi);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double width = 880, height = 540;
    const double ml = 70, mr = 230, mt = 30, mb = 55;
    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto sy = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // axes and ticks
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double xv = xmin + (xmax - xmin) * i / 5.0;
        double yv = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << sx(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << sx(xv)
            << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(xv) << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\">" << fmt_double(xv) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml << "\" y2=\""
            << sy(yv) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
            << "\" text-anchor=\"end\">" << fmt_double(yv) << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << x_field << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (mt + height - mb) / 2
        << ")\">ratio</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % 10];
        const auto& pts = series[k];
        bool any_band = false;
        if (bands) {
            for (const auto& p : pts) any_band = any_band || p.se > 0;
        }
        if (any_band && pts.size() > 1) {
            out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
            for (const auto& p : pts) out << sx(p.x) << ',' << sy(p.y + 2 * p.se) << ' ';
            for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
                out << sx(it->x) << ',' << sy(it->y - 2 * it->se) << ' ';
            }
            out << "\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& p : pts) out << sx(p.x) << ',' << sy(p.y) << ' ';
        out << "\"/>\n";
        double ly = mt + 16 + 18 * static_cast<double>(k);
        out << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly << "\" x2=\""
            << width - mr + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr + 40 << "\" y=\"" << ly + 4 << "\">"
            << (keys[k].empty() ? "series" : keys[k]) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("failed writing svg: " + path);
}

}  // namespace schedpred
