// Python module exposing the main operations: sampling, simulation,
// closed forms, bound formulas, and the estimation harness.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "schedpred/analysis.hpp"
#include "schedpred/harness.hpp"

namespace py = pybind11;
using namespace schedpred;

namespace {

py::dict row_to_dict(const EstimateRow& r) {
    py::dict d;
    d["experiment"] = r.experiment;
    d["algorithm"] = r.algorithm;
    d["n"] = r.n;
    d["B"] = r.b;
    d["lambda"] = r.lambda ? py::object(py::float_(*r.lambda)) : py::none();
    d["rho"] = r.rho ? py::object(py::float_(*r.rho)) : py::none();
    d["p"] = r.p ? py::object(py::float_(*r.p)) : py::none();
    d["tau"] = r.tau ? py::object(py::float_(*r.tau)) : py::none();
    d["trials"] = r.trials;
    d["estimator"] = r.estimator;
    d["mean_alg"] = r.mean_alg;
    d["mean_opt"] = r.mean_opt;
    d["ratio"] = r.ratio;
    d["std_err"] = r.std_err;
    d["exact"] = r.exact;
    d["seed"] = r.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(schedpred, m) {
    m.doc() = "preemptive single-machine scheduling with partial job-size predictions";

    m.def(
        "sample",
        [](const std::string& dist, int n, std::uint64_t seed) {
            Rng rng(seed);
            return sample_instance(parse_distribution(dist), n, rng).sizes;
        },
        py::arg("dist"), py::arg("n"), py::arg("seed") = 42,
        "n i.i.d. job sizes from a distribution string such as 'exp:1' or 'pareto:1,1.1'");

    m.def(
        "known_subset",
        [](int n, int b, std::uint64_t seed) {
            Rng rng(seed);
            return sample_known_subset(n, b, rng);
        },
        py::arg("n"), py::arg("b"), py::arg("seed") = 42);

    m.def(
        "prediction_error",
        [](const std::vector<double>& sizes, const std::vector<int>& known,
           const std::vector<double>& predictions) {
            return prediction_error(JobInstance{sizes}, PredictionView{known, predictions});
        },
        py::arg("sizes"), py::arg("known"), py::arg("predictions"));

    m.def(
        "simulate",
        [](const std::vector<double>& sizes, const std::string& alg, std::vector<int> known,
           std::optional<std::vector<double>> predictions, double lam, double rho, double p,
           std::uint64_t seed) {
            JobInstance x{sizes};
            validate_instance(x);
            PredictionView view;
            if (alg == "spjf" && known.empty()) {
                known.resize(sizes.size());
                std::iota(known.begin(), known.end(), 0);
            }
            view.known = known;
            if (predictions) {
                view.predictions = *predictions;
            } else {
                for (int i : known) view.predictions.push_back(sizes[static_cast<std::size_t>(i)]);
            }
            validate_view(view, x.n());
            Rng rng(seed);
            PolicyContext ctx;
            ctx.n = x.n();
            ctx.truth = alg == "opt" ? &x : nullptr;
            ctx.view = &view;
            ctx.rng = &rng;
            double p_eff = p >= 0 ? p : mixture_rtc_probability(std::max(x.n(), 2), view.count());
            auto policy = make_policy(parse_policy_config(alg, lam, rho, p_eff), ctx);
            ExecutionTrace tr = run(*policy, x);
            py::dict out;
            out["completion"] = tr.completion;
            out["objective"] = tr.objective;
            out["opt"] = opt_objective(x);
            out["ratio"] = tr.objective / opt_objective(x);
            return out;
        },
        py::arg("sizes"), py::arg("alg") = "rr", py::arg("known") = std::vector<int>{},
        py::arg("predictions") = std::nullopt, py::arg("lam") = 0.5, py::arg("rho") = 0.5,
        py::arg("p") = -1.0, py::arg("seed") = 42);

    m.def("opt_objective",
          [](const std::vector<double>& sizes) { return opt_objective(JobInstance{sizes}); });
    m.def("round_robin_objective", [](const std::vector<double>& sizes) {
        return round_robin_objective(JobInstance{sizes});
    });
    m.def("rtc_expected_objective", [](const std::vector<double>& sizes) {
        return rtc_expected_objective(JobInstance{sizes});
    });

    m.def(
        "bounds",
        [](int n, int b, std::optional<double> w, std::optional<double> rho,
           std::optional<double> lam, double error) {
            BoundQuery q;
            q.n = n;
            q.b = b;
            q.error = error;
            py::dict out;
            auto range = crrr_ratio_range(q);
            out["crrr-lower"] = range.first;
            out["crrr-upper"] = range.second;
            out["switch-perfect"] = switch_perfect_ratio(q);
            out["mixture-perfect"] = mixture_perfect_ratio(q);
            out["mixture-rtc-probability"] = mixture_rtc_probability(n, b);
            out["lb-exponential-finite"] = lb_exponential_finite(q);
            if (w) {
                out["lb-exponential-asymptotic"] = lb_generic_asymptotic(ExpPhi{}, *w);
                out["lb-heavy-tail-asymptotic"] = lb_heavy_tail_asymptotic(*w);
            }
            if (rho) {
                q.rho = *rho;
                SmoothnessBound sb = noisy_switch_bound(q);
                out["noisy-switch-consistency"] = sb.consistency;
                out["noisy-switch-sensitivity"] = sb.sensitivity;
                out["noisy-switch-bound"] = sb.standard;
                out["noisy-switch-bound-precise"] = sb.precise;
                if (lam) {
                    q.lambda = *lam;
                    out["preferential-bound"] = preferential_bound(q);
                }
            }
            return out;
        },
        py::arg("n"), py::arg("b"), py::arg("w") = std::nullopt, py::arg("rho") = std::nullopt,
        py::arg("lam") = std::nullopt, py::arg("error") = 0.0);

    m.def(
        "g_phi",
        [](const std::string& family, double x, double t, double r) {
            return family == "exp" ? g_phi(ExpPhi{}, x, t) : g_phi(PolyTailPhi{r}, x, t);
        },
        py::arg("family"), py::arg("x"), py::arg("t"), py::arg("r") = 0.51);
    m.def(
        "alpha_phi",
        [](const std::string& family, double r) {
            return family == "exp" ? alpha_phi(ExpPhi{}) : alpha_phi(PolyTailPhi{r});
        },
        py::arg("family"), py::arg("r") = 0.51);

    m.def(
        "estimate_ratio",
        [](const std::string& alg, const std::string& dist, int n, int b, long trials,
           std::uint64_t seed, const std::string& estimator, const std::string& noise, double lam,
           double rho, double p, bool exact, std::optional<std::vector<double>> sizes) {
            PointSpec pt;
            pt.experiment = "python";
            pt.algorithm = alg;
            JobInstance fixed;
            if (sizes) {
                fixed = JobInstance{*sizes};
                validate_instance(fixed);
                pt.dist = Explicit{fixed.sizes};
                pt.n = fixed.n();
                pt.fixed = &fixed;
            } else {
                pt.dist = parse_distribution(dist);
                pt.n = n;
            }
            pt.b = b;
            double p_eff = p >= 0 ? p : mixture_rtc_probability(pt.n, b);
            pt.policy = parse_policy_config(alg, lam, rho, p_eff);
            if (alg == "preferential") { pt.lambda = lam; pt.rho = rho; }
            if (alg == "noisy-switch") pt.rho = rho;
            if (alg == "mixture") pt.p = p_eff;
            pt.noise = parse_noise(noise);
            pt.trials = trials;
            pt.estimator = parse_estimator(estimator);
            pt.seed = seed;
            pt.exact = exact;
            return row_to_dict(estimate_ratio(pt));
        },
        py::arg("alg"), py::arg("dist") = "exp:1", py::arg("n") = 10, py::arg("b") = 0,
        py::arg("trials") = 1000, py::arg("seed") = 42, py::arg("estimator") = "rom",
        py::arg("noise") = "none", py::arg("lam") = 0.5, py::arg("rho") = 0.5,
        py::arg("p") = -1.0, py::arg("exact") = false, py::arg("sizes") = std::nullopt);

    m.def(
        "exact_expected_objective",
        [](const std::string& alg, const std::vector<double>& sizes, int b, double p, double rho,
           long cap) {
            JobInstance x{sizes};
            double p_eff = p >= 0 ? p : mixture_rtc_probability(std::max(x.n(), 2), b);
            ExactResult er =
                exact_expected_objective(parse_policy_config(alg, 0.5, rho, p_eff), x, b, cap);
            return py::make_tuple(er.value, er.outcomes);
        },
        py::arg("alg"), py::arg("sizes"), py::arg("b"), py::arg("p") = -1.0, py::arg("rho") = 0.0,
        py::arg("cap") = 100000);

    m.def(
        "run_preset",
        [](const std::string& name, const std::string& out_csv, std::optional<std::string> svg,
           long trials, std::optional<std::uint64_t> seed) {
            ExperimentSpec spec = preset(name);
            if (trials > 0) spec.trials = trials;
            if (seed) spec.seed = *seed;
            auto rows = run_experiment(spec);
            write_csv_file(rows, out_csv);
            if (svg) {
                std::string x_field =
                    spec.noise.kind != "none" && spec.noise.taus.size() > 1 ? "tau" : "B";
                render_svg(rows, x_field, {"algorithm"}, *svg);
            }
            py::list out;
            for (const auto& r : rows) out.append(row_to_dict(r));
            return out;
        },
        py::arg("name"), py::arg("out_csv"), py::arg("svg") = std::nullopt,
        py::arg("trials") = 0, py::arg("seed") = std::nullopt);
}
