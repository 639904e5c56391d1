#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "schedpred/analysis.hpp"
#include "schedpred/engine.hpp"
#include "schedpred/instances.hpp"
#include "schedpred/policies.hpp"

namespace schedpred {

struct EnumerationCapError : std::runtime_error {
    long required;
    EnumerationCapError(long required_, long cap)
        : std::runtime_error("exact enumeration needs " + std::to_string(required_) +
                             " outcomes, cap is " + std::to_string(cap)),
          required(required_) {}
};

struct UnsupportedPolicyError : std::runtime_error {
    explicit UnsupportedPolicyError(const std::string& what) : std::runtime_error(what) {}
};

enum class Estimator { RatioOfMeans, MeanOfRatios };

std::string estimator_label(Estimator e);
Estimator parse_estimator(const std::string& s);

// One algorithm entry of an experiment, with parameter grids where the
// algorithm takes them (lambda for preferential, rho for the randomized
// breakpoints, p for the mixture; p = -1 selects the closed-form weight
// 2(n-B)/(n(n+3)-2B)).
struct PolicySpec {
    std::string algorithm = "rr";
    std::vector<double> lambdas;
    std::vector<double> rhos;
    std::vector<double> ps;
    // Sensitivity toggle: the preferential inner policy reads total processed
    // amounts instead of its own lambda-scaled contribution.
    bool inner_observes_total = false;
};

struct NoiseSpec {
    std::string kind = "none";   // none | gaussian | uniform | const
    std::vector<double> taus = {0.0};
};

// Declarative experiment configuration; mirrors the JSON config file.
struct ExperimentSpec {
    std::string name = "custom";
    std::vector<SizeDistribution> dists;
    std::vector<int> n_values;
    bool resample = true;              // fresh instance per trial
    std::vector<int> b_values;
    std::vector<double> b_fractions;   // alternative: B = round(f * n)
    std::vector<PolicySpec> policies;
    NoiseSpec noise;
    long trials = 10000;
    std::uint64_t seed = 42;
    Estimator estimator = Estimator::RatioOfMeans;
    long enumeration_cap = 100000;
    bool exact = false;
    std::vector<double> bounds_w_grid;  // non-empty: formula table instead of simulation
    int workers = 0;                    // 0 = hardware concurrency
};

struct EstimateRow {
    std::string experiment;
    std::string algorithm;
    int n = 0;
    int b = 0;
    std::optional<double> lambda, rho, p, tau;
    long trials = 0;
    std::string estimator;
    double mean_alg = 0.0, mean_opt = 0.0, ratio = 0.0, std_err = 0.0;
    bool exact = false;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

// One grid coordinate, fully resolved.
struct PointSpec {
    std::string experiment = "custom";
    std::string algorithm = "rr";
    SizeDistribution dist = Explicit{{1.0}};
    int n = 1;
    int b = 0;
    PolicyConfig policy;
    std::optional<double> lambda, rho, p, tau;
    NoiseModel noise = NoNoise{};
    long trials = 1;
    Estimator estimator = Estimator::RatioOfMeans;
    std::uint64_t seed = 42;
    std::uint64_t coord = 0;            // stream key component
    const JobInstance* fixed = nullptr; // set when the instance is not resampled
    bool exact = false;
    long enumeration_cap = 100000;
};

// Monte Carlo (or exact-enumeration) estimate of E[ALG]/OPT at one point.
// Trials use independent streams keyed by (seed, coord, trial).
EstimateRow estimate_ratio(const PointSpec& pt);

struct ExactResult {
    double value = 0.0;
    long outcomes = 0;
};

// Exact expectation over the known subset and the policy's discrete
// randomness, as a uniform average over enumerated outcomes. Supports the
// set-determined policies (CRRR, Switch with distinct breakpoints, RTC,
// round-robin, opt) and mixtures of them.
ExactResult exact_expected_objective(const PolicyConfig& cfg, const JobInstance& x, int b,
                                     long enumeration_cap);

std::vector<EstimateRow> run_experiment(const ExperimentSpec& spec);

// Named figure-reproduction presets: fig1, fig2, fig3-left, fig3-right, fig4.
ExperimentSpec preset(const std::string& name);

std::string csv_header();
void write_csv(const std::vector<EstimateRow>& rows, std::ostream& out);
void write_csv_file(const std::vector<EstimateRow>& rows, const std::string& path);

// Self-contained SVG line chart: one polyline per distinct combination of
// the series fields, optional +-2 std_err bands.
void render_svg(const std::vector<EstimateRow>& rows, const std::string& x_field,
                const std::vector<std::string>& series_fields, const std::string& path,
                bool bands = true);

// Event log dump for the simulate subcommand: time,cause,job,rate_vector.
void write_trace_csv(const ExecutionTrace& trace, std::ostream& out);

// Textual forms used by the CLI and the JSON config file.
SizeDistribution parse_distribution(const std::string& text);
NoiseModel parse_noise(const std::string& text);
NoiseModel noise_at(const NoiseSpec& spec, double tau);

ExperimentSpec spec_from_json_text(const std::string& text);
ExperimentSpec spec_from_json_file(const std::string& path);
std::string spec_to_json_text(const ExperimentSpec& spec);

}  // namespace schedpred
