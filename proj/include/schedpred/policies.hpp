#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "schedpred/engine.hpp"
#include "schedpred/instances.hpp"
#include "schedpred/rng.hpp"

namespace schedpred {

// Per-known-job thresholds z_i plus an ordering pi with z_{pi(1)} <= ... <=
// z_{pi(B)}; ties are shuffled uniformly at random. The z values must induce
// the same order as the predictions they were derived from.
struct BreakpointSet {
    std::vector<int> jobs;       // known job indices
    std::vector<double> z;       // threshold per entry of jobs
    std::vector<int> order;      // pi, as positions into jobs
};

// Builds the ordering (uniform shuffle within equal z) and checks the
// z/prediction order agreement. Throws std::invalid_argument on violation.
BreakpointSet make_breakpoints(const PredictionView& view, const std::vector<double>& z, Rng& rng);

// Draw of the breakpoint multiplier xi = 1 + Exp(mean rho); xi = 1 when rho = 0.
double sample_breakpoint_multiplier(double rho, Rng& rng);

// --- policy configurations ---------------------------------------------------

struct PolicyConfig;

struct OptConfig {};
struct RoundRobinConfig {};
struct RtcConfig {};
struct SpjfConfig {};
struct CrrrConfig {};
struct SwitchConfig {};                       // breakpoints z_i = y_i
struct NoisySwitchConfig { double rho = 0.0; };
struct PreferentialConfig {
    double lambda = 0.5;
    std::shared_ptr<PolicyConfig> inner;      // defaults to NoisySwitch(rho=0.5)
    // When set, the inner policy consults total processed amounts instead of
    // its own lambda-scaled contribution (sensitivity toggle).
    bool inner_observes_total = false;
};
struct MixtureConfig {
    double p = 0.5;
    std::shared_ptr<PolicyConfig> a;
    std::shared_ptr<PolicyConfig> b;
};

struct PolicyConfig {
    std::variant<OptConfig, RoundRobinConfig, RtcConfig, SpjfConfig, CrrrConfig, SwitchConfig,
                 NoisySwitchConfig, PreferentialConfig, MixtureConfig>
        v;
};

PolicyConfig parse_policy_config(const std::string& name, double lambda, double rho, double p);
std::string policy_name(const PolicyConfig& cfg);

// Everything a policy may be built from. `truth` is consulted only by the
// clairvoyant reference Opt; all other policies see the view alone.
struct PolicyContext {
    int n = 0;
    const JobInstance* truth = nullptr;
    const PredictionView* view = nullptr;
    Rng* rng = nullptr;
};

enum class BaselineKind { Opt, RoundRobin, Rtc, Spjf };

std::unique_ptr<Policy> make_baseline(BaselineKind kind, const PolicyContext& ctx);
// Runs the given order sequentially, each job to completion (RTC with the
// order pinned; also the enumeration oracle's building block).
std::unique_ptr<Policy> make_fixed_order_policy(std::vector<int> order);
std::unique_ptr<Policy> make_crrr(const PredictionView& view, int n);
std::unique_ptr<Policy> make_switch(const PredictionView& view, BreakpointSet breakpoints, int n);
std::unique_ptr<Policy> make_noisy_switch(const PredictionView& view, double rho, int n, Rng& rng);
std::unique_ptr<Policy> make_preferential(double lambda, const PolicyConfig& inner,
                                          const PolicyContext& ctx, bool inner_observes_total = false);
std::unique_ptr<Policy> make_mixture(double p, const PolicyConfig& a, const PolicyConfig& b,
                                     const PolicyContext& ctx);

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, const PolicyContext& ctx);

}  // namespace schedpred
