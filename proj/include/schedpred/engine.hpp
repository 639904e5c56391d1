#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "schedpred/instances.hpp"

namespace schedpred {

// Policy handed the engine rates that are negative, exceed capacity, touch
// finished jobs, or a trigger at or below the current processed amount.
struct ContractViolation : std::runtime_error {
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// All rates zero while jobs remain unfinished.
struct DeadlockError : std::runtime_error {
    explicit DeadlockError(const std::string& what) : std::runtime_error(what) {}
};

struct EngineError : std::runtime_error {
    explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

// Completion comparisons: relative tolerance 1e-9 with absolute floor 1e-12.
inline double close_tol(double ref) {
    double t = 1e-9 * (ref < 0 ? -ref : ref);
    return t > 1e-12 ? t : 1e-12;
}

inline bool nearly_equal(double a, double b) {
    double d = a - b;
    if (d < 0) d = -d;
    return d <= close_tol(a > b ? a : b);
}

// a >= b up to the completion tolerance.
inline bool approx_ge(double a, double b) {
    return a >= b - close_tol((a > b ? a : b) >= 0 ? (a > b ? a : b) : -(a > b ? a : b));
}

// Observable machine state: elapsed time, per-job processed amounts and
// completion flags. Policies never see the true sizes.
struct MachineState {
    double now = 0.0;
    std::vector<double> processed;
    std::vector<char> finished;

    int n() const { return static_cast<int>(processed.size()); }
};

// Re-decision request: fire when job's processed amount reaches threshold.
struct Trigger {
    int job = -1;
    double threshold = 0.0;
};

// Rates over all jobs (finished jobs must have rate 0, sum <= 1 + 1e-12,
// and some unfinished job must have rate > 0) plus re-decision triggers,
// each strictly above the job's current processed amount. Triggers are
// replaced wholesale at every decision.
struct PolicyDecision {
    std::vector<double> rates;
    std::vector<Trigger> triggers;
};

// A scheduling policy. decide() is invoked at t=0, at every completion and
// at every fired trigger; it must be a function of the observable state and
// the policy's own configuration/randomness only.
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyDecision decide(const MachineState& state) = 0;
};

enum class EventCause { Completion, Trigger };

struct TraceEvent {
    double time = 0.0;
    EventCause cause = EventCause::Completion;
    int job = -1;
    double threshold = 0.0;        // trigger events only
    std::vector<double> rates;     // rates in force over the interval ending here
};

struct ExecutionTrace {
    std::vector<double> completion;  // t_i per job
    double objective = 0.0;          // sum of completion times
    bool complete = false;
    std::vector<TraceEvent> events;  // present iff recorded
    // S(t_j) snapshot per job j, indexed by job; present iff recorded
    std::vector<std::vector<double>> processed_at_completion;

    int n() const { return static_cast<int>(completion.size()); }
};

struct RunOptions {
    bool record_events = true;
    bool record_delay_snapshots = true;
    long max_events = 10'000'000;
};

inline RunOptions lean_run_options() {
    RunOptions opts;
    opts.record_events = false;
    opts.record_delay_snapshots = false;
    return opts;
}

// Exact event-driven execution: time advances analytically to the next
// completion or trigger, with no discretization.
ExecutionTrace run(Policy& policy, const JobInstance& x, const RunOptions& opts = {});

// Directed delays D_ij = S_i(t_j) and mutual delays P_ij = D_ij + D_ji.
struct DelayMatrix {
    int n = 0;
    std::vector<double> directed;  // row-major D_ij

    double d(int i, int j) const { return directed[static_cast<std::size_t>(i) * n + j]; }
    double p(int i, int j) const { return d(i, j) + d(j, i); }
    // sum over unordered pairs of P_ij
    double pair_total() const;
};

// Requires a complete trace recorded with delay snapshots.
DelayMatrix delays_from_trace(const ExecutionTrace& trace, const JobInstance& x);

}  // namespace schedpred
