#include "schedpred/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace schedpred {

namespace {

void validate_decision(const PolicyDecision& dec, const MachineState& st, int n) {
    if (static_cast<int>(dec.rates.size()) != n) {
        throw ContractViolation("rate vector has wrong length");
    }
    double sum = 0.0;
    bool progress = false;
    for (int i = 0; i < n; ++i) {
        double r = dec.rates[static_cast<std::size_t>(i)];
        if (r < 0.0 || !std::isfinite(r)) throw ContractViolation("negative or non-finite rate");
        if (r > 0.0 && st.finished[static_cast<std::size_t>(i)]) {
            throw ContractViolation("positive rate on finished job");
        }
        if (r > 0.0 && !st.finished[static_cast<std::size_t>(i)]) progress = true;
        sum += r;
    }
    if (sum > 1.0 + 1e-12) throw ContractViolation("rates sum beyond machine capacity");
    if (!progress) throw DeadlockError("all rates zero with unfinished jobs");
    for (const Trigger& t : dec.triggers) {
        if (t.job < 0 || t.job >= n) throw ContractViolation("trigger on invalid job index");
        if (st.finished[static_cast<std::size_t>(t.job)]) {
            throw ContractViolation("trigger on finished job");
        }
        if (!(t.threshold > st.processed[static_cast<std::size_t>(t.job)])) {
            throw ContractViolation("stale trigger: threshold not beyond processed amount");
        }
    }
}

}  // namespace

ExecutionTrace run(Policy& policy, const JobInstance& x, const RunOptions& opts) {
    validate_instance(x);
    const int n = x.n();

    MachineState st;
    st.processed.assign(static_cast<std::size_t>(n), 0.0);
    st.finished.assign(static_cast<std::size_t>(n), 0);

    ExecutionTrace tr;
    tr.completion.assign(static_cast<std::size_t>(n), -1.0);
    if (opts.record_delay_snapshots) {
        tr.processed_at_completion.resize(static_cast<std::size_t>(n));
    }

    int unfinished = n;
    long events_seen = 0;
    std::vector<int> batch;
    batch.reserve(static_cast<std::size_t>(n));

    while (unfinished > 0) {
        PolicyDecision dec = policy.decide(st);
        validate_decision(dec, st, n);
        std::sort(dec.triggers.begin(), dec.triggers.end(), [](const Trigger& a, const Trigger& b) {
            return a.job != b.job ? a.job < b.job : a.threshold < b.threshold;
        });

        // next event: earliest completion or trigger under the current rates
        double dt = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double r = dec.rates[static_cast<std::size_t>(i)];
            if (st.finished[static_cast<std::size_t>(i)] || r <= 0.0) continue;
            dt = std::min(dt, (x.sizes[static_cast<std::size_t>(i)] -
                               st.processed[static_cast<std::size_t>(i)]) / r);
        }
        for (const Trigger& t : dec.triggers) {
            double r = dec.rates[static_cast<std::size_t>(t.job)];
            if (r <= 0.0) continue;
            dt = std::min(dt, (t.threshold - st.processed[static_cast<std::size_t>(t.job)]) / r);
        }
        if (!std::isfinite(dt)) throw EngineError("no reachable event under current rates");
        if (dt < 0.0) dt = 0.0;

        st.now += dt;
        for (int i = 0; i < n; ++i) {
            double r = dec.rates[static_cast<std::size_t>(i)];
            if (!st.finished[static_cast<std::size_t>(i)] && r > 0.0) {
                st.processed[static_cast<std::size_t>(i)] += r * dt;
            }
        }

        // completions first, lower job index first
        batch.clear();
        for (int i = 0; i < n; ++i) {
            std::size_t ui = static_cast<std::size_t>(i);
            if (st.finished[ui] || dec.rates[ui] <= 0.0) continue;
            if (st.processed[ui] >= x.sizes[ui] - close_tol(x.sizes[ui])) {
                st.processed[ui] = x.sizes[ui];
                st.finished[ui] = 1;
                tr.completion[ui] = st.now;
                --unfinished;
                batch.push_back(i);
            }
        }
        if (opts.record_events) {
            for (int i : batch) {
                tr.events.push_back({st.now, EventCause::Completion, i, 0.0, dec.rates});
            }
        }
        if (opts.record_delay_snapshots && !batch.empty()) {
            for (int i : batch) tr.processed_at_completion[static_cast<std::size_t>(i)] = st.processed;
        }
        events_seen += static_cast<long>(batch.size());

        // then fired triggers, in (job, threshold) order
        if (unfinished > 0) {
            for (const Trigger& t : dec.triggers) {
                std::size_t uj = static_cast<std::size_t>(t.job);
                if (st.finished[uj]) continue;  // moot: the job completed at this instant
                if (dec.rates[uj] <= 0.0) continue;
                if (st.processed[uj] >= t.threshold - close_tol(t.threshold)) {
                    st.processed[uj] = std::max(st.processed[uj], t.threshold);
                    if (opts.record_events) {
                        tr.events.push_back(
                            {st.now, EventCause::Trigger, t.job, t.threshold, dec.rates});
                    }
                    ++events_seen;
                }
            }
        }
        if (events_seen > opts.max_events) throw EngineError("event budget exceeded");
    }

    double obj = 0.0;
    for (double t : tr.completion) obj += t;
    tr.objective = obj;
    tr.complete = true;
    return tr;
}

double DelayMatrix::pair_total() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) s += p(i, j);
    }
    return s;
}

DelayMatrix delays_from_trace(const ExecutionTrace& trace, const JobInstance& x) {
    if (!trace.complete) throw std::logic_error("delays need a complete trace");
    const int n = trace.n();
    if (x.n() != n) throw std::invalid_argument("trace/instance size mismatch");
    if (static_cast<int>(trace.processed_at_completion.size()) != n) {
        throw std::logic_error("trace was recorded without delay snapshots");
    }
    DelayMatrix dm;
    dm.n = n;
    dm.directed.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        const auto& snap = trace.processed_at_completion[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            dm.directed[static_cast<std::size_t>(i) * n + j] = snap[static_cast<std::size_t>(i)];
        }
    }
    return dm;
}

}  // namespace schedpred
