#include "doctest.h"

#include <cmath>

#include "schedpred/analysis.hpp"
#include "schedpred/engine.hpp"
#include "schedpred/policies.hpp"

using namespace schedpred;

namespace {

std::unique_ptr<Policy> round_robin() {
    PolicyContext ctx;
    return make_baseline(BaselineKind::RoundRobin, ctx);
}

std::unique_ptr<Policy> opt_policy(const JobInstance& x) {
    PolicyContext ctx;
    ctx.n = x.n();
    ctx.truth = &x;
    return make_baseline(BaselineKind::Opt, ctx);
}

// Emits whatever decision it is told to; for contract-violation tests.
struct ScriptedPolicy : Policy {
    PolicyDecision next;
    PolicyDecision decide(const MachineState&) override { return next; }
};

}  // namespace

TEST_CASE("single job at full rate") {
    JobInstance x{{5.0}};
    auto p = opt_policy(x);
    ExecutionTrace tr = run(*p, x);
    CHECK(tr.completion[0] == doctest::Approx(5.0));
    CHECK(tr.objective == doctest::Approx(5.0));
    CHECK(tr.events.size() == 1);
}

TEST_CASE("round-robin on equal jobs completes together") {
    JobInstance x{{1.0, 1.0}};
    auto p = round_robin();
    ExecutionTrace tr = run(*p, x);
    CHECK(tr.completion[0] == doctest::Approx(2.0));
    CHECK(tr.completion[1] == doctest::Approx(2.0));
    CHECK(tr.objective == doctest::Approx(4.0));
}

TEST_CASE("round-robin splits then finishes the longer job") {
    JobInstance x{{1.0, 2.0}};
    auto p = round_robin();
    ExecutionTrace tr = run(*p, x);
    CHECK(tr.completion[0] == doctest::Approx(2.0));
    CHECK(tr.completion[1] == doctest::Approx(3.0));
    CHECK(tr.objective == doctest::Approx(5.0));
}

TEST_CASE("delays from traces") {
    JobInstance x{{1.0, 2.0}};
    SUBCASE("opt gives P = min") {
        auto p = opt_policy(x);
        DelayMatrix dm = delays_from_trace(run(*p, x), x);
        CHECK(dm.p(0, 1) == doctest::Approx(1.0));
    }
    SUBCASE("round-robin gives P = 2 min") {
        auto p = round_robin();
        DelayMatrix dm = delays_from_trace(run(*p, x), x);
        CHECK(dm.p(0, 1) == doctest::Approx(2.0));
    }
    SUBCASE("single job has no pairs") {
        JobInstance one{{4.0}};
        auto p = opt_policy(one);
        DelayMatrix dm = delays_from_trace(run(*p, one), one);
        CHECK(dm.n == 1);
        CHECK(dm.pair_total() == 0.0);
    }
    SUBCASE("lean traces refuse the delay computation") {
        auto p = round_robin();
        ExecutionTrace tr = run(*p, x, lean_run_options());
        CHECK_THROWS_AS(delays_from_trace(tr, x), std::logic_error);
    }
}

TEST_CASE("objective decomposes into sizes plus mutual delays") {
    Rng rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        int n = 1 + static_cast<int>(rng.integer(12));
        JobInstance x = sample_instance(Exponential{1.0}, n, rng);
        auto p = round_robin();
        ExecutionTrace tr = run(*p, x);
        DelayMatrix dm = delays_from_trace(tr, x);
        double recon = x.total() + dm.pair_total();
        CHECK(std::abs(recon - tr.objective) <= 1e-9 * tr.objective);
    }
}

TEST_CASE("engine rejects contract violations") {
    JobInstance x{{1.0, 1.0}};
    ScriptedPolicy p;

    SUBCASE("negative rate") {
        p.next.rates = {-0.1, 0.5};
        CHECK_THROWS_AS(run(p, x), ContractViolation);
    }
    SUBCASE("over capacity") {
        p.next.rates = {0.7, 0.7};
        CHECK_THROWS_AS(run(p, x), ContractViolation);
    }
    SUBCASE("all rates zero deadlocks") {
        p.next.rates = {0.0, 0.0};
        CHECK_THROWS_AS(run(p, x), DeadlockError);
    }
    SUBCASE("stale trigger") {
        p.next.rates = {0.5, 0.5};
        p.next.triggers = {{0, 0.0}};
        CHECK_THROWS_AS(run(p, x), ContractViolation);
    }
    SUBCASE("wrong rate vector length") {
        p.next.rates = {1.0};
        CHECK_THROWS_AS(run(p, x), ContractViolation);
    }
}

TEST_CASE("capacity and termination invariants hold on the event log") {
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 2 + static_cast<int>(rng.integer(10));
        JobInstance x = sample_instance(Pareto{1.0, 1.5}, n, rng);
        auto known = sample_known_subset(n, n / 2, rng);
        PredictionView view = apply_noise(x, known, NoNoise{}, rng);
        auto p = make_crrr(view, n);
        ExecutionTrace tr = run(*p, x);

        double last_time = -1.0;
        long triggers = 0;
        for (const TraceEvent& ev : tr.events) {
            CHECK(ev.time >= last_time);
            last_time = ev.time;
            double sum = 0;
            for (double r : ev.rates) {
                CHECK(r >= 0.0);
                sum += r;
            }
            CHECK(sum <= 1.0 + 1e-12);
            if (ev.cause == EventCause::Trigger) ++triggers;
        }
        CHECK(static_cast<long>(tr.events.size()) <= n + triggers);
        CHECK(tr.events.back().cause == EventCause::Completion);
        CHECK(tr.events.back().time == doctest::Approx(tr.completion[static_cast<std::size_t>(
                  tr.events.back().job)]));
        // conservation: all jobs fully processed at their completion snapshot
        for (int i = 0; i < n; ++i) {
            double got = tr.processed_at_completion[static_cast<std::size_t>(i)]
                                                   [static_cast<std::size_t>(i)];
            CHECK(std::abs(got - x.sizes[static_cast<std::size_t>(i)]) <=
                  1e-9 * x.sizes[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("identical seeds give identical traces") {
    JobInstance x{{2.0, 1.0, 4.0, 3.0}};
    PredictionView view{{1, 3}, {1.0, 3.0}};
    for (int rep = 0; rep < 2; ++rep) {
        Rng ra(77), rb(77);
        auto pa = make_noisy_switch(view, 0.5, x.n(), ra);
        auto pb = make_noisy_switch(view, 0.5, x.n(), rb);
        ExecutionTrace ta = run(*pa, x);
        ExecutionTrace tb = run(*pb, x);
        CHECK(ta.completion == tb.completion);
        REQUIRE(ta.events.size() == tb.events.size());
        for (std::size_t i = 0; i < ta.events.size(); ++i) {
            CHECK(ta.events[i].time == tb.events[i].time);
            CHECK(ta.events[i].job == tb.events[i].job);
            CHECK(ta.events[i].rates == tb.events[i].rates);
        }
    }
}
