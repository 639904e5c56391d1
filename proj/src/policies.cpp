#include "schedpred/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace schedpred {

namespace {

PolicyDecision rr_over(const std::vector<int>& members, int n) {
    PolicyDecision d;
    d.rates.assign(static_cast<std::size_t>(n), 0.0);
    double share = 1.0 / static_cast<double>(members.size());
    for (int j : members) d.rates[static_cast<std::size_t>(j)] = share;
    return d;
}

PolicyDecision solo(int job, int n) {
    PolicyDecision d;
    d.rates.assign(static_cast<std::size_t>(n), 0.0);
    d.rates[static_cast<std::size_t>(job)] = 1.0;
    return d;
}

std::vector<int> unfinished_in(const MachineState& s, const std::vector<char>& member) {
    std::vector<int> out;
    for (int i = 0; i < s.n(); ++i) {
        if (!s.finished[static_cast<std::size_t>(i)] && member[static_cast<std::size_t>(i)]) {
            out.push_back(i);
        }
    }
    return out;
}

// Runs a fixed order of jobs sequentially, each to completion.
class SequentialOrderPolicy final : public Policy {
public:
    explicit SequentialOrderPolicy(std::vector<int> order) : order_(std::move(order)) {}

    PolicyDecision decide(const MachineState& s) override {
        for (int j : order_) {
            if (!s.finished[static_cast<std::size_t>(j)]) return solo(j, s.n());
        }
        throw EngineError("sequential policy consulted with all jobs finished");
    }

private:
    std::vector<int> order_;
};

class RoundRobinPolicy final : public Policy {
public:
    PolicyDecision decide(const MachineState& s) override {
        std::vector<int> u;
        for (int i = 0; i < s.n(); ++i) {
            if (!s.finished[static_cast<std::size_t>(i)]) u.push_back(i);
        }
        return rr_over(u, s.n());
    }
};

// Catch-up and resume round-robin. Phase i runs known job pi(i) alone until
// its processed amount reaches the previous known size, then round-robins it
// with the unfinished unknown jobs until it completes.
class CrrrPolicy final : public Policy {
public:
    CrrrPolicy(int n, const PredictionView& view) : unknown_(static_cast<std::size_t>(n), 1) {
        validate_view(view, n);
        size_by_job_.assign(static_cast<std::size_t>(n), 0.0);
        for (std::size_t k = 0; k < view.known.size(); ++k) {
            int j = view.known[k];
            unknown_[static_cast<std::size_t>(j)] = 0;
            size_by_job_[static_cast<std::size_t>(j)] = view.predictions[k];
        }
        order_ = view.known;
        // nondecreasing trusted size, equal sizes by index
        std::sort(order_.begin(), order_.end(), [&](int a, int b) {
            double xa = size_by_job_[static_cast<std::size_t>(a)];
            double xb = size_by_job_[static_cast<std::size_t>(b)];
            return xa != xb ? xa < xb : a < b;
        });
    }

    PolicyDecision decide(const MachineState& s) override {
        std::size_t i = 0;
        while (i < order_.size() && s.finished[static_cast<std::size_t>(order_[i])]) ++i;
        if (i == order_.size()) return rr_over(unfinished_in(s, unknown_), s.n());

        int job = order_[i];
        double target = i == 0 ? 0.0 : size_by_job_[static_cast<std::size_t>(order_[i - 1])];
        double have = s.processed[static_cast<std::size_t>(job)];
        if (have < target - close_tol(target)) {
            PolicyDecision d = solo(job, s.n());
            d.triggers.push_back({job, target});
            return d;
        }
        std::vector<int> members = unfinished_in(s, unknown_);
        members.push_back(job);
        return rr_over(members, s.n());
    }

private:
    std::vector<char> unknown_;
    std::vector<double> size_by_job_;
    std::vector<int> order_;
};

// Alternates round-robin on the unknown jobs with running known jobs to
// completion; known job pi(i) starts once every unknown job is finished or
// has been processed for exactly z_{pi(i)} units.
class SwitchPolicy final : public Policy {
public:
    SwitchPolicy(int n, const BreakpointSet& bp) : unknown_(static_cast<std::size_t>(n), 1) {
        z_by_job_.assign(static_cast<std::size_t>(n), 0.0);
        for (std::size_t k = 0; k < bp.jobs.size(); ++k) {
            unknown_[static_cast<std::size_t>(bp.jobs[k])] = 0;
            z_by_job_[static_cast<std::size_t>(bp.jobs[k])] = bp.z[k];
        }
        order_.reserve(bp.order.size());
        for (int pos : bp.order) order_.push_back(bp.jobs[static_cast<std::size_t>(pos)]);
    }

    PolicyDecision decide(const MachineState& s) override {
        std::size_t i = 0;
        while (i < order_.size() && s.finished[static_cast<std::size_t>(order_[i])]) ++i;
        std::vector<int> u = unfinished_in(s, unknown_);
        if (i == order_.size()) {
            if (u.empty()) throw EngineError("switch consulted with all jobs finished");
            return rr_over(u, s.n());
        }
        int job = order_[i];
        if (u.empty()) return solo(job, s.n());
        double common = s.processed[static_cast<std::size_t>(u.front())];
        double zi = z_by_job_[static_cast<std::size_t>(job)];
        if (zi <= common + close_tol(std::max(zi, common))) {
            return solo(job, s.n());  // phase round-robin already done (or skipped)
        }
        PolicyDecision d = rr_over(u, s.n());
        d.triggers.push_back({u.front(), zi});
        return d;
    }

private:
    std::vector<char> unknown_;
    std::vector<double> z_by_job_;
    std::vector<int> order_;  // known jobs in breakpoint order
};

// Runs the inner policy at rate lambda and round-robin at rate 1-lambda.
// The inner policy observes its own lambda-scaled processed amounts, so its
// triggers are re-expressed as thresholds on the total amounts.
class PreferentialPolicy final : public Policy {
public:
    PreferentialPolicy(double lambda, std::unique_ptr<Policy> inner, int n, bool observes_total)
        : lambda_(lambda),
          inner_(std::move(inner)),
          observes_total_(observes_total),
          virt_(static_cast<std::size_t>(n), 0.0),
          inner_rates_(static_cast<std::size_t>(n), 0.0) {}

    PolicyDecision decide(const MachineState& s) override {
        const int n = s.n();
        std::vector<int> u;
        for (int i = 0; i < n; ++i) {
            if (!s.finished[static_cast<std::size_t>(i)]) u.push_back(i);
        }
        if (lambda_ == 0.0) return rr_over(u, n);
        if (lambda_ == 1.0) return inner_->decide(s);

        double dt = s.now - last_now_;
        last_now_ = s.now;
        for (int i = 0; i < n; ++i) {
            virt_[static_cast<std::size_t>(i)] +=
                lambda_ * inner_rates_[static_cast<std::size_t>(i)] * dt;
        }

        MachineState inner_state;
        inner_state.now = s.now;
        inner_state.processed = observes_total_ ? s.processed : virt_;
        inner_state.finished = s.finished;
        PolicyDecision inner_dec = inner_->decide(inner_state);
        inner_rates_ = inner_dec.rates;

        PolicyDecision d = rr_over(u, n);
        for (double& r : d.rates) r *= 1.0 - lambda_;
        for (int i = 0; i < n; ++i) {
            d.rates[static_cast<std::size_t>(i)] +=
                lambda_ * inner_rates_[static_cast<std::size_t>(i)];
        }
        for (const Trigger& t : inner_dec.triggers) {
            std::size_t uj = static_cast<std::size_t>(t.job);
            if (observes_total_) {
                d.triggers.push_back(t);
                continue;
            }
            double va = lambda_ * inner_rates_[uj];
            if (va <= 0.0) continue;  // virtual amount is frozen; re-derived next event
            double total = s.processed[uj] + (t.threshold - virt_[uj]) * d.rates[uj] / va;
            d.triggers.push_back({t.job, total});
        }
        return d;
    }

private:
    double lambda_;
    std::unique_ptr<Policy> inner_;
    bool observes_total_;
    double last_now_ = 0.0;
    std::vector<double> virt_;
    std::vector<double> inner_rates_;
};

class DelegatePolicy final : public Policy {
public:
    explicit DelegatePolicy(std::unique_ptr<Policy> target) : target_(std::move(target)) {}
    PolicyDecision decide(const MachineState& s) override { return target_->decide(s); }

private:
    std::unique_ptr<Policy> target_;
};

std::vector<int> order_by_value(const std::vector<int>& jobs, const std::vector<double>& value,
                                Rng* tie_rng) {
    std::vector<int> order = jobs;
    if (tie_rng != nullptr) tie_rng->shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return value[static_cast<std::size_t>(a)] < value[static_cast<std::size_t>(b)];
    });
    return order;
}

const PredictionView& require_view(const PolicyContext& ctx, const char* who) {
    if (ctx.view == nullptr) {
        throw std::invalid_argument(std::string(who) + " needs a prediction view");
    }
    return *ctx.view;
}

Rng& require_rng(const PolicyContext& ctx, const char* who) {
    if (ctx.rng == nullptr) {
        throw std::invalid_argument(std::string(who) + " needs a random stream");
    }
    return *ctx.rng;
}

}  // namespace

BreakpointSet make_breakpoints(const PredictionView& view, const std::vector<double>& z, Rng& rng) {
    if (z.size() != view.known.size()) {
        throw std::invalid_argument("breakpoints: one threshold per known job required");
    }
    for (double v : z) {
        if (!(v >= 0.0)) throw std::invalid_argument("breakpoints must be >= 0");
    }
    // breakpoints must induce the prediction order
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            bool zy = z[i] < z[j];
            bool yy = view.predictions[i] < view.predictions[j];
            bool zeq = z[i] == z[j];
            bool yeq = view.predictions[i] == view.predictions[j];
            if (zy != yy || zeq != yeq) {
                throw std::invalid_argument("breakpoints disagree with the prediction order");
            }
        }
    }
    BreakpointSet bp;
    bp.jobs = view.known;
    bp.z = z;
    bp.order.resize(z.size());
    std::iota(bp.order.begin(), bp.order.end(), 0);
    rng.shuffle(bp.order);  // uniform among equal breakpoints after stable sort
    std::stable_sort(bp.order.begin(), bp.order.end(),
                     [&](int a, int b) { return z[static_cast<std::size_t>(a)] < z[static_cast<std::size_t>(b)]; });
    return bp;
}

double sample_breakpoint_multiplier(double rho, Rng& rng) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0,1]");
    if (rho == 0.0) return 1.0;
    return 1.0 + rng.exponential(rho);
}

std::unique_ptr<Policy> make_baseline(BaselineKind kind, const PolicyContext& ctx) {
    switch (kind) {
        case BaselineKind::Opt: {
            if (ctx.truth == nullptr) {
                throw std::invalid_argument("opt is the clairvoyant reference; needs true sizes");
            }
            std::vector<int> jobs(static_cast<std::size_t>(ctx.n));
            std::iota(jobs.begin(), jobs.end(), 0);
            return std::make_unique<SequentialOrderPolicy>(
                order_by_value(jobs, ctx.truth->sizes, nullptr));
        }
        case BaselineKind::RoundRobin:
            return std::make_unique<RoundRobinPolicy>();
        case BaselineKind::Rtc: {
            Rng& rng = require_rng(ctx, "rtc");
            std::vector<int> order(static_cast<std::size_t>(ctx.n));
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            return std::make_unique<SequentialOrderPolicy>(std::move(order));
        }
        case BaselineKind::Spjf: {
            const PredictionView& view = require_view(ctx, "spjf");
            if (view.count() != ctx.n) {
                throw std::invalid_argument("spjf needs predictions for all jobs");
            }
            std::vector<double> y_by_job(static_cast<std::size_t>(ctx.n), 0.0);
            for (std::size_t k = 0; k < view.known.size(); ++k) {
                y_by_job[static_cast<std::size_t>(view.known[k])] = view.predictions[k];
            }
            return std::make_unique<SequentialOrderPolicy>(
                order_by_value(view.known, y_by_job, &require_rng(ctx, "spjf")));
        }
    }
    throw std::invalid_argument("unknown baseline kind");
}

std::unique_ptr<Policy> make_fixed_order_policy(std::vector<int> order) {
    return std::make_unique<SequentialOrderPolicy>(std::move(order));
}

std::unique_ptr<Policy> make_crrr(const PredictionView& view, int n) {
    return std::make_unique<CrrrPolicy>(n, view);
}

std::unique_ptr<Policy> make_switch(const PredictionView& view, BreakpointSet breakpoints, int n) {
    validate_view(view, n);
    return std::make_unique<SwitchPolicy>(n, breakpoints);
}

std::unique_ptr<Policy> make_noisy_switch(const PredictionView& view, double rho, int n, Rng& rng) {
    validate_view(view, n);
    double xi = sample_breakpoint_multiplier(rho, rng);
    std::vector<double> z = view.predictions;
    for (double& v : z) v *= xi;
    return std::make_unique<SwitchPolicy>(n, make_breakpoints(view, z, rng));
}

std::unique_ptr<Policy> make_preferential(double lambda, const PolicyConfig& inner,
                                          const PolicyContext& ctx, bool inner_observes_total) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0,1]");
    if (!std::holds_alternative<SwitchConfig>(inner.v) &&
        !std::holds_alternative<NoisySwitchConfig>(inner.v)) {
        throw std::invalid_argument("preferential inner policy must consume predictions");
    }
    return std::make_unique<PreferentialPolicy>(lambda, make_policy(inner, ctx), ctx.n,
                                                inner_observes_total);
}

std::unique_ptr<Policy> make_mixture(double p, const PolicyConfig& a, const PolicyConfig& b,
                                     const PolicyContext& ctx) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mixture probability must lie in [0,1]");
    Rng& rng = require_rng(ctx, "mixture");
    bool pick_a = rng.bernoulli(p);
    return std::make_unique<DelegatePolicy>(make_policy(pick_a ? a : b, ctx));
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, const PolicyContext& ctx) {
    return std::visit(
        [&](const auto& c) -> std::unique_ptr<Policy> {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, OptConfig>) {
                return make_baseline(BaselineKind::Opt, ctx);
            } else if constexpr (std::is_same_v<T, RoundRobinConfig>) {
                return make_baseline(BaselineKind::RoundRobin, ctx);
            } else if constexpr (std::is_same_v<T, RtcConfig>) {
                return make_baseline(BaselineKind::Rtc, ctx);
            } else if constexpr (std::is_same_v<T, SpjfConfig>) {
                return make_baseline(BaselineKind::Spjf, ctx);
            } else if constexpr (std::is_same_v<T, CrrrConfig>) {
                return make_crrr(require_view(ctx, "crrr"), ctx.n);
            } else if constexpr (std::is_same_v<T, SwitchConfig>) {
                const PredictionView& view = require_view(ctx, "switch");
                return make_switch(view,
                                   make_breakpoints(view, view.predictions,
                                                    require_rng(ctx, "switch")),
                                   ctx.n);
            } else if constexpr (std::is_same_v<T, NoisySwitchConfig>) {
                return make_noisy_switch(require_view(ctx, "noisy-switch"), c.rho, ctx.n,
                                         require_rng(ctx, "noisy-switch"));
            } else if constexpr (std::is_same_v<T, PreferentialConfig>) {
                PolicyConfig inner;
                if (c.inner != nullptr) {
                    inner = *c.inner;
                } else {
                    inner.v = NoisySwitchConfig{0.5};
                }
                return make_preferential(c.lambda, inner, ctx, c.inner_observes_total);
            } else {
                if (c.a == nullptr || c.b == nullptr) {
                    throw std::invalid_argument("mixture needs both component configs");
                }
                return make_mixture(c.p, *c.a, *c.b, ctx);
            }
        },
        cfg.v);
}

PolicyConfig parse_policy_config(const std::string& name, double lambda, double rho, double p) {
    PolicyConfig cfg;
    if (name == "opt") {
        cfg.v = OptConfig{};
    } else if (name == "rr") {
        cfg.v = RoundRobinConfig{};
    } else if (name == "rtc") {
        cfg.v = RtcConfig{};
    } else if (name == "spjf") {
        cfg.v = SpjfConfig{};
    } else if (name == "crrr") {
        cfg.v = CrrrConfig{};
    } else if (name == "switch") {
        cfg.v = SwitchConfig{};
    } else if (name == "noisy-switch") {
        cfg.v = NoisySwitchConfig{rho};
    } else if (name == "preferential") {
        PreferentialConfig pc;
        pc.lambda = lambda;
        pc.inner = std::make_shared<PolicyConfig>(PolicyConfig{NoisySwitchConfig{rho}});
        cfg.v = pc;
    } else if (name == "mixture") {
        MixtureConfig mc;
        mc.p = p;
        mc.a = std::make_shared<PolicyConfig>(PolicyConfig{RtcConfig{}});
        mc.b = std::make_shared<PolicyConfig>(PolicyConfig{SwitchConfig{}});
        cfg.v = mc;
    } else {
        throw std::invalid_argument("unknown policy name: " + name);
    }
    return cfg;
}

std::string policy_name(const PolicyConfig& cfg) {
    return std::visit(
        [](const auto& c) -> std::string {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, OptConfig>) return "opt";
            else if constexpr (std::is_same_v<T, RoundRobinConfig>) return "rr";
            else if constexpr (std::is_same_v<T, RtcConfig>) return "rtc";
            else if constexpr (std::is_same_v<T, SpjfConfig>) return "spjf";
            else if constexpr (std::is_same_v<T, CrrrConfig>) return "crrr";
            else if constexpr (std::is_same_v<T, SwitchConfig>) return "switch";
            else if constexpr (std::is_same_v<T, NoisySwitchConfig>) return "noisy-switch";
            else if constexpr (std::is_same_v<T, PreferentialConfig>) return "preferential";
            else return "mixture";
        },
        cfg.v);
}

}  // namespace schedpred
