#include "schedpred/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace schedpred {

double JobInstance::total() const {
    return std::accumulate(sizes.begin(), sizes.end(), 0.0);
}

void validate_instance(const JobInstance& x) {
    if (x.sizes.empty()) throw std::invalid_argument("instance needs at least one job");
    for (double s : x.sizes) {
        if (!(s > 0.0)) throw std::invalid_argument("job sizes must be strictly positive");
    }
}

std::optional<double> PredictionView::prediction_for(int job) const {
    for (std::size_t i = 0; i < known.size(); ++i) {
        if (known[i] == job) return predictions[i];
    }
    return std::nullopt;
}

void validate_view(const PredictionView& view, int n) {
    if (view.known.size() != view.predictions.size()) {
        throw std::invalid_argument("prediction view: index/value length mismatch");
    }
    if (static_cast<int>(view.known.size()) > n) {
        throw std::invalid_argument("prediction view: more known jobs than jobs");
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int idx : view.known) {
        if (idx < 0 || idx >= n) throw std::invalid_argument("prediction view: index out of range");
        if (seen[static_cast<std::size_t>(idx)]) {
            throw std::invalid_argument("prediction view: duplicate index");
        }
        seen[static_cast<std::size_t>(idx)] = 1;
    }
    for (double y : view.predictions) {
        if (!(y >= 0.0)) throw std::invalid_argument("prediction view: negative prediction");
    }
}

void validate_distribution(const SizeDistribution& dist) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                if (!(d.rate > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
            } else if constexpr (std::is_same_v<T, TruncatedPolyTail>) {
                if (!(d.r > 0.5 && d.r <= 1.0)) {
                    throw std::invalid_argument("poly-tail exponent r must lie in (1/2, 1]");
                }
                if (!(d.a > 0.0)) throw std::invalid_argument("poly-tail cutoff a must be > 0");
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (!(d.scale > 0.0) || !(d.shape > 0.0)) {
                    throw std::invalid_argument("pareto scale and shape must be > 0");
                }
            } else if constexpr (std::is_same_v<T, TwoPoint>) {
                if (!(d.v1 > 0.0) || !(d.v2 > 0.0)) {
                    throw std::invalid_argument("two-point values must be > 0");
                }
                if (!(d.p >= 0.0 && d.p <= 1.0)) {
                    throw std::invalid_argument("two-point probability must lie in [0,1]");
                }
            } else if constexpr (std::is_same_v<T, Constant>) {
                if (!(d.v > 0.0)) throw std::invalid_argument("constant size must be > 0");
            } else if constexpr (std::is_same_v<T, Explicit>) {
                if (d.sizes.empty()) throw std::invalid_argument("explicit size list is empty");
                for (double s : d.sizes) {
                    if (!(s > 0.0)) throw std::invalid_argument("explicit sizes must be > 0");
                }
            }
        },
        dist);
}

std::string distribution_label(const SizeDistribution& dist) {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return "exp:" + std::to_string(d.rate);
            } else if constexpr (std::is_same_v<T, TruncatedPolyTail>) {
                return "polytail:" + std::to_string(d.r) + "," + std::to_string(d.a);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                return "pareto:" + std::to_string(d.scale) + "," + std::to_string(d.shape);
            } else if constexpr (std::is_same_v<T, TwoPoint>) {
                return "twopoint:" + std::to_string(d.v1) + "," + std::to_string(d.v2) + "," +
                       std::to_string(d.p);
            } else if constexpr (std::is_same_v<T, Constant>) {
                return "const:" + std::to_string(d.v);
            } else {
                return "explicit";
            }
        },
        dist);
}

namespace {

// Inverse tail CDF of the truncated poly-tail family: for u in (0,1),
// s = u*(1 - (1+a)^-r) + (1+a)^-r and x = s^(-1/r) - 1, which lands in (0,a).
double sample_poly_tail(const TruncatedPolyTail& d, Rng& rng) {
    double u = rng.uniform01();
    double cut = std::pow(1.0 + d.a, -d.r);
    double s = u * (1.0 - cut) + cut;
    return std::pow(s, -1.0 / d.r) - 1.0;
}

}  // namespace

JobInstance sample_instance(const SizeDistribution& dist, int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("instance needs at least one job");
    validate_distribution(dist);
    JobInstance x;
    x.sizes.reserve(static_cast<std::size_t>(n));
    if (const auto* e = std::get_if<Explicit>(&dist)) {
        if (static_cast<int>(e->sizes.size()) != n) {
            throw std::invalid_argument("explicit size list length does not match n");
        }
        x.sizes = e->sizes;
        return x;
    }
    for (int i = 0; i < n; ++i) {
        double s = std::visit(
            [&rng](const auto& d) -> double {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return rng.exponential(1.0 / d.rate);
                } else if constexpr (std::is_same_v<T, TruncatedPolyTail>) {
                    return sample_poly_tail(d, rng);
                } else if constexpr (std::is_same_v<T, Pareto>) {
                    return d.scale * std::pow(rng.uniform01(), -1.0 / d.shape);
                } else if constexpr (std::is_same_v<T, TwoPoint>) {
                    return rng.bernoulli(d.p) ? d.v1 : d.v2;
                } else if constexpr (std::is_same_v<T, Constant>) {
                    return d.v;
                } else {
                    return 0.0;  // unreachable; Explicit handled above
                }
            },
            dist);
        x.sizes.push_back(s);
    }
    return x;
}

void validate_noise(const NoiseModel& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GaussianNoise> || std::is_same_v<T, UniformNoise>) {
                if (!(m.tau >= 0.0)) throw std::invalid_argument("noise tau must be >= 0");
            } else if constexpr (std::is_same_v<T, AdversarialConstant>) {
                if (!(m.c >= 0.0)) throw std::invalid_argument("adversarial constant must be >= 0");
            }
        },
        model);
}

std::string noise_label(const NoiseModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NoNoise>) {
                return "none";
            } else if constexpr (std::is_same_v<T, GaussianNoise>) {
                return "gaussian:" + std::to_string(m.tau);
            } else if constexpr (std::is_same_v<T, UniformNoise>) {
                return "uniform:" + std::to_string(m.tau);
            } else {
                return "const:" + std::to_string(m.c);
            }
        },
        model);
}

std::vector<int> sample_known_subset(int n, int b, Rng& rng) {
    if (n < 0 || b < 0 || b > n) throw std::invalid_argument("known subset needs 0 <= B <= n");
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates: the first b entries form a uniform ordered prefix
    for (int i = 0; i < b; ++i) {
        std::size_t j = static_cast<std::size_t>(i) +
                        static_cast<std::size_t>(rng.integer(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(b));
    return idx;
}

PredictionView apply_noise(const JobInstance& x, const std::vector<int>& known,
                           const NoiseModel& model, Rng& rng) {
    validate_noise(model);
    PredictionView view;
    view.known = known;
    view.predictions.reserve(known.size());
    for (int idx : known) {
        if (idx < 0 || idx >= x.n()) throw std::invalid_argument("known index out of range");
        double xi = x.sizes[static_cast<std::size_t>(idx)];
        double y = std::visit(
            [&](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, NoNoise>) {
                    return xi;
                } else if constexpr (std::is_same_v<T, GaussianNoise>) {
                    return xi + m.tau * rng.gaussian();
                } else if constexpr (std::is_same_v<T, UniformNoise>) {
                    return xi + rng.uniform(-m.tau, m.tau);
                } else {
                    return m.c;
                }
            },
            model);
        view.predictions.push_back(std::max(y, 0.0));
    }
    return view;
}

double prediction_error(const JobInstance& x, const PredictionView& view) {
    validate_view(view, x.n());
    double eta = 0.0;
    for (std::size_t i = 0; i < view.known.size(); ++i) {
        eta += std::abs(x.sizes[static_cast<std::size_t>(view.known[i])] - view.predictions[i]);
    }
    return eta;
}

}  // namespace schedpred
