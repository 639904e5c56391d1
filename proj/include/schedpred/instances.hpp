#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "schedpred/rng.hpp"

namespace schedpred {

// True job sizes x_1..x_n, hidden from non-clairvoyant policies.
struct JobInstance {
    std::vector<double> sizes;

    int n() const { return static_cast<int>(sizes.size()); }
    double total() const;
};

// Throws std::invalid_argument unless every size is > 0 and n >= 1.
void validate_instance(const JobInstance& x);

// The known subset (an ordered B-prefix of a random permutation) and the
// predicted size for each known job.
struct PredictionView {
    std::vector<int> known;          // distinct job indices
    std::vector<double> predictions; // y value per known index, >= 0

    int count() const { return static_cast<int>(known.size()); }
    std::optional<double> prediction_for(int job) const;
};

void validate_view(const PredictionView& view, int n);

// --- size distributions -----------------------------------------------------

struct Exponential { double rate = 1.0; };

// Tail Pr(x >= t) = ((1+t)^-r - (1+a)^-r) / (1 - (1+a)^-r) for t < a.
struct TruncatedPolyTail { double r = 0.51; double a = 1e4; };

struct Pareto { double scale = 1.0; double shape = 1.1; };

// v1 with probability p, otherwise v2.
struct TwoPoint { double v1 = 1.0; double v2 = 2.0; double p = 0.5; };

struct Constant { double v = 1.0; };

struct Explicit { std::vector<double> sizes; };

using SizeDistribution =
    std::variant<Exponential, TruncatedPolyTail, Pareto, TwoPoint, Constant, Explicit>;

void validate_distribution(const SizeDistribution& dist);
std::string distribution_label(const SizeDistribution& dist);

// n i.i.d. draws (Explicit returns its list, which must have length n).
JobInstance sample_instance(const SizeDistribution& dist, int n, Rng& rng);

// --- prediction noise --------------------------------------------------------

struct NoNoise {};
struct GaussianNoise { double tau = 0.0; };
struct UniformNoise { double tau = 0.0; };
// y_i = c regardless of x_i; stress input for robustness tests.
struct AdversarialConstant { double c = 0.0; };

using NoiseModel = std::variant<NoNoise, GaussianNoise, UniformNoise, AdversarialConstant>;

void validate_noise(const NoiseModel& model);
std::string noise_label(const NoiseModel& model);

// Ordered list of B distinct indices, uniform over B-prefixes of random
// permutations of [n].
std::vector<int> sample_known_subset(int n, int b, Rng& rng);

// y_i = max(x_i + eps_i, 0) for each known index (negative draws clamp to 0).
PredictionView apply_noise(const JobInstance& x, const std::vector<int>& known,
                           const NoiseModel& model, Rng& rng);

// Total error eta^sigma = sum over known indices of |x_i - y_i|.
double prediction_error(const JobInstance& x, const PredictionView& view);

}  // namespace schedpred
