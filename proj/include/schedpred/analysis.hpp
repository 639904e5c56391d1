#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <variant>

#include "schedpred/instances.hpp"

namespace schedpred {

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// --- closed-form objectives ---------------------------------------------------

// OPT(x) = sum x_i + sum_{i<j} min(x_i, x_j)
double opt_objective(const JobInstance& x);
// RR(x) = sum x_i + 2 sum_{i<j} min(x_i, x_j)
double round_robin_objective(const JobInstance& x);
// E[RTC(x)] = (n+1)/2 * sum x_i
double rtc_expected_objective(const JobInstance& x);

enum class ClosedFormKind { Opt, RoundRobin, RtcExpected };
double closed_form_objective(ClosedFormKind kind, const JobInstance& x);

// --- phi families for the lower-bound machinery -------------------------------

struct ExpPhi {};                          // phi(t) = e^t
struct PolyTailPhi { double r = 0.51; };   // phi(t) = (1+t)^r, r in (1/2, 1]
using PhiFamily = std::variant<ExpPhi, PolyTailPhi>;

double phi(const PhiFamily& fam, double t);
double phi_derivative(const PhiFamily& fam, double t);
double integral_inv_phi(const PhiFamily& fam);     // may be +inf
double integral_inv_phi_sq(const PhiFamily& fam);

// G_phi(x,T) = int_0^{T-x} dt/phi(t) + x/phi(T-x), by adaptive quadrature
// (absolute tolerance 1e-9). Requires T >= x > 0.
double g_phi(const PhiFamily& fam, double x, double t_max);

// inf over T >= x of G_phi(x,T), in closed form.
double inf_g_phi(const PhiFamily& fam, double x);
// Same infimum by golden-section search on a compactified T axis
// (tolerance 1e-8); cross-check for the closed form.
double inf_g_phi_numeric(const PhiFamily& fam, double x);

// alpha_phi = [int inf_T G_phi(x,T) phi'(x)/phi(x)^2 dx] / [int dt/phi(t)^2],
// by adaptive quadrature with relative tolerance 1e-6.
double alpha_phi(const PhiFamily& fam);

// --- bound formulas -------------------------------------------------------------

struct BoundQuery {
    int n = 2;
    int b = 0;
    double w = 0.0;        // B = wn + o(n) asymptotics
    double rho = 0.5;
    double lambda = 0.5;
    double error = 0.0;    // normalized error e = n E[eta^sigma] / OPT
};

void validate_bound_query(const BoundQuery& q);

// Competitive-ratio guarantees of the algorithm catalog.
std::pair<double, double> crrr_ratio_range(const BoundQuery& q);
double switch_perfect_ratio(const BoundQuery& q);
double mixture_perfect_ratio(const BoundQuery& q);
// Mixture weight on RTC: 2(n-B) / (n(n+3) - 2B).
double mixture_rtc_probability(int n, int b);

struct SmoothnessBound {
    double consistency = 0.0;   // C = 2 - B/n + rho (B/n)(1 - (B-1)/(n-1))
    double sensitivity = 0.0;   // S = (4/rho)(1 - B/n) + B/n
    double standard = 0.0;      // C + S*e
    double precise = 0.0;       // C - 2(C-1)/(n+1) + S*e (tighter form)
};
SmoothnessBound noisy_switch_bound(const BoundQuery& q);

// min( 2/(1-lambda), C/lambda + (S/lambda) e )
double preferential_bound(const BoundQuery& q);

// Lower bounds on the achievable (n,B)-competitive ratio.
double lb_exponential_finite(const BoundQuery& q);
double lb_generic_finite(const PhiFamily& fam, const BoundQuery& q);
double lb_generic_asymptotic(const PhiFamily& fam, double w);
double lb_heavy_tail_asymptotic(double w);

// Constants of the randomized-breakpoint analysis for the shifted
// exponential multiplier law, with grid verification of beta and gamma.
struct BreakpointLawConstants {
    double rho = 0.0;
    double beta = 0.0;       // sup_{s in (0,1]} g(s)/s
    double gamma = 0.0;      // sup_{s >= 1} (g(s) + s)
    double lipschitz = 0.0;  // Lipschitz constant of h(s,.)
    double mean_multiplier = 0.0;

    double g(double s) const;
    double c1(int n, int b) const;  // delay coefficient
    double c2(int n, int b) const;  // error coefficient
    double grid_beta(int points = 1000) const;
    double grid_gamma(double s_max = 100.0, int points = 1000) const;
};
BreakpointLawConstants breakpoint_law_constants(double rho);

// Adaptive Simpson on a finite interval; shared by the quadrature routines.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace schedpred
