#include "schedpred/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace schedpred {

namespace {

double pair_min_sum(const JobInstance& x) {
    // sum_{i<j} min(x_i, x_j) = sum_k (n-1-k) * sorted_x[k]
    std::vector<double> s = x.sizes;
    std::sort(s.begin(), s.end());
    double total = 0.0;
    const std::size_t n = s.size();
    for (std::size_t k = 0; k < n; ++k) total += static_cast<double>(n - 1 - k) * s[k];
    return total;
}

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double sum = left + right;
    if (depth <= 0 || std::abs(sum - whole) <= 15.0 * tol) {
        return sum + (sum - whole) / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double fa = f(a);
    double fb = f(b);
    double m = 0.5 * (a + b);
    double fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double result = simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
    if (!std::isfinite(result)) throw NumericError("quadrature did not converge");
    return result;
}

double opt_objective(const JobInstance& x) {
    validate_instance(x);
    return x.total() + pair_min_sum(x);
}

double round_robin_objective(const JobInstance& x) {
    validate_instance(x);
    return x.total() + 2.0 * pair_min_sum(x);
}

double rtc_expected_objective(const JobInstance& x) {
    validate_instance(x);
    return 0.5 * (x.n() + 1) * x.total();
}

double closed_form_objective(ClosedFormKind kind, const JobInstance& x) {
    switch (kind) {
        case ClosedFormKind::Opt: return opt_objective(x);
        case ClosedFormKind::RoundRobin: return round_robin_objective(x);
        case ClosedFormKind::RtcExpected: return rtc_expected_objective(x);
    }
    throw std::invalid_argument("unknown closed-form kind");
}

// --- phi families --------------------------------------------------------------

namespace {

void validate_family(const PhiFamily& fam) {
    if (const auto* p = std::get_if<PolyTailPhi>(&fam)) {
        if (!(p->r > 0.5 && p->r <= 1.0)) {
            throw std::invalid_argument("poly-tail exponent r must lie in (1/2, 1]");
        }
    }
}

// Numerically safe e^-t.
double exp_neg(double t) { return t > 700.0 ? 0.0 : std::exp(-t); }

}  // namespace

double phi(const PhiFamily& fam, double t) {
    validate_family(fam);
    if (std::holds_alternative<ExpPhi>(fam)) return std::exp(t);
    return std::pow(1.0 + t, std::get<PolyTailPhi>(fam).r);
}

double phi_derivative(const PhiFamily& fam, double t) {
    validate_family(fam);
    if (std::holds_alternative<ExpPhi>(fam)) return std::exp(t);
    double r = std::get<PolyTailPhi>(fam).r;
    return r * std::pow(1.0 + t, r - 1.0);
}

double integral_inv_phi(const PhiFamily& fam) {
    validate_family(fam);
    if (std::holds_alternative<ExpPhi>(fam)) return 1.0;
    return std::numeric_limits<double>::infinity();
}

double integral_inv_phi_sq(const PhiFamily& fam) {
    validate_family(fam);
    if (std::holds_alternative<ExpPhi>(fam)) return 0.5;
    return 1.0 / (2.0 * std::get<PolyTailPhi>(fam).r - 1.0);
}

double g_phi(const PhiFamily& fam, double x, double t_max) {
    validate_family(fam);
    if (!(x > 0.0)) throw std::invalid_argument("g_phi needs x > 0");
    if (!(t_max >= x)) throw std::invalid_argument("g_phi needs T >= x");
    double span = t_max - x;
    double integral = span > 0.0
        ? integrate([&](double t) { return 1.0 / phi(fam, t); }, 0.0, span, 1e-10)
        : 0.0;
    return integral + x / phi(fam, span);
}

namespace {

// Closed-form G for the built-in families (used by the numeric minimizer).
double g_closed(const PhiFamily& fam, double x, double span) {
    if (std::holds_alternative<ExpPhi>(fam)) {
        return 1.0 + (x - 1.0) * exp_neg(span);
    }
    double r = std::get<PolyTailPhi>(fam).r;
    if (r > 0.999) {
        return std::log1p(span) + x / (1.0 + span);
    }
    return (std::pow(1.0 + span, 1.0 - r) - 1.0) / (1.0 - r) + x * std::pow(1.0 + span, -r);
}

}  // namespace

double inf_g_phi(const PhiFamily& fam, double x) {
    validate_family(fam);
    if (!(x > 0.0)) throw std::invalid_argument("inf_g_phi needs x > 0");
    if (std::holds_alternative<ExpPhi>(fam)) {
        return x < 1.0 ? x : 1.0;
    }
    double r = std::get<PolyTailPhi>(fam).r;
    if (x <= 1.0 / r) return x;
    if (r > 0.999) return 1.0 + std::log(x);
    return -1.0 / (1.0 - r) + std::pow(r * x, 1.0 - r) / (r * (1.0 - r));
}

double inf_g_phi_numeric(const PhiFamily& fam, double x) {
    validate_family(fam);
    if (!(x > 0.0)) throw std::invalid_argument("inf_g_phi needs x > 0");
    // span = T - x compactified as span = u/(1-u), u in [0, 1)
    auto value = [&](double u) { return g_closed(fam, x, u / (1.0 - u)); };
    const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0 - 1e-12;
    double c = hi - inv_golden * (hi - lo);
    double d = lo + inv_golden * (hi - lo);
    double fc = value(c), fd = value(d);
    while (hi - lo > 1e-8) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - inv_golden * (hi - lo);
            fc = value(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + inv_golden * (hi - lo);
            fd = value(d);
        }
    }
    double mid = value(0.5 * (lo + hi));
    // the infimum may sit on the boundary
    return std::min({mid, value(0.0), value(1.0 - 1e-12)});
}

namespace {

double alpha_exp_phi() {
    // kink of inf_T G at x = 1; tail mapped to [0,1) via x = 1 + v/(1-v)
    double head = integrate([](double x) { return x * exp_neg(x); }, 0.0, 1.0, 1e-11);
    double tail = integrate(
        [](double v) {
            double x = 1.0 + v / (1.0 - v);
            return exp_neg(x) / ((1.0 - v) * (1.0 - v));
        },
        0.0, 1.0 - 1e-12, 1e-11);
    double denom = integrate(
        [](double u) {
            double t = u / (1.0 - u);
            return exp_neg(2.0 * t) / ((1.0 - u) * (1.0 - u));
        },
        0.0, 1.0 - 1e-12, 1e-11);
    return (head + tail) / denom;
}

// For phi = (1+x)^r the tail integrand decays like x^-2r, so the improper
// part is evaluated in s = 1/(1+x) with its power-law singular piece split
// off in closed form.
double alpha_poly_tail(double r) {
    double head = integrate(
        [r](double x) { return x * r * std::pow(1.0 + x, -1.0 - r); }, 0.0, 1.0 / r, 1e-11);

    double tail;
    if (r > 0.999) {
        // inf_T G = 1 + log x beyond x = 1; in s = 1/(1+x):
        // int_0^1/2 (1 + log(1-s) - log s) ds, with the -log s part exact
        double minus_log = 0.5 - 0.5 * std::log(0.5);
        double smooth = integrate(
            [](double s) { return 1.0 + std::log1p(-s); }, 0.0, 0.5, 1e-11);
        tail = minus_log + smooth;
    } else {
        double s_star = r / (1.0 + r);
        double t_const = -std::pow(1.0 + 1.0 / r, -r) / (1.0 - r);
        double j_singular = std::pow(s_star, 2.0 * r - 1.0) / (2.0 * r - 1.0);
        double j_regular = integrate(
            [r](double s) {
                if (s <= 0.0) return 0.0;
                return std::pow(s, 2.0 * r - 2.0) * (std::pow(1.0 - s, 1.0 - r) - 1.0);
            },
            0.0, s_star, 1e-11);
        tail = t_const + std::pow(r, 1.0 - r) / (1.0 - r) * (j_singular + j_regular);
    }
    double denom = 1.0 / (2.0 * r - 1.0);
    return (head + tail) / denom;
}

}  // namespace

double alpha_phi(const PhiFamily& fam) {
    validate_family(fam);
    if (std::holds_alternative<ExpPhi>(fam)) return alpha_exp_phi();
    return alpha_poly_tail(std::get<PolyTailPhi>(fam).r);
}

// --- bound formulas -------------------------------------------------------------

void validate_bound_query(const BoundQuery& q) {
    if (q.n < 2) throw std::invalid_argument("bounds need n >= 2");
    if (q.b < 0 || q.b > q.n) throw std::invalid_argument("bounds need 0 <= B <= n");
    if (!(q.w >= 0.0 && q.w <= 1.0)) throw std::invalid_argument("w must lie in [0,1]");
    if (!(q.error >= 0.0)) throw std::invalid_argument("normalized error must be >= 0");
}

namespace {

double fraction(const BoundQuery& q) { return static_cast<double>(q.b) / q.n; }

// (B/n)(1 - (B-1)/(n-1)); zero at B = 0 and B = n.
double overlap_term(const BoundQuery& q) {
    if (q.b == 0) return 0.0;
    return fraction(q) * (1.0 - static_cast<double>(q.b - 1) / (q.n - 1));
}

}  // namespace

std::pair<double, double> crrr_ratio_range(const BoundQuery& q) {
    validate_bound_query(q);
    double f = fraction(q);
    double upper = 2.0 - f;
    double lower = upper - 2.0 * (1.0 - f) / (static_cast<double>(q.n + 1) * (q.b + 1));
    return {lower, upper};
}

double switch_perfect_ratio(const BoundQuery& q) {
    validate_bound_query(q);
    double f = fraction(q);
    return 2.0 - f - 2.0 * (1.0 - f) / (q.n + 1);
}

double mixture_perfect_ratio(const BoundQuery& q) {
    validate_bound_query(q);
    double f = fraction(q);
    return 2.0 - f - 2.0 * (1.0 - f) * (2.0 - f) / (q.n + 3.0 - 2.0 * f);
}

double mixture_rtc_probability(int n, int b) {
    BoundQuery q;
    q.n = n;
    q.b = b;
    validate_bound_query(q);
    return 2.0 * (n - b) / (static_cast<double>(n) * (n + 3) - 2.0 * b);
}

SmoothnessBound noisy_switch_bound(const BoundQuery& q) {
    validate_bound_query(q);
    if (!(q.rho <= 1.0) || (q.b < q.n && !(q.rho > 0.0))) {
        throw std::invalid_argument("smoothness bound needs rho in (0,1] when B < n");
    }
    double f = fraction(q);
    SmoothnessBound out;
    out.consistency = 2.0 - f + q.rho * overlap_term(q);
    out.sensitivity = (q.b < q.n ? 4.0 / q.rho * (1.0 - f) : 0.0) + f;
    out.standard = out.consistency + out.sensitivity * q.error;
    out.precise = out.consistency - 2.0 * (out.consistency - 1.0) / (q.n + 1) +
                  out.sensitivity * q.error;
    return out;
}

double preferential_bound(const BoundQuery& q) {
    if (!(q.lambda > 0.0 && q.lambda < 1.0)) {
        throw std::invalid_argument("preferential bound needs lambda in (0,1)");
    }
    SmoothnessBound sw = noisy_switch_bound(q);
    double robustness = 2.0 / (1.0 - q.lambda);
    return std::min(robustness, sw.standard / q.lambda);
}

double lb_exponential_finite(const BoundQuery& q) {
    validate_bound_query(q);
    double c = 2.0 - fraction(q) - (4.0 / std::exp(1.0) - 1.0) * overlap_term(q);
    return c - 4.0 * (c - 1.0) / (q.n + 3);
}

double lb_generic_finite(const PhiFamily& fam, const BoundQuery& q) {
    validate_bound_query(q);
    double mean = integral_inv_phi(fam);
    if (!std::isfinite(mean)) {
        throw std::invalid_argument(
            "finite lower bound needs a finite-expectation family (int 1/phi < inf)");
    }
    double alpha = alpha_phi(fam);
    double c = 2.0 - fraction(q) - (3.0 - 2.0 * alpha) * overlap_term(q);
    double ratio = integral_inv_phi_sq(fam) / mean;
    return c - (c - 1.0) / (1.0 + 0.5 * (q.n - 1) * ratio);
}

double lb_generic_asymptotic(const PhiFamily& fam, double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("w must lie in [0,1]");
    double alpha = alpha_phi(fam);
    return 2.0 - 2.0 * (2.0 - alpha) * w + (3.0 - 2.0 * alpha) * w * w;
}

double lb_heavy_tail_asymptotic(double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("w must lie in [0,1]");
    return (2.0 - w) - (3.0 - 2.0 * std::sqrt(2.0)) * w * (1.0 - w);
}

// --- breakpoint law constants ---------------------------------------------------

double BreakpointLawConstants::g(double s) const {
    if (s <= 1.0) return 0.0;
    return (2.0 + rho) - s - (1.0 + rho) * exp_neg((s - 1.0) / rho);
}

double BreakpointLawConstants::c1(int n, int b) const {
    BoundQuery q;
    q.n = n;
    q.b = b;
    validate_bound_query(q);
    return 2.0 - fraction(q) - (2.0 - beta - gamma) * overlap_term(q);
}

double BreakpointLawConstants::c2(int n, int b) const {
    BoundQuery q;
    q.n = n;
    q.b = b;
    validate_bound_query(q);
    return (1.0 + lipschitz + mean_multiplier) * (n - b) + b - 1.0;
}

double BreakpointLawConstants::grid_beta(int points) const {
    double sup = 0.0;
    for (int i = 1; i <= points; ++i) {
        double s = static_cast<double>(i) / points;
        sup = std::max(sup, g(s) / s);
    }
    return sup;
}

double BreakpointLawConstants::grid_gamma(double s_max, int points) const {
    double sup = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= points; ++i) {
        double s = 1.0 + (s_max - 1.0) * static_cast<double>(i) / points;
        sup = std::max(sup, g(s) + s);
    }
    return sup;
}

BreakpointLawConstants breakpoint_law_constants(double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0,1]");
    BreakpointLawConstants out;
    out.rho = rho;
    out.beta = 0.0;
    out.gamma = 2.0 + rho;
    out.lipschitz = 1.0 / rho;
    out.mean_multiplier = 1.0 + rho;
    return out;
}

}  // namespace schedpred
