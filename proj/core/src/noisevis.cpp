#include "spin1bell/noisevis.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "spin1bell/analyzer.hpp"

namespace spin1bell {

namespace {

void check_p(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("noise parameter p must lie in [0,1], got " +
                                    std::to_string(p));
}

// Golden-section search; maximize = false minimizes. Returns the abscissa.
template <typename F>
double golden(F&& f, double a, double b, double tol, bool maximize)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        const bool move_left = maximize ? (f1 >= f2) : (f1 <= f2);
        if (move_left) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

double fringe_probability(double p, double fixed_angle_deg, double theta_deg)
{
    check_p(p);
    const auto a = outcome_vectors(fixed_angle_deg)[0];  // |2H_F>
    const auto b = outcome_vectors(theta_deg)[2];        // |2V_theta>

    // v = a (x) b against rho = p |psi><psi| + (1-p)/3 sum |e_k><e_k| over the
    // three singlet support vectors (joint indices 2, 4, 6).
    const double v2 = (a[0] * b[2]).real();
    const double v4 = (a[1] * b[1]).real();
    const double v6 = (a[2] * b[0]).real();
    const double overlap = (v2 - v4 + v6) / std::sqrt(3.0);
    return p * overlap * overlap + (1.0 - p) / 3.0 * (v2 * v2 + v4 * v4 + v6 * v6);
}

FringeScan fringe_scan(double p, double fixed_angle_deg, double step_deg)
{
    check_p(p);
    if (!(step_deg > 0.0 && step_deg <= 5.0))
        throw std::invalid_argument("scan step must lie in (0, 5] degrees, got " +
                                    std::to_string(step_deg));

    FringeScan scan;
    scan.fixed_angle_deg = fixed_angle_deg;
    for (int k = 0;; ++k) {
        const double theta = -90.0 + k * step_deg;
        if (theta > 90.0 + 1e-9) break;
        scan.samples.emplace_back(theta,
                                  fringe_probability(p, fixed_angle_deg, theta));
    }
    return scan;
}

double fringe_contrast(double p, double fixed_angle_deg)
{
    check_p(p);
    const auto prob = [&](double theta) {
        return fringe_probability(p, fixed_angle_deg, theta);
    };

    // Locate the fringe maximum: 1 deg grid over one period, then golden
    // refinement (the probability is 180deg-periodic, so brackets may wrap).
    double best_theta = -90.0, best = prob(-90.0);
    for (int k = 1; k < 180; ++k) {
        const double theta = -90.0 + k;
        const double v = prob(theta);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    const double theta_star =
        golden(prob, best_theta - 1.0, best_theta + 1.0, 1e-7, true);

    const double p_max = prob(theta_star);
    const double p_crossed = prob(theta_star - 90.0);
    const double denom = p_max + p_crossed;
    if (denom <= 0.0) return 0.0;
    return (p_max - p_crossed) / denom;
}

double visibility(double p)
{
    check_p(p);
    const auto contrast = [&](double f) { return fringe_contrast(p, f); };

    double best_f = 0.0, best = contrast(0.0);
    for (int k = 1; k <= 90; ++k) {
        const double v = contrast(static_cast<double>(k));
        if (v < best) {
            best = v;
            best_f = k;
        }
    }
    const double lo = std::max(0.0, best_f - 1.0);
    const double hi = std::min(90.0, best_f + 1.0);
    const double f_star = golden(contrast, lo, hi, 0.01, false);
    return std::min(best, contrast(f_star));
}

double p_from_visibility(double v)
{
    if (!(v >= 0.4 && v <= 1.0))
        throw std::invalid_argument(
            "visibility must lie in [0.4, 1] (p >= 1/3 branch), got " +
            std::to_string(v));

    double lo = 1.0 / 3.0, hi = 1.0;
    if (visibility(lo) >= v) return lo;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (visibility(mid) < v)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void write_fringe_csv(std::ostream& os, const FringeScan& scan)
{
    os << "theta_deg,probability\n";
    char buf[64];
    for (const auto& [theta, prob] : scan.samples) {
        std::snprintf(buf, sizeof buf, "%.10g", theta);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.10g", prob);
        os << buf << '\n';
    }
}

} // namespace spin1bell
