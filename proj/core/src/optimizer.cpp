#include "spin1bell/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "spin1bell/noisevis.hpp"

namespace spin1bell {

namespace {

template <typename F>
double golden_max(F&& f, double a, double b, double tol)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 >= f2) {
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

std::vector<CurvePoint> scan_dphi(double p, double start, double stop, double step)
{
    if (!(step > 0.0))
        throw std::invalid_argument("scan step must be positive, got " +
                                    std::to_string(step));
    if (!(stop >= start))
        throw std::invalid_argument("scan range is empty: start " +
                                    std::to_string(start) + " > stop " +
                                    std::to_string(stop));

    const JointState state = make_noisy_state(p);
    const double vis = visibility(p);

    std::vector<CurvePoint> curve;
    for (int k = 0;; ++k) {
        const double dphi = start + k * step;
        if (dphi > stop + 1e-9) break;
        const double s = chsh(state, SymmetricSettings{dphi}.expand());
        curve.push_back({dphi, s, vis});
    }
    return curve;
}

SymmetricOptimum optimize_symmetric(double p)
{
    const JointState state = make_noisy_state(p);
    const auto f = [&](double dphi) {
        return chsh(state, SymmetricSettings{dphi}.expand());
    };

    double best_dphi = 0.25, best = f(0.25);
    for (int k = 2; k <= 180; ++k) {
        const double dphi = 0.25 * k;
        const double v = f(dphi);
        if (v > best + 1e-9) {
            best = v;
            best_dphi = dphi;
        }
    }

    const double lo = std::max(1e-6, best_dphi - 0.25);
    const double hi = std::min(45.0, best_dphi + 0.25);
    const double refined = golden_max(f, lo, hi, 0.01);
    const double s_refined = f(refined);
    if (s_refined > best) return {refined, s_refined};
    return {best_dphi, best};
}

FreeOptimum optimize_free(const JointState& state)
{
    // Coarse stage: E(alpha, beta) on a 2 deg grid over the 90deg-periodic
    // fundamental domain, exhaustive max of the signed combination over all
    // setting quadruples.
    constexpr int n = 45;
    static_assert(n * 2 == 90);
    std::array<std::array<double, n>, n> e{};
    std::array<double, n> angle{};
    for (int i = 0; i < n; ++i) angle[i] = -45.0 + 2.0 * i;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            e[i][j] = expectation(joint_probabilities(state, angle[i], angle[j]));

    double best = -1.0;
    BellSettings best_s{};
    for (int a = 0; a < n; ++a)
        for (int ap = 0; ap < n; ++ap)
            for (int b = 0; b < n; ++b)
                for (int bp = 0; bp < n; ++bp) {
                    const double v =
                        std::abs(e[a][b] - e[a][bp] + e[ap][b] + e[ap][bp]);
                    if (v > best) {
                        best = v;
                        best_s = {angle[a], angle[ap], angle[b], angle[bp]};
                    }
                }

    // Local stage: compass pattern search, halving the step from 1 deg down
    // to the 0.01 deg resolution.
    const auto f = [&](const BellSettings& s) { return chsh(state, s); };
    BellSettings cur = best_s;
    double cur_v = f(cur);
    double step = 1.0;
    while (step >= 0.005) {
        BellSettings cand = cur;
        double cand_v = cur_v;
        for (int dim = 0; dim < 4; ++dim)
            for (double sign : {+1.0, -1.0}) {
                BellSettings trial = cur;
                double* fields[4] = {&trial.alpha, &trial.alpha_prime,
                                     &trial.beta, &trial.beta_prime};
                *fields[dim] += sign * step;
                const double v = f(trial);
                if (v > cand_v) {
                    cand_v = v;
                    cand = trial;
                }
            }
        if (cand_v > cur_v + 1e-13) {
            cur = cand;
            cur_v = cand_v;
        } else {
            step *= 0.5;
        }
    }
    return {cur, cur_v};
}

double violation_threshold()
{
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (optimize_symmetric(mid).S_star > 2.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve,
                     bool header)
{
    if (header) os << "dphi_deg,S,visibility\n";
    char buf[64];
    for (const auto& pt : curve) {
        std::snprintf(buf, sizeof buf, "%.10g", pt.dphi);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.10g", pt.S);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.10g", pt.visibility);
        os << buf << '\n';
    }
}

} // namespace spin1bell
