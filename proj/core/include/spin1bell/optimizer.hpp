#pragma once

#include <iosfwd>
#include <vector>

#include "spin1bell/bell.hpp"

namespace spin1bell {

// Equally spaced settings dphi = beta - alpha = alpha' - beta = beta' - alpha'.
struct SymmetricSettings {
    double dphi;
    double center = 0.0;

    BellSettings expand() const
    {
        return {center - 1.5 * dphi, center + 0.5 * dphi,
                center - 0.5 * dphi, center + 1.5 * dphi};
    }
};

struct CurvePoint {
    double dphi;
    double S;
    double visibility;  // visibility(p) of the curve's state, constant per curve
};

// S versus dphi for the noisy state at center 0 (the published family of
// curves); the curve's visibility is attached to every point.
std::vector<CurvePoint> scan_dphi(double p, double start, double stop, double step);

struct SymmetricOptimum {
    double dphi_star;
    double S_star;
};

// argmax of S over dphi in (0, 45]: 0.25 deg grid, then golden-section
// refinement to 0.01 deg. Ties broken toward the smallest dphi.
SymmetricOptimum optimize_symmetric(double p);

struct FreeOptimum {
    BellSettings settings;
    double S;
};

// Maximize S over all four angles: coarse 2 deg grid over the 90deg-periodic
// fundamental domain, then compass pattern search to 0.01 deg. Checks the
// equal-spacing ansatz instead of assuming it: for the pure singlet the two
// agree, while for p < 1 the global optimum is mildly asymmetric
// (alpha = -beta', alpha' = -beta) and exceeds the equally spaced family.
FreeOptimum optimize_free(const JointState& state);

// Smallest p whose optimal symmetric S exceeds 2 (bisection to 1e-4).
double violation_threshold();

// CSV rows `dphi_deg,S,visibility`; set header=true on the first curve.
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve,
                     bool header);

} // namespace spin1bell
