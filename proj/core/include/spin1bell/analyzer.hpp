#pragma once

#include <array>

#include "spin1bell/qstate.hpp"

namespace spin1bell {

// All interface angles are polarization-rotation angles in degrees
// (counter-clockwise positive); outcome probabilities are 180deg-periodic.
double normalize_angle_deg(double angle_deg);  // into [-90, 90)

// Two-photon detection efficiency of the +-1 outcomes relative to the 0
// outcome (which is exactly 1): folds polarizer loss and the 50/50 binomial
// splitting into one measured number per side.
struct DetectionModel {
    double eta_a = 0.431;
    double eta_b = 0.434;
};

// 3x3 joint outcome probabilities in the canonical (A,B) order.
struct OutcomeGrid {
    std::array<double, kJointDim> p{};

    double& at(int ia, int ib) { return p[joint_index(ia, ib)]; }
    const double& at(int ia, int ib) const { return p[joint_index(ia, ib)]; }
    double sum() const;
};

// The three analyzer outcome vectors |2H_a>, |H_a V_a>, |2V_a> expressed in
// the unrotated triplet basis; columns of the induced SO(3) rotation.
std::array<TripletAmplitudes, kTripletDim> outcome_vectors(double angle_deg);

// p[A][B] = <a_A (x) b_B| rho |a_A (x) b_B>; sums to 1 for a valid state.
// Tiny negative values from floating point (> -1e-12) are clamped to zero.
OutcomeGrid joint_probabilities(const JointState& state, double alpha_deg,
                                double beta_deg);

// Efficiency factor eta_A^[A!=0] * eta_B^[B!=0] applied to one grid cell.
double efficiency_factor(const DetectionModel& det, int ia, int ib);

// Forward model of the raw counts: raw[A][B] = corrected_total * p[A][B]
// * efficiency_factor. Inverse of the table's "Mod." correction.
std::array<double, kJointDim> expected_counts(const OutcomeGrid& grid,
                                              const DetectionModel& det,
                                              double corrected_total);

} // namespace spin1bell
