#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

namespace spin1bell {

// A coincidence fringe: Alice's analyzer fixed, Bob's rotated. The (+1,-1)
// pair is the |2H>/|2V> fringe the apparatus records; (0,0) is available via
// joint_probabilities for diagnostics but does not define visibility.
struct FringeScan {
    enum class Side { alice, bob };
    Side fixed_side = Side::alice;
    double fixed_angle_deg = 0.0;
    int fixed_outcome = +1;
    int scanned_outcome = -1;
    std::vector<std::pair<double, double>> samples;  // (theta_deg, probability)
};

// P(+1 at fixed_angle on Alice; -1 at theta on Bob) for the noisy state.
double fringe_probability(double p, double fixed_angle_deg, double theta_deg);

// Sample the fringe over theta in [-90, 90] with the given step (0 < step <= 5).
FringeScan fringe_scan(double p, double fixed_angle_deg, double step_deg);

// Fringe contrast of one scan: (max - min)/(max + min) between the fringe
// maximum P(theta*) and the crossed analyzer position P(theta* - 90), the
// pair an experiment reads out. theta* located by grid + golden-section
// refinement (1e-6 in probability).
double fringe_contrast(double p, double fixed_angle_deg);

// Entanglement visibility: the lowest fringe contrast over fixed angles in
// [0, 90] (1 deg grid, refined to 0.01 deg near the minimum). The minimizing
// fixed angle is 45 deg and V = 4p/(3+p) on the whole range.
double visibility(double p);

// Inverse of visibility() by bisection (closed form p = 3V/(4-V) on the
// branch); accepts V >= 0.4, i.e. p >= 1/3.
double p_from_visibility(double v);

// CSV with header `theta_deg,probability`.
void write_fringe_csv(std::ostream& os, const FringeScan& scan);

} // namespace spin1bell
