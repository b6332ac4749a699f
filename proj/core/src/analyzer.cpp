#include "spin1bell/analyzer.hpp"

#include <cmath>

#include "spin1bell/linalg.hpp"

namespace spin1bell {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

} // namespace

double normalize_angle_deg(double angle_deg)
{
    double r = std::fmod(angle_deg + 90.0, 180.0);
    if (r < 0.0) r += 180.0;
    return r - 90.0;
}

double OutcomeGrid::sum() const
{
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

std::array<TripletAmplitudes, kTripletDim> outcome_vectors(double angle_deg)
{
    const double a = deg2rad(angle_deg);
    const double c = std::cos(a), s = std::sin(a);
    const double c2 = std::cos(2.0 * a), s2 = std::sin(2.0 * a);
    const double r2 = std::sqrt(2.0);

    std::array<TripletAmplitudes, kTripletDim> v;
    v[0] = {c * c, r2 * s * c, s * s};           // |2H_a>
    v[1] = {-s2 / r2, c2, s2 / r2};              // |H_a V_a> (symmetrized)
    v[2] = {s * s, -r2 * s * c, c * c};          // |2V_a>
    return v;
}

OutcomeGrid joint_probabilities(const JointState& state, double alpha_deg,
                                double beta_deg)
{
    const auto va = outcome_vectors(alpha_deg);
    const auto vb = outcome_vectors(beta_deg);

    OutcomeGrid grid;
    for (int ia = 0; ia < kTripletDim; ++ia)
        for (int ib = 0; ib < kTripletDim; ++ib) {
            double prob;
            if (state.is_pure()) {
                const auto& psi = state.amplitudes();
                cplx amp{};
                for (int k = 0; k < kTripletDim; ++k)
                    for (int l = 0; l < kTripletDim; ++l)
                        amp += std::conj(va[ia][k] * vb[ib][l]) *
                               psi[joint_index(k, l)];
                prob = std::norm(amp);
            } else {
                std::array<cplx, kJointDim> vec;
                for (int k = 0; k < kTripletDim; ++k)
                    for (int l = 0; l < kTripletDim; ++l)
                        vec[joint_index(k, l)] = va[ia][k] * vb[ib][l];
                prob = linalg::quadratic_form(state.rho(), vec);
            }
            if (prob < 0.0 && prob > -1e-12) prob = 0.0;
            grid.at(ia, ib) = prob;
        }
    return grid;
}

double efficiency_factor(const DetectionModel& det, int ia, int ib)
{
    return (ia == 1 ? 1.0 : det.eta_a) * (ib == 1 ? 1.0 : det.eta_b);
}

std::array<double, kJointDim> expected_counts(const OutcomeGrid& grid,
                                              const DetectionModel& det,
                                              double corrected_total)
{
    std::array<double, kJointDim> raw{};
    for (int ia = 0; ia < kTripletDim; ++ia)
        for (int ib = 0; ib < kTripletDim; ++ib)
            raw[joint_index(ia, ib)] =
                corrected_total * grid.at(ia, ib) * efficiency_factor(det, ia, ib);
    return raw;
}

} // namespace spin1bell
