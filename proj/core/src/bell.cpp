#include "spin1bell/bell.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spin1bell {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

// Single-qubit overlap <x_rot | b> with |H_a> = cos a |H> + sin a |V>,
// |V_a> = -sin a |H> + cos a |V>; H = 0, V = 1.
double qubit_overlap(int meas, int basis, double cos_a, double sin_a)
{
    if (meas == 0) return basis == 0 ? cos_a : sin_a;
    return basis == 0 ? -sin_a : cos_a;
}

// (H,H) -> +1, (V,V) -> -1, mixed -> 0, as outcome indices.
int ternary_index(int x1, int x2)
{
    if (x1 == 0 && x2 == 0) return 0;
    if (x1 == 1 && x2 == 1) return 2;
    return 1;
}

} // namespace

double expectation(const OutcomeGrid& grid)
{
    const double total = grid.sum();
    if (std::abs(total - 1.0) > 1e-8)
        throw std::invalid_argument("probability grid not normalized: sum = " +
                                    std::to_string(total));
    double e = 0.0;
    for (int ia = 0; ia < kTripletDim; ++ia)
        for (int ib = 0; ib < kTripletDim; ++ib)
            e += kOutcomeValue[ia] * kOutcomeValue[ib] * grid.at(ia, ib);
    return e;
}

double chsh_signed(const JointState& state, const BellSettings& s)
{
    const double e_ab = expectation(joint_probabilities(state, s.alpha, s.beta));
    const double e_abp =
        expectation(joint_probabilities(state, s.alpha, s.beta_prime));
    const double e_apb =
        expectation(joint_probabilities(state, s.alpha_prime, s.beta));
    const double e_apbp =
        expectation(joint_probabilities(state, s.alpha_prime, s.beta_prime));
    return e_ab - e_abp + e_apb + e_apbp;
}

double chsh(const JointState& state, const BellSettings& s)
{
    return std::abs(chsh_signed(state, s));
}

std::array<int, 81> lhv_strategy_values()
{
    std::array<int, 81> values{};
    int n = 0;
    for (int a = 0; a < 3; ++a)
        for (int ap = 0; ap < 3; ++ap)
            for (int b = 0; b < 3; ++b)
                for (int bp = 0; bp < 3; ++bp) {
                    const int va = kOutcomeValue[a], vap = kOutcomeValue[ap];
                    const int vb = kOutcomeValue[b], vbp = kOutcomeValue[bp];
                    values[n++] = va * vb - va * vbp + vap * vb + vap * vbp;
                }
    return values;
}

double lhv_max()
{
    int best = -4;
    for (int v : lhv_strategy_values())
        if (v > best) best = v;
    return static_cast<double>(best);
}

OutcomeGrid pairs_model_probabilities(double alpha_deg, double beta_deg)
{
    // One polarization singlet measured at (alpha, beta):
    // q(H,H) = q(V,V) = sin^2(alpha-beta)/2, q(H,V) = q(V,H) = cos^2(alpha-beta)/2.
    const double th = deg2rad(alpha_deg - beta_deg);
    const double qs = 0.5 * std::sin(th) * std::sin(th);
    const double qc = 0.5 * std::cos(th) * std::cos(th);
    const double q[2][2] = {{qs, qc}, {qc, qs}};

    OutcomeGrid grid;
    for (int x1a = 0; x1a < 2; ++x1a)
        for (int x1b = 0; x1b < 2; ++x1b)
            for (int x2a = 0; x2a < 2; ++x2a)
                for (int x2b = 0; x2b < 2; ++x2b)
                    grid.at(ternary_index(x1a, x2a), ternary_index(x1b, x2b)) +=
                        q[x1a][x1b] * q[x2a][x2b];
    return grid;
}

OutcomeGrid pairs_model_probabilities_quantum(const PairProductState& state,
                                              double alpha_deg, double beta_deg)
{
    const double a = deg2rad(alpha_deg), b = deg2rad(beta_deg);
    const double ca = std::cos(a), sa = std::sin(a);
    const double cb = std::cos(b), sb = std::sin(b);

    OutcomeGrid grid;
    for (int m = 0; m < 16; ++m) {
        const int m1 = (m >> 3) & 1, m2 = (m >> 2) & 1;
        const int m3 = (m >> 1) & 1, m4 = m & 1;
        cplx amp{};
        for (int k = 0; k < 16; ++k) {
            const int b1 = (k >> 3) & 1, b2 = (k >> 2) & 1;
            const int b3 = (k >> 1) & 1, b4 = k & 1;
            amp += qubit_overlap(m1, b1, ca, sa) * qubit_overlap(m2, b2, ca, sa) *
                   qubit_overlap(m3, b3, cb, sb) * qubit_overlap(m4, b4, cb, sb) *
                   state.amplitudes[k];
        }
        grid.at(ternary_index(m1, m2), ternary_index(m3, m4)) += std::norm(amp);
    }
    return grid;
}

double pairs_model_chsh(const BellSettings& s)
{
    const double e_ab = expectation(pairs_model_probabilities(s.alpha, s.beta));
    const double e_abp =
        expectation(pairs_model_probabilities(s.alpha, s.beta_prime));
    const double e_apb =
        expectation(pairs_model_probabilities(s.alpha_prime, s.beta));
    const double e_apbp =
        expectation(pairs_model_probabilities(s.alpha_prime, s.beta_prime));
    return std::abs(e_ab - e_abp + e_apb + e_apbp);
}

double spin_half_baseline(double theta_deg)
{
    return -std::cos(2.0 * deg2rad(theta_deg));
}

} // namespace spin1bell
