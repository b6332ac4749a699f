#pragma once

#include <array>

#include "spin1bell/analyzer.hpp"
#include "spin1bell/qstate.hpp"

namespace spin1bell {

struct BellSettings {
    double alpha;
    double alpha_prime;
    double beta;
    double beta_prime;
};

// Observable value map: v(+1) = +1, v(0) = -1, v(-1) = +1, indexed by
// outcome index. The 0 outcome carries the minus sign in E.
inline constexpr std::array<int, kTripletDim> kOutcomeValue{+1, -1, +1};

// E = sum_{A,B} v(A) v(B) p[A][B]; requires the grid normalized within 1e-8.
double expectation(const OutcomeGrid& grid);

// Signed CHSH combination E(a,b) - E(a,b') + E(a',b) + E(a',b').
double chsh_signed(const JointState& state, const BellSettings& s);

// S = |signed combination|; local hidden variables bound it by 2.
double chsh(const JointState& state, const BellSettings& s);

// Signed combination of every deterministic local strategy: an outcome in
// {+1,0,-1} for each of Alice's two settings and Bob's two settings (3^4 = 81
// strategies), mapped through the observable values. Every entry is +-2.
std::array<int, 81> lhv_strategy_values();

// Exhaustive maximum over the 81 strategies; exactly 2 (integer arithmetic).
double lhv_max();

// Joint outcome distribution when the four photons are two distinguishable
// polarization singlets and each side declares +1/0/-1 for (H,H)/mixed/(V,V)
// in its rotated basis. Pairs are independent; E(theta) = cos^2(2 theta).
OutcomeGrid pairs_model_probabilities(double alpha_deg, double beta_deg);

// Same distribution computed brute force from the 16-dim state vector
// (cross-check oracle for the classical factorization above).
OutcomeGrid pairs_model_probabilities_quantum(const PairProductState& state,
                                              double alpha_deg, double beta_deg);

// CHSH combination under the distinguishable-pairs model.
double pairs_model_chsh(const BellSettings& s);

// E_pair(theta) = -cos(2 theta) for one polarization singlet (sanity baseline).
double spin_half_baseline(double theta_deg);

} // namespace spin1bell
