#pragma once

#include <array>
#include <complex>

#include "spin1bell/linalg.hpp"

namespace spin1bell {

using cplx = std::complex<double>;

// Two-photon polarization modes live in the 3-dim symmetric (triplet)
// subspace with basis {|2H>, |HV>, |2V>}, identified with the spin-1
// projections {+1, 0, -1}. Outcome index 0/1/2 <-> outcome +1/0/-1.
inline constexpr int kTripletDim = 3;
inline constexpr int kJointDim = 9;

int outcome_to_index(int outcome);   // +1 -> 0, 0 -> 1, -1 -> 2
int index_to_outcome(int index);     // inverse of the above

// Joint basis order is (A,B) row-major in outcome index:
// (+1,+1),(+1,0),(+1,-1),(0,+1),(0,0),(0,-1),(-1,+1),(-1,0),(-1,-1).
inline constexpr int joint_index(int ia, int ib) { return ia * kTripletDim + ib; }

// Amplitudes of one two-photon mode in the triplet basis.
struct TripletAmplitudes {
    cplx a_plus{};   // |2H>  (outcome +1)
    cplx a_zero{};   // |HV>  (outcome  0)
    cplx a_minus{};  // |2V>  (outcome -1)

    double norm2() const;
    cplx operator[](int index) const;  // by outcome index 0/1/2
};

using PureAmplitudes = std::array<cplx, kJointDim>;

// A state of the 9-dim Alice x Bob triplet space: either a pure amplitude
// vector or a density matrix. Constructors validate the physical invariants
// and report which one failed.
class JointState {
  public:
    // Pure state; requires unit norm within 1e-12. The global phase is
    // canonicalized so the (+1,-1) amplitude is real and nonnegative
    // (falling back to the first nonvanishing amplitude if that one is 0).
    static JointState pure(const PureAmplitudes& amplitudes);

    // Mixed state; requires Hermitian within 1e-12, trace 1 within 1e-12,
    // eigenvalues >= -1e-10.
    static JointState density(const linalg::Matrix9& rho);

    bool is_pure() const { return pure_; }
    const PureAmplitudes& amplitudes() const;    // pure states only
    const linalg::Matrix9& rho() const;          // mixed states only
    linalg::Matrix9 density_matrix() const;      // either kind
    double purity() const;                       // tr rho^2

  private:
    JointState() = default;
    bool pure_ = true;
    PureAmplitudes amps_{};
    linalg::Matrix9 rho_{};
};

// |Psi_1> = (1/sqrt3)(|1,-1> - |0,0> + |-1,1>), the spin-1 singlet realized
// by the second-order down-conversion term.
JointState make_spin1_singlet();

// rho(p) = p |psi><psi| + (1-p)/3 (|2H,2V><2H,2V| + |HV,VH><HV,VH|
//                                  + |2V,2H><2V,2H|)
JointState make_noisy_state(double p);

// Four polarization qubits (Alice photon 1, Alice photon 2, Bob photon 1,
// Bob photon 2); basis index = 8*x_A1 + 4*x_A2 + 2*x_B1 + x_B2 with H=0, V=1.
struct PairProductState {
    std::array<cplx, 16> amplitudes{};
    double norm2() const;
};

// Product of two polarization singlets, pair i = (Alice photon i, Bob
// photon i): the first-order down-conversion comparison state.
PairProductState make_pair_product_state();

struct SymmetricProjection {
    JointState state;  // renormalized projection onto sym (x) sym
    double weight;     // norm^2 captured by the projection
};

// Post-selection onto the two-photon symmetric subspace on each side. For
// make_pair_product_state() this reproduces the spin-1 singlet with weight 3/4.
SymmetricProjection project_symmetric_pairs(const PairProductState& state);

} // namespace spin1bell
