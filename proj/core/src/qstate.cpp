#include "spin1bell/qstate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace spin1bell {

int outcome_to_index(int outcome)
{
    switch (outcome) {
        case +1: return 0;
        case 0: return 1;
        case -1: return 2;
    }
    throw std::invalid_argument("outcome must be one of +1, 0, -1, got " +
                                std::to_string(outcome));
}

int index_to_outcome(int index)
{
    switch (index) {
        case 0: return +1;
        case 1: return 0;
        case 2: return -1;
    }
    throw std::invalid_argument("outcome index must be 0, 1 or 2, got " +
                                std::to_string(index));
}

double TripletAmplitudes::norm2() const
{
    return std::norm(a_plus) + std::norm(a_zero) + std::norm(a_minus);
}

cplx TripletAmplitudes::operator[](int index) const
{
    switch (index) {
        case 0: return a_plus;
        case 1: return a_zero;
        case 2: return a_minus;
    }
    throw std::invalid_argument("triplet index out of range");
}

JointState JointState::pure(const PureAmplitudes& amplitudes)
{
    double n2 = 0.0;
    for (const auto& a : amplitudes) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-12)
        throw std::invalid_argument("pure state not normalized: |psi|^2 = " +
                                    std::to_string(n2));

    JointState st;
    st.pure_ = true;
    st.amps_ = amplitudes;

    // Canonical global phase: make the (+1,-1) amplitude (joint index 2) real
    // nonnegative, or the first nonvanishing amplitude if that one is zero.
    cplx anchor = st.amps_[joint_index(0, 2)];
    if (std::abs(anchor) < 1e-14) {
        for (const auto& a : st.amps_)
            if (std::abs(a) >= 1e-14) { anchor = a; break; }
    }
    if (std::abs(anchor) >= 1e-14) {
        const cplx phase = std::conj(anchor) / std::abs(anchor);
        for (auto& a : st.amps_) a *= phase;
    }
    return st;
}

JointState JointState::density(const linalg::Matrix9& rho)
{
    const double herm = linalg::hermiticity_error(rho);
    if (herm > 1e-12)
        throw std::invalid_argument("density matrix not Hermitian: max |rho_ij - "
                                    "conj(rho_ji)| = " + std::to_string(herm));
    const cplx tr = linalg::trace(rho);
    if (std::abs(tr - 1.0) > 1e-12)
        throw std::invalid_argument("density matrix trace != 1: tr = " +
                                    std::to_string(tr.real()));
    const auto eig = linalg::eigenvalues_hermitian(rho);
    if (eig.front() < -1e-10)
        throw std::invalid_argument("density matrix not positive semidefinite: "
                                    "lowest eigenvalue = " + std::to_string(eig.front()));

    JointState st;
    st.pure_ = false;
    st.rho_ = rho;
    return st;
}

const PureAmplitudes& JointState::amplitudes() const
{
    if (!pure_) throw std::logic_error("amplitudes() called on a mixed state");
    return amps_;
}

const linalg::Matrix9& JointState::rho() const
{
    if (pure_) throw std::logic_error("rho() called on a pure state");
    return rho_;
}

linalg::Matrix9 JointState::density_matrix() const
{
    if (!pure_) return rho_;
    linalg::Matrix9 out;
    linalg::add_outer(out, amps_, 1.0);
    return out;
}

double JointState::purity() const
{
    if (pure_) return 1.0;
    return linalg::trace_product_hermitian(rho_, rho_);
}

JointState make_spin1_singlet()
{
    const double a = 1.0 / std::sqrt(3.0);
    PureAmplitudes amps{};
    amps[joint_index(0, 2)] = a;   // |1,-1>  = |2H, 2V>
    amps[joint_index(1, 1)] = -a;  // |0, 0>  = |HV, VH>
    amps[joint_index(2, 0)] = a;   // |-1, 1> = |2V, 2H>
    return JointState::pure(amps);
}

JointState make_noisy_state(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("noise parameter p must lie in [0,1], got " +
                                    std::to_string(p));
    const auto psi = make_spin1_singlet().amplitudes();
    linalg::Matrix9 rho;
    linalg::add_outer(rho, psi, p);
    const double w = (1.0 - p) / 3.0;
    for (int idx : {joint_index(0, 2), joint_index(1, 1), joint_index(2, 0)})
        rho.at(idx, idx) += w;
    return JointState::density(rho);
}

double PairProductState::norm2() const
{
    double n2 = 0.0;
    for (const auto& a : amplitudes) n2 += std::norm(a);
    return n2;
}

namespace {

constexpr int pair_index(int xa1, int xa2, int xb1, int xb2)
{
    return 8 * xa1 + 4 * xa2 + 2 * xb1 + xb2;  // H = 0, V = 1
}

} // namespace

PairProductState make_pair_product_state()
{
    // (1/2)(|HV> - |VH>)_{A1,B1} (x) (|HV> - |VH>)_{A2,B2}
    PairProductState st;
    st.amplitudes[pair_index(0, 0, 1, 1)] = 0.5;   // H H V V
    st.amplitudes[pair_index(0, 1, 1, 0)] = -0.5;  // H V V H
    st.amplitudes[pair_index(1, 0, 0, 1)] = -0.5;  // V H H V
    st.amplitudes[pair_index(1, 1, 0, 0)] = 0.5;   // V V H H
    return st;
}

SymmetricProjection project_symmetric_pairs(const PairProductState& state)
{
    // Symmetric two-qubit basis on each side: |2H> = |HH|,
    // |HV>_sym = (|HV> + |VH>)/sqrt2, |2V> = |VV>. Amplitude of the joint
    // symmetric vector (ia, ib) is the overlap with the 16-dim state.
    struct SymComponent { int x1, x2; double w; };
    const std::array<std::vector<SymComponent>, 3> sym{{
        {{0, 0, 1.0}},
        {{0, 1, 1.0 / std::sqrt(2.0)}, {1, 0, 1.0 / std::sqrt(2.0)}},
        {{1, 1, 1.0}},
    }};

    PureAmplitudes proj{};
    double weight = 0.0;
    for (int ia = 0; ia < kTripletDim; ++ia)
        for (int ib = 0; ib < kTripletDim; ++ib) {
            cplx amp{};
            for (const auto& sa : sym[ia])
                for (const auto& sb : sym[ib])
                    amp += sa.w * sb.w *
                           state.amplitudes[pair_index(sa.x1, sa.x2, sb.x1, sb.x2)];
            proj[joint_index(ia, ib)] = amp;
            weight += std::norm(amp);
        }

    if (weight < 1e-14)
        throw std::invalid_argument("state has no symmetric (x) symmetric component");
    const double inv = 1.0 / std::sqrt(weight);
    for (auto& a : proj) a *= inv;
    return {JointState::pure(proj), weight};
}

} // namespace spin1bell
