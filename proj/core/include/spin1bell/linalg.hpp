#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace spin1bell::linalg {

using cplx = std::complex<double>;

// Dense 9x9 complex matrix, row-major. This is the only matrix shape the
// library needs (operators on the two-sided triplet space), so a fixed-size
// kernel beats a general linear-algebra dependency.
struct Matrix9 {
    static constexpr std::size_t dim = 9;
    std::array<cplx, dim * dim> m{};

    cplx& at(std::size_t i, std::size_t j) { return m[i * dim + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return m[i * dim + j]; }
};

// max_ij |A_ij - conj(A_ji)|
double hermiticity_error(const Matrix9& a);

cplx trace(const Matrix9& a);

// tr(A B) for Hermitian A, B (used for purity tr rho^2)
double trace_product_hermitian(const Matrix9& a, const Matrix9& b);

// A += w * v v^dagger
void add_outer(Matrix9& a, const std::array<cplx, 9>& v, double w);

// Re(v^dagger A v); exact real for Hermitian A
double quadratic_form(const Matrix9& a, const std::array<cplx, 9>& v);

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
// returned in ascending order. Converges to machine precision in a few
// sweeps at this size.
std::array<double, 9> eigenvalues_hermitian(Matrix9 a);

} // namespace spin1bell::linalg
