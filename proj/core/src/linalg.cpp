#include "spin1bell/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace spin1bell::linalg {

double hermiticity_error(const Matrix9& a)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < Matrix9::dim; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            worst = std::max(worst, std::abs(a.at(i, j) - std::conj(a.at(j, i))));
    return worst;
}

cplx trace(const Matrix9& a)
{
    cplx t{};
    for (std::size_t i = 0; i < Matrix9::dim; ++i) t += a.at(i, i);
    return t;
}

double trace_product_hermitian(const Matrix9& a, const Matrix9& b)
{
    // tr(AB) = sum_ij A_ij B_ji; real when both are Hermitian.
    cplx t{};
    for (std::size_t i = 0; i < Matrix9::dim; ++i)
        for (std::size_t j = 0; j < Matrix9::dim; ++j) t += a.at(i, j) * b.at(j, i);
    return t.real();
}

void add_outer(Matrix9& a, const std::array<cplx, 9>& v, double w)
{
    for (std::size_t i = 0; i < Matrix9::dim; ++i)
        for (std::size_t j = 0; j < Matrix9::dim; ++j)
            a.at(i, j) += w * v[i] * std::conj(v[j]);
}

double quadratic_form(const Matrix9& a, const std::array<cplx, 9>& v)
{
    cplx s{};
    for (std::size_t i = 0; i < Matrix9::dim; ++i) {
        cplx row{};
        for (std::size_t j = 0; j < Matrix9::dim; ++j) row += a.at(i, j) * v[j];
        s += std::conj(v[i]) * row;
    }
    return s.real();
}

namespace {

double off_diagonal_norm2(const Matrix9& a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < Matrix9::dim; ++i)
        for (std::size_t j = 0; j < Matrix9::dim; ++j)
            if (i != j) s += std::norm(a.at(i, j));
    return s;
}

// One complex Jacobi rotation zeroing a(p,q): the unitary acts on the (p,q)
// plane as [[c, s e^{i phi}], [-s e^{-i phi}, c]] with phi = arg a(p,q) and
// 2 theta = atan2(2|a(p,q)|, a(q,q) - a(p,p)).
void rotate(Matrix9& a, std::size_t p, std::size_t q)
{
    const cplx apq = a.at(p, q);
    const double r = std::abs(apq);
    if (r < 1e-300) return;
    const double app = a.at(p, p).real();
    const double aqq = a.at(q, q).real();
    const double theta = 0.5 * std::atan2(2.0 * r, aqq - app);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const cplx phase = apq / r;  // e^{i phi}

    for (std::size_t k = 0; k < Matrix9::dim; ++k) {  // rows p, q
        const cplx hp = a.at(p, k);
        const cplx hq = a.at(q, k);
        a.at(p, k) = c * hp - s * phase * hq;
        a.at(q, k) = s * std::conj(phase) * hp + c * hq;
    }
    for (std::size_t k = 0; k < Matrix9::dim; ++k) {  // columns p, q
        const cplx hp = a.at(k, p);
        const cplx hq = a.at(k, q);
        a.at(k, p) = c * hp - s * std::conj(phase) * hq;
        a.at(k, q) = s * phase * hp + c * hq;
    }
}

} // namespace

std::array<double, 9> eigenvalues_hermitian(Matrix9 a)
{
    double scale = 0.0;
    for (const auto& x : a.m) scale = std::max(scale, std::abs(x));
    const double tol = std::max(scale, 1.0) * 1e-28;

    for (int sweep = 0; sweep < 100 && off_diagonal_norm2(a) > tol * tol; ++sweep)
        for (std::size_t p = 0; p + 1 < Matrix9::dim; ++p)
            for (std::size_t q = p + 1; q < Matrix9::dim; ++q) rotate(a, p, q);

    std::array<double, 9> eig{};
    for (std::size_t i = 0; i < Matrix9::dim; ++i) eig[i] = a.at(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace spin1bell::linalg
