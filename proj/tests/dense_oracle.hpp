#pragma once

// Dense reference computations for small grids. Everything here is assembled
// directly from the mask evaluators, independent of CompiledStencil.

#include "cjm/grid.hpp"
#include "cjm/stencil.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double coeff_at(const cjm::StencilMask& mask, const cjm::Grid& g, const cjm::MaskEntry& e, int i, int j) {
    return e.coeff(g.x1(i), g.x2(j), g.dx1(i), g.dx2(j));
}

/// Interior-to-interior matrix of the discrete operator.
inline Eigen::MatrixXd assemble(const cjm::StencilMask& mask, const cjm::Grid& g) {
    const auto n = static_cast<Eigen::Index>(g.interior_count());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    cjm::for_each_interior(g, [&](int i, int j) {
        const auto row = static_cast<Eigen::Index>(g.interior_number(i, j));
        for (const auto& e : mask.entries) {
            const int ii = i + e.offset.di;
            const int jj = j + e.offset.dj;
            if (g.is_interior(ii, jj)) {
                a(row, static_cast<Eigen::Index>(g.interior_number(ii, jj))) += coeff_at(mask, g, e, i, j);
            }
        }
    });
    return a;
}

/// Contribution of the ghost values of u to each row: sum over ghost
/// neighbours of c * u.
inline Eigen::VectorXd boundary_part(const cjm::StencilMask& mask, const cjm::Field& u) {
    const auto& g = u.grid();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.interior_count()));
    cjm::for_each_interior(g, [&](int i, int j) {
        double s = 0.0;
        for (const auto& e : mask.entries) {
            const int ii = i + e.offset.di;
            const int jj = j + e.offset.dj;
            if (!g.is_interior(ii, jj)) s += coeff_at(mask, g, e, i, j) * u(ii, jj);
        }
        out(static_cast<Eigen::Index>(g.interior_number(i, j))) = s;
    });
    return out;
}

inline Eigen::VectorXd interior(const cjm::Field& f) {
    const auto& g = f.grid();
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.interior_count()));
    cjm::for_each_interior(g, [&](int i, int j) { v(static_cast<Eigen::Index>(g.interior_number(i, j))) = f(i, j); });
    return v;
}

inline double max_abs_diff(const cjm::Field& f, const Eigen::VectorXd& v) {
    const auto& g = f.grid();
    double m = 0.0;
    cjm::for_each_interior(g, [&](int i, int j) {
        m = std::max(m, std::abs(f(i, j) - v(static_cast<Eigen::Index>(g.interior_number(i, j)))));
    });
    return m;
}

/// Eigenvalues (ascending) of a symmetric banded matrix via LAPACK dsbev.
inline std::vector<double> banded_symmetric_eigenvalues(const Eigen::MatrixXd& a, int kd) {
    const auto n = static_cast<lapack_int>(a.rows());
    const lapack_int ldab = kd + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n), 0.0);
    // Upper storage, column major: ab[kd + i - j + j * ldab] = a(i, j) for j - kd <= i <= j.
    for (lapack_int j = 0; j < n; ++j) {
        for (lapack_int i = std::max<lapack_int>(0, j - kd); i <= j; ++i) {
            ab[static_cast<std::size_t>(kd + i - j + j * ldab)] = a(i, j);
        }
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'U', n, kd, ab.data(), ldab, w.data(), nullptr, 1);
    if (info != 0) throw std::runtime_error("dsbev failed");
    return w;
}

/// Extreme eigenvalues of D^{-1} A for a Cartesian mask on an n x n grid.
/// D is a constant multiple of the identity, so D^{-1} A is symmetric.
struct Extremes {
    double kmin;
    double kmax;
};

inline Extremes cartesian_kappa(const cjm::StencilMask& mask, const cjm::Grid& g) {
    Eigen::MatrixXd a = assemble(mask, g);
    const double d = a(0, 0);
    a /= d;
    const int kd = mask.reach() * g.interior_y() + mask.reach();
    const auto w = banded_symmetric_eigenvalues(a, kd);
    return {w.front(), w.back()};
}

/// Extreme real parts of the eigenvalues of D^{-1} A for a general mask.
inline Extremes general_kappa(const cjm::StencilMask& mask, const cjm::Grid& g) {
    const Eigen::MatrixXd a = assemble(mask, g);
    const Eigen::MatrixXd k = a.diagonal().asDiagonal().inverse() * a;
    Eigen::EigenSolver<Eigen::MatrixXd> es(k, false);
    const Eigen::VectorXd re = es.eigenvalues().real();
    return {re.minCoeff(), re.maxCoeff()};
}

/// prod_m (I - w_m K) for a symmetric K, built from its eigendecomposition so
/// that the result does not depend on the order of the factors.
inline Eigen::MatrixXd cycle_polynomial(const Eigen::MatrixXd& k, const std::vector<double>& weights) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    Eigen::VectorXd p(k.rows());
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
        double v = 1.0;
        for (double w : weights) v *= 1.0 - w * es.eigenvalues()(r);
        p(r) = v;
    }
    return es.eigenvectors() * p.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace oracle
