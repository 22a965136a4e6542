// Copyright 2026 The asymforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense complex linear algebra used throughout the library. Everything here is
// a pure function of its arguments and is templated on the real scalar type
// in the usual Eigen style; the rest of the library instantiates it with
// double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "asymforge/error.hpp"

namespace asymforge {

template <typename Real>
using ComplexMatrixX = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVectorX = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrix = ComplexMatrixX<double>;
using ComplexVector = ComplexVectorX<double>;
using RealVector = RealVectorX<double>;
using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-9;
inline constexpr double kPsdClampTol = 1e-9;

/// Eigenvalues in descending order with matching eigenvector columns.
template <typename Real>
struct SpectralDecomposition {
    RealVectorX<Real> eigenvalues;
    ComplexMatrixX<Real> eigenvectors;

    Eigen::Index size() const { return eigenvalues.size(); }

    /// V f(diag(e)) V^dagger.
    template <typename F>
    ComplexMatrixX<Real> synthesize(F&& f) const {
        ComplexVectorX<Real> mapped(eigenvalues.size());
        for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
            mapped(i) = static_cast<std::complex<Real>>(f(eigenvalues(i)));
        }
        return eigenvectors * mapped.asDiagonal() * eigenvectors.adjoint();
    }
};

template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real max_abs_entry(
    const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return 0;
    return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
auto hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
    return max_abs_entry(m - m.adjoint());
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kHermitianTol) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

/// Max entry deviation of U^dagger U from the identity.
template <typename Derived>
auto unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    return max_abs_entry(u.adjoint() * u - Mat::Identity(u.cols(), u.cols()));
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = kUnitaryTol) {
    return u.rows() == u.cols() && unitarity_defect(u) <= tol;
}

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return (a * b - b * a).eval();
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::NotSquare, std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
    }
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, const char* what) {
    require_square(m, what);
    const double defect = static_cast<double>(hermiticity_defect(m));
    if (!(defect <= kHermitianTol)) {
        throw Error(ErrorCode::NotHermitian,
                    std::string(what) + " deviates from its adjoint by " + std::to_string(defect));
    }
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
template <typename Derived>
SpectralDecomposition<typename Eigen::NumTraits<typename Derived::Scalar>::Real> hermitian_eig(
    const Eigen::MatrixBase<Derived>& m) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    require_hermitian(m, "matrix");
    const ComplexMatrixX<Real> sym = (m + m.adjoint()).template cast<std::complex<Real>>() * Real(0.5);
    Eigen::SelfAdjointEigenSolver<ComplexMatrixX<Real>> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "self-adjoint eigensolver did not converge");
    }
    SpectralDecomposition<Real> out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

/// Sum of singular values.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real trace_norm(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    require_square(m, "matrix");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(m.eval());
    return svd.singularValues().sum();
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-kPsdClampTol, 0) are clamped to zero.
template <typename Derived>
ComplexMatrixX<typename Eigen::NumTraits<typename Derived::Scalar>::Real> matrix_sqrt_psd(
    const Eigen::MatrixBase<Derived>& m) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    const auto spec = hermitian_eig(m);
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
        if (spec.eigenvalues(i) < -Real(kPsdClampTol)) {
            throw Error(ErrorCode::NegativeEigenvalueBeyondTolerance,
                        "eigenvalue " + std::to_string(static_cast<double>(spec.eigenvalues(i))));
        }
    }
    return spec.synthesize([](Real e) { return std::sqrt(std::max(e, Real(0))); });
}

/// exp(i t H) for Hermitian H by spectral synthesis.
template <typename Derived>
ComplexMatrixX<typename Eigen::NumTraits<typename Derived::Scalar>::Real> exp_i_hermitian(
    const Eigen::MatrixBase<Derived>& h, typename Eigen::NumTraits<typename Derived::Scalar>::Real t = 1) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    const auto spec = hermitian_eig(h);
    return spec.synthesize([t](Real e) { return std::polar(Real(1), t * e); });
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const auto z = m(i, j);
            if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
        }
    }
    return true;
}

}  // namespace asymforge
