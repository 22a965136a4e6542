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

#include <cstdint>
#include <random>
#include <variant>

#include "asymforge/matcore.hpp"

namespace asymforge {

inline constexpr double kTraceTol = 1e-9;
/// Eigenvalues of K closer than this are treated as one cluster.
inline constexpr double kDegeneracyGap = 1e-10;

/// A validated density operator: Hermitian, unit trace, PSD (all within 1e-9).
class DensityOperator {
  public:
    /// Tag for constructing from a matrix whose invariants the caller
    /// already guarantees (outputs of unitary conjugation, dephasing, ...).
    struct trusted_t {};
    static constexpr trusted_t trusted{};

    DensityOperator(ComplexMatrix m, trusted_t) : matrix_(std::move(m)) {}

    Eigen::Index dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

  private:
    ComplexMatrix matrix_;
};

/// Hermitian operator with its spectral data cached at construction.
class Observable {
  public:
    explicit Observable(ComplexMatrix m);

    Eigen::Index dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }
    const SpectralDecomposition<double>& spectrum() const { return spectrum_; }
    /// Largest |eigenvalue| (the spectral radius).
    double spectral_radius() const { return spectral_radius_; }
    /// True when the spectral radius is numerically zero.
    bool is_trivial() const { return spectral_radius_ <= 1e-12; }
    /// True when all eigenvalues coincide, i.e. K is a multiple of I.
    bool is_proportional_to_identity() const;
    /// K / ||K||_max. Throws TrivialObservable when K is numerically zero.
    Observable normalized() const;

  private:
    ComplexMatrix matrix_;
    SpectralDecomposition<double> spectrum_;
    double spectral_radius_ = 0;
};

/// Columns of a unitary matrix, viewed as an orthonormal basis {|x>}.
class OrthonormalBasis {
  public:
    /// Throws NotUnitary if U^dagger U deviates from I by more than 1e-9.
    explicit OrthonormalBasis(ComplexMatrix u);

    static OrthonormalBasis computational(Eigen::Index dim);
    static OrthonormalBasis eigenbasis(const Observable& k) { return OrthonormalBasis(k.spectrum().eigenvectors); }

    Eigen::Index dim() const { return u_.rows(); }
    const ComplexMatrix& matrix() const { return u_; }
    auto vector(Eigen::Index i) const { return u_.col(i); }

    /// Multiplies every vector by an arbitrary phase; the basis as a set of
    /// rays is unchanged.
    OrthonormalBasis rephased(const RealVector& phases) const;

  private:
    ComplexMatrix u_;
};

struct HaarPure {};
struct GinibreMixed {
    Eigen::Index rank = 1;
};
struct BlochVector {
    double x = 0, y = 0, z = 0;
};

struct RandomSpec {
    Eigen::Index dim = 2;
    std::variant<HaarPure, GinibreMixed, BlochVector> kind = HaarPure{};
    std::uint64_t seed = 0;
};

/// Checks the density-operator invariants. Does not alter the matrix.
DensityOperator validate_state(const ComplexMatrix& m);

/// Deterministic in (spec.seed, stream).
DensityOperator random_state(const RandomSpec& spec, std::uint64_t stream = 0);
DensityOperator random_state(const RandomSpec& spec, std::mt19937_64& engine);

DensityOperator bloch_state(double x, double y, double z);
DensityOperator maximally_mixed(Eigen::Index dim);
DensityOperator pure_state(const ComplexVector& psi);

/// Haar-distributed unitary.
ComplexMatrix random_unitary(Eigen::Index dim, std::mt19937_64& engine);
/// GUE-distributed Hermitian matrix (G + G^dagger) / 2.
ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& engine);

/// Pauli matrices.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// exp(-i K theta) by spectral synthesis of the cached decomposition.
ComplexMatrix translation_unitary(const Observable& k, double theta);

/// exp(-i K theta) rho exp(i K theta).
DensityOperator translate(const DensityOperator& rho, const Observable& k, double theta);

/// Sum over eigenvalue clusters c of P_c rho P_c.
DensityOperator dephase_in_eigenbasis(const DensityOperator& rho, const Observable& k);

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

}  // namespace asymforge
