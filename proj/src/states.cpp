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

#include "asymforge/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asymforge/rng.hpp"

namespace asymforge {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw Error(ErrorCode::DimMismatch,
                    std::string(what) + ": dimensions " + std::to_string(a) + " and " + std::to_string(b));
    }
}

Observable::Observable(ComplexMatrix m) : matrix_(std::move(m)) {
    if (!all_finite(matrix_)) throw Error(ErrorCode::InvalidArgument, "observable has non-finite entries");
    spectrum_ = hermitian_eig(matrix_);
    spectral_radius_ = spectrum_.size() == 0 ? 0.0 : spectrum_.eigenvalues.cwiseAbs().maxCoeff();
}

bool Observable::is_proportional_to_identity() const {
    if (spectrum_.size() == 0) return true;
    const double spread = spectrum_.eigenvalues.maxCoeff() - spectrum_.eigenvalues.minCoeff();
    return spread <= 1e-12 * std::max(1.0, spectral_radius_);
}

Observable Observable::normalized() const {
    if (is_trivial()) throw Error(ErrorCode::TrivialObservable, "observable has zero spectral radius");
    return Observable(matrix_ / spectral_radius_);
}

OrthonormalBasis::OrthonormalBasis(ComplexMatrix u) : u_(std::move(u)) {
    if (u_.rows() != u_.cols()) throw Error(ErrorCode::NotUnitary, "basis matrix is not square");
    const double defect = unitarity_defect(u_);
    if (!(defect <= kUnitaryTol)) {
        throw Error(ErrorCode::NotUnitary, "basis columns deviate from orthonormality by " + std::to_string(defect));
    }
}

OrthonormalBasis OrthonormalBasis::computational(Eigen::Index dim) {
    return OrthonormalBasis(ComplexMatrix::Identity(dim, dim));
}

OrthonormalBasis OrthonormalBasis::rephased(const RealVector& phases) const {
    ComplexMatrix u = u_;
    for (Eigen::Index j = 0; j < u.cols(); ++j) u.col(j) *= std::polar(1.0, phases(j));
    return OrthonormalBasis(std::move(u));
}

DensityOperator validate_state(const ComplexMatrix& m) {
    require_square(m, "state");
    if (m.rows() == 0) throw Error(ErrorCode::InvalidArgument, "state has dimension 0");
    if (!all_finite(m)) throw Error(ErrorCode::InvalidArgument, "state has non-finite entries");
    require_hermitian(m, "state");
    const Complex tr = m.trace();
    if (!(std::abs(tr - 1.0) <= kTraceTol)) {
        throw Error(ErrorCode::TraceNotOne, "trace is " + std::to_string(tr.real()) + "+" +
                                                std::to_string(tr.imag()) + "i");
    }
    const auto spec = hermitian_eig(m);
    const double min_eig = spec.eigenvalues.minCoeff();
    if (min_eig < -kPsdClampTol) {
        throw Error(ErrorCode::NotPSD, "minimum eigenvalue is " + std::to_string(min_eig));
    }
    return DensityOperator(m, DensityOperator::trusted);
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

DensityOperator bloch_state(double x, double y, double z) {
    const double r2 = x * x + y * y + z * z;
    if (!(r2 <= 1.0 + 1e-12)) {
        throw Error(ErrorCode::NotPSD, "Bloch vector length " + std::to_string(std::sqrt(r2)) + " exceeds 1");
    }
    ComplexMatrix m = 0.5 * (ComplexMatrix::Identity(2, 2) + x * pauli_x() + y * pauli_y() + z * pauli_z());
    return DensityOperator(std::move(m), DensityOperator::trusted);
}

DensityOperator maximally_mixed(Eigen::Index dim) {
    return DensityOperator(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), DensityOperator::trusted);
}

DensityOperator pure_state(const ComplexVector& psi) {
    const double n = psi.norm();
    if (!(n > 0)) throw Error(ErrorCode::InvalidArgument, "zero state vector");
    const ComplexVector v = psi / n;
    return DensityOperator(v * v.adjoint(), DensityOperator::trusted);
}

ComplexMatrix random_unitary(Eigen::Index dim, std::mt19937_64& engine) {
    ComplexMatrix g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = complex_normal(engine);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0) q.col(j) *= r(j, j) / a;
    }
    return q;
}

ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& engine) {
    ComplexMatrix g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = complex_normal(engine);
    return (g + g.adjoint()) * 0.5;
}

namespace {

struct RandomVisitor {
    Eigen::Index dim;
    std::mt19937_64& engine;

    DensityOperator operator()(const HaarPure&) const {
        ComplexVector psi(dim);
        for (Eigen::Index i = 0; i < dim; ++i) psi(i) = complex_normal(engine);
        return pure_state(psi);
    }

    DensityOperator operator()(const GinibreMixed& g) const {
        if (g.rank < 1 || g.rank > dim) {
            throw Error(ErrorCode::InvalidRank,
                        "rank " + std::to_string(g.rank) + " outside [1, " + std::to_string(dim) + "]");
        }
        ComplexMatrix m(dim, g.rank);
        for (Eigen::Index j = 0; j < g.rank; ++j)
            for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = complex_normal(engine);
        ComplexMatrix rho = m * m.adjoint();
        rho /= rho.trace().real();
        rho = (rho + rho.adjoint()).eval() * 0.5;
        return DensityOperator(std::move(rho), DensityOperator::trusted);
    }

    DensityOperator operator()(const BlochVector& b) const {
        if (dim != 2) throw Error(ErrorCode::InvalidArgument, "Bloch states require dim 2");
        return bloch_state(b.x, b.y, b.z);
    }
};

}  // namespace

DensityOperator random_state(const RandomSpec& spec, std::mt19937_64& engine) {
    if (spec.dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    return std::visit(RandomVisitor{spec.dim, engine}, spec.kind);
}

DensityOperator random_state(const RandomSpec& spec, std::uint64_t stream) {
    auto engine = make_engine(spec.seed, stream);
    return random_state(spec, engine);
}

ComplexMatrix translation_unitary(const Observable& k, double theta) {
    return k.spectrum().synthesize([theta](double e) { return std::polar(1.0, -e * theta); });
}

DensityOperator translate(const DensityOperator& rho, const Observable& k, double theta) {
    require_same_dim(rho.dim(), k.dim(), "translate");
    const ComplexMatrix u = translation_unitary(k, theta);
    ComplexMatrix out = u * rho.matrix() * u.adjoint();
    out = (out + out.adjoint()).eval() * 0.5;
    return DensityOperator(std::move(out), DensityOperator::trusted);
}

DensityOperator dephase_in_eigenbasis(const DensityOperator& rho, const Observable& k) {
    require_same_dim(rho.dim(), k.dim(), "dephase_in_eigenbasis");
    const auto& spec = k.spectrum();
    const Eigen::Index d = k.dim();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    Eigen::Index begin = 0;
    while (begin < d) {
        Eigen::Index end = begin + 1;
        while (end < d && spec.eigenvalues(end - 1) - spec.eigenvalues(end) <= kDegeneracyGap) ++end;
        const auto v = spec.eigenvectors.middleCols(begin, end - begin);
        const ComplexMatrix proj = v * v.adjoint();
        out += proj * rho.matrix() * proj;
        begin = end;
    }
    out = (out + out.adjoint()).eval() * 0.5;
    return DensityOperator(std::move(out), DensityOperator::trusted);
}

}  // namespace asymforge
