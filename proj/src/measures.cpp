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

#include "asymforge/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace asymforge {

namespace {

constexpr std::array<std::pair<MeasureName, std::string_view>, 12> kMeasureNames{{
    {MeasureName::a_tr, "a_tr"},
    {MeasureName::a_tr_normalized, "a_tr_normalized"},
    {MeasureName::a_w_at_basis, "a_w_at_basis"},
    {MeasureName::variance, "variance"},
    {MeasureName::qfi, "qfi"},
    {MeasureName::qfi_normalized, "qfi_normalized"},
    {MeasureName::l1_coherence, "l1_coherence"},
    {MeasureName::c_kd_fixed_k, "c_kd_fixed_k"},
    {MeasureName::purity, "purity"},
    {MeasureName::purity_bound, "purity_bound"},
    {MeasureName::noncomm_avg, "noncomm_avg"},
    {MeasureName::wy_skew, "wy_skew"},
}};

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) * 0.5; }

}  // namespace

std::string_view to_string(MeasureName name) {
    for (const auto& [n, s] : kMeasureNames)
        if (n == name) return s;
    return "unknown";
}

std::optional<MeasureName> parse_measure_name(std::string_view s) {
    for (const auto& [n, str] : kMeasureNames)
        if (str == s) return n;
    return std::nullopt;
}

namespace kernels {

ComplexMatrix asymmetry_generator(const ComplexMatrix& rho, const ComplexMatrix& k) {
    const ComplexMatrix kr = k * rho;
    return hermitian_part(Complex(0, 1) * (kr - kr.adjoint()));
}

double trace_asymmetry(const ComplexMatrix& rho, const ComplexMatrix& k) {
    const ComplexMatrix c = asymmetry_generator(rho, k);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(c, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double noncomm(const ComplexMatrix& rho, const ComplexMatrix& x, const ComplexMatrix& k) {
    return 0.5 * std::abs((commutator(x, k) * rho).trace());
}

}  // namespace kernels

TraceAsymmetry trace_asymmetry_decomposition(const DensityOperator& rho, const Observable& k) {
    require_same_dim(rho.dim(), k.dim(), "trace_asymmetry");
    const auto spec = hermitian_eig(kernels::asymmetry_generator(rho.matrix(), k.matrix()));
    return {0.5 * spec.eigenvalues.cwiseAbs().sum(), OrthonormalBasis(spec.eigenvectors), spec.eigenvalues};
}

double trace_asymmetry(const DensityOperator& rho, const Observable& k) {
    require_same_dim(rho.dim(), k.dim(), "trace_asymmetry");
    return kernels::trace_asymmetry(rho.matrix(), k.matrix());
}

double normalized_trace_asymmetry(const DensityOperator& rho, const Observable& k) {
    if (k.is_trivial()) throw Error(ErrorCode::TrivialObservable, "||K||_max is zero");
    return trace_asymmetry(rho, k) / k.spectral_radius();
}

double variance(const DensityOperator& rho, const Observable& k) {
    require_same_dim(rho.dim(), k.dim(), "variance");
    const ComplexMatrix kr = k.matrix() * rho.matrix();
    const double mean = kr.trace().real();
    const double second = (k.matrix() * kr).trace().real();
    return std::max(0.0, second - mean * mean);
}

double qfi(const DensityOperator& rho, const Observable& k) {
    require_same_dim(rho.dim(), k.dim(), "qfi");
    const auto spec = hermitian_eig(rho.matrix());
    const ComplexMatrix kk = spec.eigenvectors.adjoint() * k.matrix() * spec.eigenvectors;
    const Eigen::Index d = rho.dim();
    double sum = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double li = std::max(0.0, spec.eigenvalues(i));
        for (Eigen::Index j = 0; j < d; ++j) {
            const double lj = std::max(0.0, spec.eigenvalues(j));
            const double s = li + lj;
            if (s <= kQfiEps) continue;
            sum += (li - lj) * (li - lj) / s * std::norm(kk(i, j));
        }
    }
    return 2.0 * sum;
}

double normalized_qfi(const DensityOperator& rho, const Observable& k) {
    if (k.is_trivial()) throw Error(ErrorCode::TrivialObservable, "||K||_max is zero");
    return qfi(rho, k) / (k.spectral_radius() * k.spectral_radius());
}

double l1_coherence(const DensityOperator& rho, const OrthonormalBasis& basis) {
    require_same_dim(rho.dim(), basis.dim(), "l1_coherence");
    const ComplexMatrix m = basis.matrix().adjoint() * rho.matrix() * basis.matrix();
    return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

double purity(const DensityOperator& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

double purity_bound(const DensityOperator& rho) {
    const double d = static_cast<double>(rho.dim());
    return std::sqrt(d - 1.0) * std::sqrt(std::max(0.0, d * purity(rho) - 1.0));
}

double noncomm_avg(const DensityOperator& rho, const Observable& x, const Observable& k) {
    require_same_dim(rho.dim(), k.dim(), "noncomm_avg");
    require_same_dim(rho.dim(), x.dim(), "noncomm_avg");
    if (x.is_trivial() || k.is_trivial()) throw Error(ErrorCode::TrivialObservable, "||X||_max or ||K||_max is zero");
    return kernels::noncomm(rho.matrix(), x.matrix() / x.spectral_radius(), k.matrix() / k.spectral_radius());
}

double wy_skew(const DensityOperator& rho, const Observable& k) {
    require_same_dim(rho.dim(), k.dim(), "wy_skew");
    // Eigenvalues at rounding level are zero in exact arithmetic; their
    // square roots (about 1e-8) would otherwise dominate the error.
    const auto spec = hermitian_eig(rho.matrix());
    const double floor = 64 * std::numeric_limits<double>::epsilon() * static_cast<double>(rho.dim());
    const ComplexMatrix root = spec.synthesize([floor](double e) { return e <= floor ? 0.0 : std::sqrt(e); });
    const ComplexMatrix c = commutator(root, k.matrix());
    return std::max(0.0, -0.5 * (c * c).trace().real());
}

}  // namespace asymforge
