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

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "asymforge/quasi.hpp"
#include "asymforge/states.hpp"

namespace asymforge {

enum class MeasureName {
    a_tr,
    a_tr_normalized,
    a_w_at_basis,
    variance,
    qfi,
    qfi_normalized,
    l1_coherence,
    c_kd_fixed_k,
    purity,
    purity_bound,
    noncomm_avg,
    wy_skew,
};

std::string_view to_string(MeasureName name);
std::optional<MeasureName> parse_measure_name(std::string_view s);

struct MeasureValue {
    MeasureName name;
    double value = 0;
    std::map<std::string, std::string> metadata;
};

struct TraceAsymmetry {
    double value = 0;
    /// Eigenvectors of i[K, rho]; attains the supremum over bases in A_w.
    OrthonormalBasis optimal_basis;
    /// Eigenvalues of i[K, rho], descending.
    RealVector commutator_spectrum;
};

/// (1/2) ||[rho, K]||_1 together with the basis that realizes it as an
/// average absolute imaginary weak value.
TraceAsymmetry trace_asymmetry_decomposition(const DensityOperator& rho, const Observable& k);
double trace_asymmetry(const DensityOperator& rho, const Observable& k);
/// A_Tr / ||K||_max. Throws TrivialObservable when ||K||_max <= 1e-12.
double normalized_trace_asymmetry(const DensityOperator& rho, const Observable& k);

/// Tr(K^2 rho) - Tr(K rho)^2, clamped at zero.
double variance(const DensityOperator& rho, const Observable& k);

/// Terms with lambda_i + lambda_j at or below this are dropped from the QFI.
inline constexpr double kQfiEps = 1e-10;

/// Quantum Fisher information of exp(-i K theta) rho exp(i K theta) in the
/// symmetric-logarithmic-derivative closed form.
double qfi(const DensityOperator& rho, const Observable& k);
/// qfi / ||K||_max^2.
double normalized_qfi(const DensityOperator& rho, const Observable& k);

/// sum_{k != k'} |<k|rho|k'>| in the given basis.
double l1_coherence(const DensityOperator& rho, const OrthonormalBasis& basis);

double purity(const DensityOperator& rho);
/// sqrt(d - 1) * sqrt(d Tr(rho^2) - 1).
double purity_bound(const DensityOperator& rho);

/// |Tr([X~, K~] rho)| / 2 with X~, K~ normalized by spectral radius.
double noncomm_avg(const DensityOperator& rho, const Observable& x, const Observable& k);

/// -(1/2) Tr([sqrt(rho), K]^2).
double wy_skew(const DensityOperator& rho, const Observable& k);

namespace kernels {

/// i (K rho - rho K), Hermitian by construction.
ComplexMatrix asymmetry_generator(const ComplexMatrix& rho, const ComplexMatrix& k);
/// (1/2) sum |eig(i[K, rho])| without validation.
double trace_asymmetry(const ComplexMatrix& rho, const ComplexMatrix& k);
/// |Tr((X K - K X) rho)| / 2 for already-normalized operators.
double noncomm(const ComplexMatrix& rho, const ComplexMatrix& x, const ComplexMatrix& k);

}  // namespace kernels

}  // namespace asymforge
