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

#include <complex>
#include <cstddef>
#include <vector>

#include "asymforge/states.hpp"

namespace asymforge {

/// Outcomes with Tr(Pi_x rho) at or below this are excluded from weak-value
/// ratios. Division-free sums keep them as (vanishing) terms.
inline constexpr double kProbFloor = 1e-12;

struct WeakValueRecord {
    std::size_t outcome_index = 0;
    Complex value;      // <x|K rho|x> / <x|rho|x>
    double prob = 0;    // <x|rho|x>
};

struct WeakValueSet {
    std::vector<WeakValueRecord> records;
    std::size_t omitted = 0;  // outcomes at or below kProbFloor
};

WeakValueSet weak_values(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis);

/// sum_x |Im <x|K rho|x>|, the quantity maximized over bases in A_w.
double avg_abs_im_weak_value(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis);

/// Kirkwood-Dirac quasiprobability table Pr_KD(k, x | rho) = <x|k><k|rho|x>.
class KDDistribution {
  public:
    KDDistribution(OrthonormalBasis k_basis, OrthonormalBasis x_basis, ComplexMatrix table)
        : k_basis_(std::move(k_basis)), x_basis_(std::move(x_basis)), table_(std::move(table)) {}

    const OrthonormalBasis& k_basis() const { return k_basis_; }
    const OrthonormalBasis& x_basis() const { return x_basis_; }
    /// table()(k, x).
    const ComplexMatrix& table() const { return table_; }

    Complex total() const { return table_.sum(); }
    ComplexVector k_marginals() const { return table_.rowwise().sum(); }
    ComplexVector x_marginals() const { return table_.colwise().sum().transpose(); }

  private:
    OrthonormalBasis k_basis_;
    OrthonormalBasis x_basis_;
    ComplexMatrix table_;
};

KDDistribution kd_distribution(const DensityOperator& rho, const OrthonormalBasis& k_basis,
                               const OrthonormalBasis& x_basis);

/// sum_{k,x} |Im Pr_KD(k, x | rho)|.
double kd_total_im(const KDDistribution& dist);

/// Largest discrepancy between Im K_w(Pi_x|rho) and the central-difference
/// score (1/2) d/dtheta Pr(x|rho_theta) / Pr(x|rho) at step h.
double score_function_check(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis,
                            double h = 1e-4);

/// Unchecked matrix kernels shared with the optimizers.
namespace kernels {

/// sum_x |Im (U^dagger M U)_xx|.
double abs_im_diagonal_sum(const ComplexMatrix& m, const ComplexMatrix& u);

/// Born probabilities (U^dagger rho U)_xx.
RealVector outcome_probabilities(const ComplexMatrix& rho, const ComplexMatrix& u);

/// Pr_KD table for k-basis columns ku and x-basis columns xu.
ComplexMatrix kd_table(const ComplexMatrix& rho, const ComplexMatrix& ku, const ComplexMatrix& xu);

double kd_abs_im_sum(const ComplexMatrix& rho, const ComplexMatrix& ku, const ComplexMatrix& xu);

}  // namespace kernels

}  // namespace asymforge
