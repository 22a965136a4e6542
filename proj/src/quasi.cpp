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

#include "asymforge/quasi.hpp"

#include <algorithm>
#include <cmath>

namespace asymforge {

namespace kernels {

double abs_im_diagonal_sum(const ComplexMatrix& m, const ComplexMatrix& u) {
    const ComplexMatrix mu = m * u;
    double sum = 0;
    for (Eigen::Index x = 0; x < u.cols(); ++x) sum += std::abs(u.col(x).dot(mu.col(x)).imag());
    return sum;
}

RealVector outcome_probabilities(const ComplexMatrix& rho, const ComplexMatrix& u) {
    const ComplexMatrix ru = rho * u;
    RealVector p(u.cols());
    for (Eigen::Index x = 0; x < u.cols(); ++x) p(x) = u.col(x).dot(ru.col(x)).real();
    return p;
}

ComplexMatrix kd_table(const ComplexMatrix& rho, const ComplexMatrix& ku, const ComplexMatrix& xu) {
    const ComplexMatrix overlap = ku.adjoint() * xu;         // <k|x>
    const ComplexMatrix elements = ku.adjoint() * rho * xu;  // <k|rho|x>
    return overlap.conjugate().cwiseProduct(elements);
}

double kd_abs_im_sum(const ComplexMatrix& rho, const ComplexMatrix& ku, const ComplexMatrix& xu) {
    return kd_table(rho, ku, xu).imag().cwiseAbs().sum();
}

}  // namespace kernels

WeakValueSet weak_values(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis) {
    require_same_dim(rho.dim(), k.dim(), "weak_values");
    require_same_dim(rho.dim(), basis.dim(), "weak_values");
    const ComplexMatrix& u = basis.matrix();
    const ComplexMatrix numer = k.matrix() * rho.matrix() * u;
    const ComplexMatrix denom = rho.matrix() * u;
    WeakValueSet out;
    for (Eigen::Index x = 0; x < u.cols(); ++x) {
        const double p = u.col(x).dot(denom.col(x)).real();
        if (p <= kProbFloor) {
            ++out.omitted;
            continue;
        }
        out.records.push_back({static_cast<std::size_t>(x), u.col(x).dot(numer.col(x)) / p, p});
    }
    if (out.records.empty()) throw Error(ErrorCode::AllOutcomesBelowFloor, "no outcome has nonzero probability");
    return out;
}

double avg_abs_im_weak_value(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis) {
    require_same_dim(rho.dim(), k.dim(), "avg_abs_im_weak_value");
    require_same_dim(rho.dim(), basis.dim(), "avg_abs_im_weak_value");
    return kernels::abs_im_diagonal_sum(k.matrix() * rho.matrix(), basis.matrix());
}

KDDistribution kd_distribution(const DensityOperator& rho, const OrthonormalBasis& k_basis,
                               const OrthonormalBasis& x_basis) {
    require_same_dim(rho.dim(), k_basis.dim(), "kd_distribution");
    require_same_dim(rho.dim(), x_basis.dim(), "kd_distribution");
    return KDDistribution(k_basis, x_basis, kernels::kd_table(rho.matrix(), k_basis.matrix(), x_basis.matrix()));
}

double kd_total_im(const KDDistribution& dist) { return dist.table().imag().cwiseAbs().sum(); }

double score_function_check(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis,
                            double h) {
    if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    const auto wv = weak_values(rho, k, basis);
    const RealVector plus = kernels::outcome_probabilities(translate(rho, k, h).matrix(), basis.matrix());
    const RealVector minus = kernels::outcome_probabilities(translate(rho, k, -h).matrix(), basis.matrix());
    double worst = 0;
    for (const auto& r : wv.records) {
        const auto x = static_cast<Eigen::Index>(r.outcome_index);
        const double score = 0.5 * (plus(x) - minus(x)) / (2.0 * h * r.prob);
        worst = std::max(worst, std::abs(r.value.imag() - score));
    }
    return worst;
}

}  // namespace asymforge
