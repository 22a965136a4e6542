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

#include "asymforge/qubit_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "asymforge/rng.hpp"

namespace asymforge::qubit {

namespace {

double norm3(const std::array<double, 3>& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Squared length of the Bloch component perpendicular to the axis.
double perp_sq(const QubitFixture& f) {
    const double along = dot3(f.bloch, f.k_axis);
    return std::max(0.0, dot3(f.bloch, f.bloch) - along * along);
}

std::array<double, 3> random_direction(std::mt19937_64& engine) {
    for (;;) {
        std::array<double, 3> v{standard_normal(engine), standard_normal(engine), standard_normal(engine)};
        const double n = norm3(v);
        if (n > 1e-8) return {v[0] / n, v[1] / n, v[2] / n};
    }
}

}  // namespace

void validate(const QubitFixture& f) {
    for (const double v : {f.bloch[0], f.bloch[1], f.bloch[2], f.k_plus, f.k_minus, f.k_axis[0], f.k_axis[1],
                           f.k_axis[2]}) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "fixture entries must be finite");
    }
    if (norm3(f.bloch) > 1.0 + 1e-12) throw Error(ErrorCode::NotPSD, "Bloch vector longer than 1");
    if (std::abs(norm3(f.k_axis) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "k_axis must be a unit vector");
}

DensityOperator state(const QubitFixture& f) {
    validate(f);
    return bloch_state(f.bloch[0], f.bloch[1], f.bloch[2]);
}

ComplexMatrix k_frame(const QubitFixture& f) {
    validate(f);
    const double theta = std::acos(std::clamp(f.k_axis[2], -1.0, 1.0));
    const double phi = std::atan2(f.k_axis[1], f.k_axis[0]);
    const Complex e = std::polar(1.0, phi);
    ComplexMatrix v(2, 2);
    v << std::cos(theta / 2), std::sin(theta / 2), e * std::sin(theta / 2), -e * std::cos(theta / 2);
    return v;
}

Observable observable(const QubitFixture& f) {
    const ComplexMatrix v = k_frame(f);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = f.k_plus;
    d(1, 1) = f.k_minus;
    ComplexMatrix k = v * d * v.adjoint();
    k = (0.5 * (k + k.adjoint())).eval();
    return Observable(k);
}

Complex off_diagonal(const QubitFixture& f) {
    const ComplexMatrix v = k_frame(f);
    return v.col(0).dot(state(f).matrix() * v.col(1));
}

double atr_closed(const QubitFixture& f) {
    validate(f);
    return std::abs(f.k_plus - f.k_minus) * std::sqrt(perp_sq(f)) / 2.0;
}

double aw_profile(const QubitFixture& f, double alpha, double beta) {
    const Complex r01 = off_diagonal(f);
    return std::abs(f.k_plus - f.k_minus) * std::abs(r01) * std::abs(std::sin(alpha)) *
           std::abs(std::sin(beta + std::arg(r01)));
}

double variance_closed(const QubitFixture& f) {
    validate(f);
    const double along = dot3(f.bloch, f.k_axis);
    return 0.5 * std::abs(f.k_plus - f.k_minus) * std::sqrt(std::max(0.0, 1.0 - along * along));
}

double qfi_closed(const QubitFixture& f) {
    validate(f);
    const double dk = f.k_plus - f.k_minus;
    return dk * dk * perp_sq(f);
}

double ckd_closed(const QubitFixture& f) {
    validate(f);
    return std::sqrt(perp_sq(f));
}

double fundamental_ratio(double k_plus, double k_minus) {
    const double m = std::max(std::abs(k_plus), std::abs(k_minus));
    if (!(m > 0)) throw Error(ErrorCode::TrivialObservable, "spectrum is zero");
    return std::abs(k_plus - k_minus) / m;
}

QubitFixture random_fixture(std::mt19937_64& engine) {
    QubitFixture f;
    const auto dir = random_direction(engine);
    const double radius = std::min(1.0, std::cbrt(uniform01(engine)));
    f.bloch = {radius * dir[0], radius * dir[1], radius * dir[2]};
    f.k_plus = 4.0 * uniform01(engine) - 2.0;
    f.k_minus = 4.0 * uniform01(engine) - 2.0;
    f.k_axis = random_direction(engine);
    return f;
}

QubitFixture random_pm_fixture(std::mt19937_64& engine) {
    QubitFixture f = random_fixture(engine);
    f.k_plus = 1.0;
    f.k_minus = -1.0;
    return f;
}

QubitFixture q1() { return {{0.6, 0, 0}, 1, -1, {0, 0, 1}}; }
QubitFixture q2() { return {{0.6, 0.3, 0}, 1, -1, {0, 0, 1}}; }
QubitFixture px() { return {{1, 0, 0}, 1, -1, {0, 0, 1}}; }
QubitFixture mm() { return {{0, 0, 0}, 1, -1, {0, 0, 1}}; }

}  // namespace asymforge::qubit
