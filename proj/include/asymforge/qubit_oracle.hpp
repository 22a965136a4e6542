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

#include <array>
#include <cstdint>
#include <random>

#include "asymforge/states.hpp"

namespace asymforge::qubit {

/// A qubit state r and an observable K = k_+ |k_+><k_+| + k_- |k_-><k_-|
/// whose eigenvectors are the spin states along `k_axis`.
struct QubitFixture {
    std::array<double, 3> bloch{0, 0, 0};
    double k_plus = 1.0;
    double k_minus = -1.0;
    std::array<double, 3> k_axis{0, 0, 1};
};

/// Throws NotPSD for |r| > 1 (beyond 1e-12) and InvalidArgument for a
/// non-unit axis or non-finite entries.
void validate(const QubitFixture& f);

DensityOperator state(const QubitFixture& f);
Observable observable(const QubitFixture& f);
/// Columns |k_+>, |k_->, in the gauge (cos(t/2), e^{ip} sin(t/2)) and
/// (sin(t/2), -e^{ip} cos(t/2)) for the axis at polar angle t, azimuth p.
ComplexMatrix k_frame(const QubitFixture& f);
/// <k_+|rho|k_->.
Complex off_diagonal(const QubitFixture& f);

double atr_closed(const QubitFixture& f);
/// Sum_x |Im <x|K rho|x>| over the basis with Bloch angles (alpha, beta)
/// relative to the K frame.
double aw_profile(const QubitFixture& f, double alpha, double beta);
/// Standard deviation of K.
double variance_closed(const QubitFixture& f);
double qfi_closed(const QubitFixture& f);
/// Maximal KD nonreality with the K eigenbasis held fixed.
double ckd_closed(const QubitFixture& f);

/// |k_+ - k_-| / max(|k_+|, |k_-|); at most 2, with equality iff k_- = -k_+.
double fundamental_ratio(double k_plus, double k_minus);

/// Uniform Bloch ball state, spectrum uniform in [-2, 2]^2, uniform axis.
QubitFixture random_fixture(std::mt19937_64& engine);
/// Same, with spectrum (+1, -1).
QubitFixture random_pm_fixture(std::mt19937_64& engine);

QubitFixture q1();
QubitFixture q2();
QubitFixture px();
QubitFixture mm();

}  // namespace asymforge::qubit
