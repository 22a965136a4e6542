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

#include <gtest/gtest.h>

#include "asymforge/error.hpp"
#include "test_support.hpp"

namespace asymforge {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::InvalidArgument;
}

double purity_of(const ComplexMatrix& m) { return (m * m).trace().real(); }

TEST(ValidateState, Examples) {
    const auto mm = validate_state(ComplexMatrix::Identity(2, 2) / 2.0);
    EXPECT_NEAR(purity_of(mm.matrix()), 0.5, 1e-15);
    EXPECT_EQ(code_of([] { validate_state(testing::bloch_matrix(1.2, 0, 0)); }), ErrorCode::NotPSD);
    const auto q2 = validate_state(testing::bloch_matrix(0.6, 0.3, 0));
    EXPECT_NEAR(purity_of(q2.matrix()), 0.725, 1e-15);
}

TEST(ValidateState, EachInvariantIsNamed) {
    EXPECT_EQ(code_of([] { validate_state(ComplexMatrix::Identity(2, 3)); }), ErrorCode::NotSquare);
    EXPECT_EQ(code_of([] { validate_state(testing::mat2(0.5, 0.1, 0, 0.5)); }), ErrorCode::NotHermitian);
    EXPECT_EQ(code_of([] { validate_state(testing::mat2(0.6, 0, 0, 0.5)); }), ErrorCode::TraceNotOne);
    EXPECT_EQ(code_of([] { validate_state(testing::mat2(1.5, 0, 0, -0.5)); }), ErrorCode::NotPSD);
    EXPECT_EQ(code_of([] { validate_state(testing::mat2(Complex(std::nan(""), 0), 0, 0, 0.5)); }),
              ErrorCode::InvalidArgument);
}

TEST(ValidateState, AcceptsRoundoffAndKeepsMatrixUntouched) {
    ComplexMatrix m = testing::bloch_matrix(1, 0, 0);
    m(0, 0) += 4e-10;
    m(1, 1) -= 4e-10;
    const auto rho = validate_state(m);
    EXPECT_EQ(rho.matrix(), m);
}

TEST(RandomState, HaarPureIsRankOne) {
    RandomSpec spec{4, HaarPure{}, 7};
    const auto rho = random_state(spec);
    EXPECT_NEAR(purity_of(rho.matrix()), 1.0, 1e-12);
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
}

TEST(RandomState, GinibreRanks) {
    for (Eigen::Index r = 1; r <= 4; ++r) {
        RandomSpec spec{4, GinibreMixed{r}, 3};
        const auto rho = random_state(spec);
        const auto eig = testing::eigenvalues_oracle(rho.matrix());
        int count = 0;
        for (Eigen::Index i = 0; i < eig.size(); ++i) count += eig(i) > 1e-9;
        EXPECT_EQ(count, r);
        EXPECT_GT(eig.minCoeff(), -1e-12);
    }
    EXPECT_EQ(code_of([] { random_state(RandomSpec{3, GinibreMixed{4}, 0}); }), ErrorCode::InvalidRank);
    EXPECT_EQ(code_of([] { random_state(RandomSpec{3, GinibreMixed{0}, 0}); }), ErrorCode::InvalidRank);
}

TEST(RandomState, BlochFixture) {
    const auto rho = random_state(RandomSpec{2, BlochVector{0.6, 0, 0}, 0});
    EXPECT_LE(max_abs_entry(rho.matrix() - testing::bloch_matrix(0.6, 0, 0)), 1e-15);
    EXPECT_EQ(code_of([] { random_state(RandomSpec{3, BlochVector{0.1, 0, 0}, 0}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { bloch_state(0.8, 0.8, 0); }), ErrorCode::NotPSD);
}

TEST(RandomState, SeedsReproduceAndDiffer) {
    const RandomSpec a{5, GinibreMixed{3}, 42}, b{5, GinibreMixed{3}, 43};
    EXPECT_EQ(random_state(a).matrix(), random_state(a).matrix());
    EXPECT_GT(max_abs_entry(random_state(a).matrix() - random_state(b).matrix()), 1e-3);
    EXPECT_GT(max_abs_entry(random_state(a, 0).matrix() - random_state(a, 1).matrix()), 1e-3);
}

TEST(RandomUnitary, IsUnitary) {
    auto engine = make_engine(1);
    for (Eigen::Index d = 1; d <= 8; ++d) EXPECT_LE(unitarity_defect(random_unitary(d, engine)), 1e-12);
}

TEST(Observable, SpectralData) {
    const Observable k(testing::mat2(2, 0, 0, -3));
    EXPECT_DOUBLE_EQ(k.spectral_radius(), 3.0);
    EXPECT_FALSE(k.is_trivial());
    EXPECT_FALSE(k.is_proportional_to_identity());
    EXPECT_NEAR(k.normalized().spectral_radius(), 1.0, 1e-15);
    const Observable id(ComplexMatrix::Identity(3, 3) * 2.0);
    EXPECT_TRUE(id.is_proportional_to_identity());
    const Observable zero(ComplexMatrix::Zero(2, 2));
    EXPECT_TRUE(zero.is_trivial());
    EXPECT_EQ(code_of([&] { zero.normalized(); }), ErrorCode::TrivialObservable);
    EXPECT_EQ(code_of([] { Observable(testing::mat2(0, 1, 0, 0)); }), ErrorCode::NotHermitian);
}

TEST(OrthonormalBasis, RejectsNonUnitary) {
    EXPECT_EQ(code_of([] { OrthonormalBasis(testing::mat2(1, 1, 0, 1)); }), ErrorCode::NotUnitary);
    EXPECT_NO_THROW(OrthonormalBasis(testing::y_basis()));
    const auto b = OrthonormalBasis(testing::y_basis()).rephased(RealVector::Constant(2, 0.4));
    EXPECT_LE(unitarity_defect(b.matrix()), 1e-14);
}

TEST(Translate, Examples) {
    const Observable z(testing::sz());
    const auto px = testing::px_state();
    EXPECT_LE(max_abs_entry(translate(px, z, 0.0).matrix() - px.matrix()), 1e-15);
    const auto diag = DensityOperator(testing::mat2(0.7, 0, 0, 0.3), DensityOperator::trusted);
    EXPECT_LE(max_abs_entry(translate(diag, z, 1.234).matrix() - diag.matrix()), 1e-12);
    // exp(-i sz theta) turns the Bloch vector by 2 theta about z: rho_01 picks up exp(-2i theta).
    const auto half = translate(px, z, M_PI / 2);
    EXPECT_LE(max_abs_entry(half.matrix() - testing::bloch_matrix(-1, 0, 0)), 1e-12);
    const auto quarter = translate(px, z, M_PI / 4);
    EXPECT_LE(max_abs_entry(quarter.matrix() - testing::bloch_matrix(0, 1, 0)), 1e-12);
    EXPECT_EQ(code_of([&] { translate(px, Observable(ComplexMatrix::Identity(3, 3)), 0.1); }),
              ErrorCode::DimMismatch);
}

TEST(Translate, PreservesSpectrum) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 2 + trial % 5;
        const auto rho = testing::gaussian_state(d, 1 + trial % d, rng);
        const Observable k(testing::gaussian_hermitian(d, rng));
        const auto moved = translate(rho, k, 0.77);
        EXPECT_LE((testing::eigenvalues_oracle(moved.matrix()) - testing::eigenvalues_oracle(rho.matrix()))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-9);
        EXPECT_NEAR(purity_of(moved.matrix()), purity_of(rho.matrix()), 1e-10);
    }
}

TEST(Dephase, Examples) {
    const auto q1 = testing::q1_state();
    EXPECT_LE(max_abs_entry(dephase_in_eigenbasis(q1, Observable(testing::sz())).matrix() -
                            ComplexMatrix::Identity(2, 2) / 2.0),
              1e-12);
    const auto diag = DensityOperator(testing::mat2(0.7, 0, 0, 0.3), DensityOperator::trusted);
    EXPECT_LE(max_abs_entry(dephase_in_eigenbasis(diag, Observable(testing::sz())).matrix() - diag.matrix()),
              1e-12);
    const auto px = testing::px_state();
    EXPECT_LE(max_abs_entry(dephase_in_eigenbasis(px, Observable(testing::sx())).matrix() - px.matrix()), 1e-12);
}

TEST(Dephase, DegenerateClustersKeepBlocks) {
    // K = diag(1, 1, -1): the top 2x2 block survives.
    ComplexMatrix k = ComplexMatrix::Zero(3, 3);
    k(0, 0) = 1;
    k(1, 1) = 1;
    k(2, 2) = -1;
    const ComplexMatrix psi = ComplexMatrix::Constant(3, 1, 1.0 / std::sqrt(3.0));
    const auto rho = DensityOperator(psi * psi.adjoint(), DensityOperator::trusted);
    const auto out = dephase_in_eigenbasis(rho, Observable(k)).matrix();
    EXPECT_NEAR(std::abs(out(0, 1)), 1.0 / 3.0, 1e-12);
    EXPECT_LE(std::abs(out(0, 2)), 1e-12);
    EXPECT_LE(std::abs(out(1, 2)), 1e-12);
}

TEST(Dephase, OutputCommutesWithK) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 2 + trial % 5;
        const auto rho = testing::gaussian_state(d, d, rng);
        const Observable k(testing::gaussian_hermitian(d, rng));
        const auto out = dephase_in_eigenbasis(rho, k);
        EXPECT_LE(max_abs_entry(commutator(out.matrix(), k.matrix())), 1e-10);
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
    }
}

TEST(PureState, NormalizesInput) {
    ComplexVector psi(2);
    psi << 3.0, Complex(0, 4.0);
    const auto rho = pure_state(psi);
    EXPECT_NEAR(purity_of(rho.matrix()), 1.0, 1e-14);
    EXPECT_NEAR(rho.matrix()(0, 0).real(), 9.0 / 25.0, 1e-14);
}

}  // namespace
}  // namespace asymforge
