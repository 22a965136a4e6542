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

#include "asymforge/bounds.hpp"

#include <gtest/gtest.h>

#include "asymforge/error.hpp"
#include "test_support.hpp"

namespace asymforge {
namespace {

const Observable kSz(testing::sz());
const Observable kSx(testing::sx());
const Observable kSy(testing::sy());

void expect_sides(const BoundReport& r, double lhs, double rhs, double tol) {
    EXPECT_NEAR(r.lhs, lhs, tol) << to_string(r.bound_id);
    EXPECT_NEAR(r.rhs, rhs, tol) << to_string(r.bound_id);
    EXPECT_TRUE(r.satisfied) << to_string(r.bound_id) << " slack " << r.slack;
}

TEST(BoundIds, ParseAndSelect) {
    EXPECT_EQ(kAllBounds.size(), 16u);
    for (const auto id : kAllBounds) EXPECT_EQ(parse_bound_id(to_string(id)), std::optional<BoundId>(id));
    EXPECT_EQ(parse_bound_selection("all").size(), 16u);
    const auto some = parse_bound_selection("P2,C5,P2");
    ASSERT_EQ(some.size(), 2u);
    EXPECT_EQ(some[1], BoundId::C5);
    try {
        parse_bound_selection("BOGUS");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownBoundId);
    }
    EXPECT_FALSE(parse_bound_id("p2x").has_value());
}

TEST(P2, Examples) {
    const auto px = check_p2(testing::px_state(), kSz);
    expect_sides(px, 1.0, 1.0, 1e-12);
    EXPECT_NEAR(px.slack, 0.0, 1e-8);
    expect_sides(check_p2(testing::q1_state(), kSz), 0.6, 1.0, 1e-12);
    expect_sides(check_p2(testing::mm_state(2), kSz), 0.0, 1.0, 1e-12);
    EXPECT_THROW(check_p2(testing::q1_state(), Observable(ComplexMatrix::Identity(3, 3))), Error);
}

TEST(P3, Examples) {
    const auto q1 = check_p3(testing::q1_state(), kSz);
    expect_sides(q1, 0.36, 0.36, 1e-12);
    EXPECT_NEAR(q1.slack, 0.0, 1e-8);
    std::mt19937_64 rng(111);
    const auto r = check_p3(testing::gaussian_state(4, 4, rng), Observable(testing::gaussian_hermitian(4, rng)));
    EXPECT_TRUE(r.satisfied);
    EXPECT_GE(r.slack, 0.0);
    const auto sym = DensityOperator(testing::mat2(0.7, 0, 0, 0.3), DensityOperator::trusted);
    expect_sides(check_p3(sym, kSz), 0.0, 0.0, 1e-15);
}

TEST(P4, Examples) {
    expect_sides(check_p4(testing::q1_state(), kSz), 0.6, 0.6, 1e-6);
    expect_sides(check_p4(testing::q1_state(), Observable(testing::mat2(1, 0, 0, 0.5))), 0.15, 0.6, 1e-6);
    expect_sides(check_p4(testing::mm_state(2), kSz), 0.0, 0.0, 1e-12);
}

TEST(C1, Examples) {
    expect_sides(check_c1(testing::q1_state(), kSz), 0.6, 0.6, 1e-12);
    expect_sides(check_c1(testing::q2_state(), kSz), std::sqrt(0.45), std::sqrt(0.45), 1e-12);
    std::mt19937_64 rng(113);
    ComplexMatrix k = ComplexMatrix::Zero(3, 3);
    k(0, 0) = 2;
    k(1, 1) = 1;
    k(2, 2) = -1;
    EXPECT_TRUE(check_c1(testing::gaussian_state(3, 3, rng), Observable(k)).satisfied);
}

TEST(C2C3, Examples) {
    RealVector pm(2);
    pm << 1, -1;
    expect_sides(check_c2(testing::q1_state(), pm), 0.6, 0.6, 1e-6);
    expect_sides(check_c2(testing::mm_state(2), pm), 0.0, 0.0, 1e-12);
    std::mt19937_64 rng(117);
    RealVector s3(3);
    s3 << 1, 0, -1;
    const auto r = check_c2(testing::gaussian_state(3, 2, rng), s3);
    EXPECT_TRUE(r.satisfied);
    EXPECT_TRUE(r.optimizer_assisted);
    EXPECT_DOUBLE_EQ(r.tolerance, kOptimizerSlackTol);
    expect_sides(check_c3(testing::q2_state()), std::sqrt(0.45), std::sqrt(0.45), 1e-6);
}

TEST(P5, Examples) {
    expect_sides(check_p5(testing::q2_state(), kSz), std::sqrt(0.45), std::sqrt(0.45), 1e-12);
    expect_sides(check_p5(testing::mm_state(2), kSz), 0.0, 0.0, 1e-7);
    std::mt19937_64 rng(119);
    const auto r = check_p5(testing::gaussian_state(3, 1, rng), Observable(testing::gaussian_hermitian(3, rng)));
    EXPECT_LE(r.lhs, 2.0);
    EXPECT_NEAR(r.rhs, 2.0, 1e-7);
}

TEST(L1C4, Examples) {
    expect_sides(check_l1(testing::q1_state(), kSz, kSy), 0.6, 0.6, 1e-12);
    expect_sides(check_l1(testing::q2_state(), kSz, kSx), 0.3, std::sqrt(0.45), 1e-12);
    const auto same = check_l1(testing::q2_state(), kSz, kSz);
    EXPECT_NEAR(same.lhs, 0.0, 1e-15);
    EXPECT_TRUE(same.satisfied);
    expect_sides(check_c4(testing::q1_state(), kSz), 0.6, 0.6, 1e-6);
    EXPECT_THROW(check_l1(testing::q1_state(), kSz, Observable(ComplexMatrix::Zero(2, 2))), Error);
}

TEST(Order19, Examples) {
    const auto q1 = check_order19(testing::q1_state());
    ASSERT_EQ(q1.terms.size(), 3u);
    for (const double t : q1.terms) EXPECT_NEAR(t, 0.6, 1e-6);
    EXPECT_TRUE(q1.satisfied);
    EXPECT_EQ(q1.orientation, Orientation::lhs_ge_rhs);
    const auto mm = check_order19(testing::mm_state(2));
    for (const double t : mm.terms) EXPECT_NEAR(t, 0.0, 1e-12);
    std::mt19937_64 rng(127);
    const auto g = check_order19(testing::gaussian_state(3, 3, rng));
    EXPECT_TRUE(g.satisfied);
    EXPECT_GE(g.terms[0], g.terms[1] - 1e-4);
    EXPECT_GE(g.terms[1], g.terms[2] - 1e-4);
}

TEST(TradeOffs, Q2Examples) {
    const auto q2 = testing::q2_state();
    const double a = std::sqrt(0.45);
    expect_sides(check_p6(q2, kSz, kSx), a * 0.3, 0.09, 1e-12);
    expect_sides(check_p7(q2, kSz, kSx), std::sqrt(1.8) * 0.6, 0.36, 1e-12);
    expect_sides(check_p8(q2, kSz, kSx), std::sqrt(1.8) * 0.3, 0.18, 1e-12);
    expect_sides(check_c6(q2, kSz, kSx), std::sqrt(1.8) * 0.3, 0.18, 1e-12);
    for (const auto& r : {check_p6(q2, kSz, kSz), check_p7(q2, kSz, kSz), check_p8(q2, kSz, kSz), check_c6(q2, kSz, kSz)}) {
        EXPECT_NEAR(r.rhs, 0.0, 1e-15);
        EXPECT_TRUE(r.satisfied);
    }
}

TEST(C5, Examples) {
    expect_sides(check_c5(testing::q1_state(), kSz), 1.2, 1.2, 1e-6);
    const auto sym = DensityOperator(testing::mat2(0.7, 0, 0, 0.3), DensityOperator::trusted);
    expect_sides(check_c5(sym, kSz), 0.0, 0.0, 1e-12);
}

TEST(ApproximationChain, Examples) {
    const auto px = check_appx_b(testing::px_state(), kSz);
    ASSERT_EQ(px.terms.size(), 4u);
    for (const double t : px.terms) EXPECT_NEAR(t, 1.0, 1e-8);
    const auto q1 = check_appx_b(testing::q1_state(), kSz);
    EXPECT_NEAR(q1.terms.front(), 0.6, 1e-12);
    EXPECT_NEAR(q1.terms.back(), 1.0, 1e-12);
    for (std::size_t i = 1; i < q1.terms.size(); ++i) EXPECT_LE(q1.terms[i - 1], q1.terms[i] + 1e-12);
    const auto sym = check_appx_b(DensityOperator(testing::mat2(0.7, 0, 0, 0.3), DensityOperator::trusted), kSz);
    EXPECT_NEAR(sym.terms.front(), 0.0, 1e-15);
    EXPECT_TRUE(sym.satisfied);
}

TEST(Slack, OrientationAndTolerance) {
    const auto r = check_p2(testing::q1_state(), kSz);
    EXPECT_EQ(r.orientation, Orientation::lhs_le_rhs);
    EXPECT_NEAR(r.slack, r.rhs - r.lhs, 1e-15);
    EXPECT_DOUBLE_EQ(r.tolerance, kClosedFormSlackTol);
    const auto g = check_p6(testing::q2_state(), kSz, kSx);
    EXPECT_NEAR(g.slack, g.lhs - g.rhs, 1e-15);
    const auto j = to_json(r);
    for (const char* key : {"bound_id", "lhs", "rhs", "slack", "satisfied", "inputs_digest"}) EXPECT_TRUE(j.contains(key));
}

TEST(CheckAll, SixteenRowsDeterministicAndMatchingSingles) {
    const auto inst = random_instance(3, 42, 5);
    BoundContext a(inst.rho, inst.k, inst.x, BoundContext::default_config(), inst.digest);
    BoundContext b(inst.rho, inst.k, inst.x, BoundContext::default_config(), inst.digest);
    const auto ra = check_all(a);
    const auto rb = check_all(b);
    ASSERT_EQ(ra.size(), 16u);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        EXPECT_EQ(to_json(ra[i]).dump(), to_json(rb[i]).dump());
        EXPECT_TRUE(ra[i].satisfied) << to_string(ra[i].bound_id);
        EXPECT_EQ(ra[i].inputs_digest, inst.digest);
    }
    BoundContext c(inst.rho, inst.k, inst.x, BoundContext::default_config(), inst.digest);
    EXPECT_EQ(to_json(check(BoundId::C5, c)).dump(), to_json(ra[11]).dump());
}

TEST(CheckAll, MissingSecondObservable) {
    BoundContext ctx(testing::q1_state(), kSz);
    EXPECT_THROW(check(BoundId::P6, ctx), Error);
    EXPECT_TRUE(needs_second_observable(BoundId::P6));
    EXPECT_FALSE(needs_second_observable(BoundId::P2));
}

TEST(RandomInstances, SuiteHoldsAcrossDimensions) {
    for (const Eigen::Index d : {2, 3, 4, 6}) {
        const int count = d == 6 ? 3 : 20;
        for (int i = 0; i < count; ++i) {
            auto inst = random_instance(d, 7, i);
            BoundContext ctx(inst.rho, inst.k, inst.x, BoundContext::default_config(), inst.digest);
            for (const auto& r : check_all(ctx)) {
                EXPECT_TRUE(r.satisfied) << inst.digest << " " << to_string(r.bound_id) << " slack " << r.slack;
            }
        }
    }
}

TEST(RandomInstances, ReproducibleAndAlternating) {
    const auto a = random_instance(4, 1, 2), b = random_instance(4, 1, 2), c = random_instance(4, 1, 3);
    EXPECT_EQ(a.rho.matrix(), b.rho.matrix());
    EXPECT_EQ(a.k.matrix(), b.k.matrix());
    EXPECT_NEAR((a.rho.matrix() * a.rho.matrix()).trace().real(), 1.0, 1e-12);
    EXPECT_GT(max_abs_entry(a.rho.matrix() - c.rho.matrix()), 1e-6);
}

}  // namespace
}  // namespace asymforge
