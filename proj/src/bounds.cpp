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

#include <algorithm>
#include <cmath>

#include "asymforge/quasi.hpp"
#include "asymforge/rng.hpp"

namespace asymforge {

namespace {

struct BoundName {
    BoundId id;
    std::string_view name;
};

constexpr std::array<BoundName, 16> kNames = {{{BoundId::P2, "P2"},
                                               {BoundId::P3, "P3"},
                                               {BoundId::P4, "P4"},
                                               {BoundId::C1, "C1"},
                                               {BoundId::C2, "C2"},
                                               {BoundId::C3, "C3"},
                                               {BoundId::P5, "P5"},
                                               {BoundId::L1, "L1"},
                                               {BoundId::C4, "C4"},
                                               {BoundId::ORDER19, "ORDER19"},
                                               {BoundId::P6, "P6"},
                                               {BoundId::C5, "C5"},
                                               {BoundId::P7, "P7"},
                                               {BoundId::P8, "P8"},
                                               {BoundId::C6, "C6"},
                                               {BoundId::B_APPX, "B_APPX"}}};

/// Free-spectrum warm start reproducing a Hermitian operator.
FramePoint warm_from_operator(const ComplexMatrix& op) {
    const auto eig = hermitian_eig(op);
    return spectrum_warm_start(eig.eigenvectors, eig.eigenvalues);
}

/// Joint KD warm start: K's eigenframe with the commutator eigenbasis for X.
FramePoint kd_warm_from_operator(const ComplexMatrix& rho, const ComplexMatrix& op) {
    const auto k_eig = hermitian_eig(op);
    const auto c_eig = hermitian_eig(kernels::asymmetry_generator(rho, op));
    return FramePoint{{k_eig.eigenvectors, c_eig.eigenvectors}, {}};
}

/// Operator normalized by its spectral radius.
ComplexMatrix normalized_matrix(const Observable& o) {
    if (o.is_trivial()) throw Error(ErrorCode::TrivialObservable, "||K||_max is zero");
    return o.matrix() / o.spectral_radius();
}

BoundReport make_report(BoundId id, Orientation orientation, std::vector<double> terms, bool optimizer,
                        const std::string& digest) {
    BoundReport r;
    r.bound_id = id;
    r.orientation = orientation;
    r.optimizer_assisted = optimizer;
    r.tolerance = optimizer ? kOptimizerSlackTol : kClosedFormSlackTol;
    r.inputs_digest = digest;
    r.lhs = terms.front();
    r.rhs = terms.back();
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
        const double gap = orientation == Orientation::lhs_le_rhs ? terms[i + 1] - terms[i] : terms[i] - terms[i + 1];
        slack = std::min(slack, gap);
    }
    r.slack = slack;
    r.satisfied = slack >= -r.tolerance;
    r.terms = std::move(terms);
    return r;
}

BoundReport le(BoundId id, double lhs, double rhs, bool optimizer, const BoundContext& ctx) {
    return make_report(id, Orientation::lhs_le_rhs, {lhs, rhs}, optimizer, ctx.digest());
}

BoundReport ge(BoundId id, double lhs, double rhs, bool optimizer, const BoundContext& ctx) {
    return make_report(id, Orientation::lhs_ge_rhs, {lhs, rhs}, optimizer, ctx.digest());
}

void attach_meta(BoundReport& r, const std::string& prefix, const EstimationReport& e) {
    r.optimizer_meta[prefix + "iterations"] = e.iterations;
    r.optimizer_meta[prefix + "restarts_used"] = e.restarts_used;
    r.optimizer_meta[prefix + "converged"] = e.converged ? 1.0 : 0.0;
}

/// Intermediate points of the chain A_w <= ... <= Delta at the exact basis.
std::vector<double> appx_b_chain(const DensityOperator& rho, const Observable& k) {
    const auto dec = trace_asymmetry_decomposition(rho, k);
    const ComplexMatrix& u = dec.optimal_basis.matrix();
    const ComplexMatrix kr = k.matrix() * rho.matrix();
    double aw = 0, im_sq = 0, abs_sq = 0, re_sum = 0;
    for (Eigen::Index x = 0; x < u.cols(); ++x) {
        const Complex n = u.col(x).dot(kr * u.col(x));
        const double p = std::real(u.col(x).dot(rho.matrix() * u.col(x)));
        re_sum += n.real();
        if (p <= kProbFloor) continue;
        aw += std::abs(n.imag());
        im_sq += n.imag() * n.imag() / p;
        abs_sq += std::norm(n) / p;
    }
    return {aw, std::sqrt(im_sq), std::sqrt(std::max(0.0, abs_sq - re_sum * re_sum)), std::sqrt(variance(rho, k))};
}

ComplexMatrix reference_observable(Eigen::Index d) {
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    k(0, 0) = 1.0;
    if (d > 1) k(1, 1) = -1.0;
    return k;
}

}  // namespace

std::string_view to_string(BoundId id) {
    for (const auto& n : kNames) {
        if (n.id == id) return n.name;
    }
    return "?";
}

std::optional<BoundId> parse_bound_id(std::string_view s) {
    for (const auto& n : kNames) {
        if (n.name == s) return n.id;
    }
    return std::nullopt;
}

std::vector<BoundId> parse_bound_selection(std::string_view s) {
    if (s == "all") return {kAllBounds.begin(), kAllBounds.end()};
    std::vector<BoundId> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = std::min(s.find(',', start), s.size());
        const std::string_view token = s.substr(start, comma - start);
        const auto id = parse_bound_id(token);
        if (!id) throw Error(ErrorCode::UnknownBoundId, "unknown bound id '" + std::string(token) + "'");
        if (std::find(out.begin(), out.end(), *id) == out.end()) out.push_back(*id);
        start = comma + 1;
    }
    return out;
}

bool needs_second_observable(BoundId id) {
    switch (id) {
        case BoundId::L1:
        case BoundId::P6:
        case BoundId::P7:
        case BoundId::P8:
        case BoundId::C6:
            return true;
        default:
            return false;
    }
}

nlohmann::json to_json(const BoundReport& r) {
    nlohmann::json j = {{"bound_id", to_string(r.bound_id)},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"slack", r.slack},
                        {"satisfied", r.satisfied},
                        {"orientation", r.orientation == Orientation::lhs_le_rhs ? "lhs<=rhs" : "lhs>=rhs"},
                        {"tolerance", r.tolerance},
                        {"inputs_digest", r.inputs_digest}};
    if (r.terms.size() > 2) j["terms"] = r.terms;
    if (!r.optimizer_meta.empty()) j["optimizer_meta"] = r.optimizer_meta;
    return j;
}

// ---------------------------------------------------------------------------

BoundContext::BoundContext(DensityOperator rho, Observable k, std::optional<Observable> x, OptimizerConfig cfg,
                           std::string digest)
    : rho_(std::move(rho)), k_(std::move(k)), x_(std::move(x)), cfg_(cfg), digest_(std::move(digest)) {
    require_same_dim(rho_.dim(), k_.dim(), "bound check");
    if (x_) require_same_dim(rho_.dim(), x_->dim(), "bound check");
    fixed_spectrum_ = k_.spectrum().eigenvalues;
}

OptimizerConfig BoundContext::default_config() {
    OptimizerConfig cfg;
    cfg.restarts = 2;
    cfg.max_iters = 200;
    return cfg;
}

const Observable& BoundContext::x() const {
    if (!x_) throw Error(ErrorCode::InvalidArgument, "this bound needs a second observable X");
    return *x_;
}

const TraceAsymmetry& BoundContext::normalized_decomposition() {
    if (!decomposition_) decomposition_ = trace_asymmetry_decomposition(rho_, k_.normalized());
    return *decomposition_;
}

const EstimationReport& BoundContext::sup_noncomm_x() {
    if (!noncomm_x_) noncomm_x_ = maximize_noncomm(rho_, k_, cfg_);
    return *noncomm_x_;
}

const EstimationReport& BoundContext::sup_noncomm_both() {
    if (!noncomm_both_) noncomm_both_ = maximize_noncomm_both(rho_, cfg_);
    return *noncomm_both_;
}

const EstimationReport& BoundContext::sup_asymmetry_fixed() {
    if (!asym_fixed_) {
        std::vector<FramePoint> warm;
        if (fixed_spectrum_.size() == k_.dim() &&
            (fixed_spectrum_ - k_.spectrum().eigenvalues).cwiseAbs().maxCoeff() == 0.0) {
            warm.push_back({{k_.spectrum().eigenvectors}, {}});
        }
        asym_fixed_ = maximize_asymmetry_fixed_spectrum(rho_, fixed_spectrum_, cfg_, warm);
    }
    return *asym_fixed_;
}

const EstimationReport& BoundContext::sup_asymmetry_any() {
    if (!asym_any_) {
        std::vector<FramePoint> warm;
        if (!k_.is_trivial()) warm.push_back(warm_from_operator(k_.matrix()));
        warm.push_back(warm_from_operator(*sup_asymmetry_fixed().op));
        warm.push_back(warm_from_operator(*sup_noncomm_both().op));
        asym_any_ = maximize_asymmetry_any(rho_, cfg_, warm);
    }
    return *asym_any_;
}

const EstimationReport& BoundContext::sup_kd_both() {
    if (!kd_both_) {
        std::vector<FramePoint> warm = {kd_warm_from_operator(rho_.matrix(), *sup_asymmetry_any().op),
                                        kd_warm_from_operator(rho_.matrix(), *sup_asymmetry_fixed().op)};
        kd_both_ = maximize_kd_nonreality_both(rho_, cfg_, warm);
    }
    return *kd_both_;
}

const EstimationReport& BoundContext::sup_kd_fixed_k() {
    if (!kd_fixed_) {
        std::vector<FramePoint> warm = {{{normalized_decomposition().optimal_basis.matrix()}, {}}};
        kd_fixed_ = maximize_kd_nonreality(rho_, OrthonormalBasis::eigenbasis(k_), cfg_, warm);
    }
    return *kd_fixed_;
}

BoundReport check(BoundId id, BoundContext& ctx) {
    const DensityOperator& rho = ctx.rho();
    const Observable& k = ctx.k();
    auto a_norm = [&] { return ctx.normalized_decomposition().value; };
    auto comm_xk = [&] { return kernels::noncomm(rho.matrix(), normalized_matrix(ctx.x()), normalized_matrix(k)); };
    switch (id) {
        case BoundId::P2:
            return le(id, trace_asymmetry(rho, k), std::sqrt(variance(rho, k)), false, ctx);
        case BoundId::P3: {
            const double a = trace_asymmetry(rho, k);
            return le(id, a * a, qfi(rho, k) / 4.0, false, ctx);
        }
        case BoundId::P4: {
            const auto& opt = ctx.sup_kd_fixed_k();
            BoundReport r = le(id, a_norm(), opt.estimate, true, ctx);
            attach_meta(r, "", opt);
            return r;
        }
        case BoundId::C1:
            return le(id, a_norm(), l1_coherence(rho, OrthonormalBasis::eigenbasis(k)), false, ctx);
        case BoundId::C2: {
            const auto& lhs = ctx.sup_asymmetry_fixed();
            const auto& rhs = ctx.sup_kd_both();
            BoundReport r = le(id, lhs.estimate, rhs.estimate, true, ctx);
            attach_meta(r, "lhs_", lhs);
            attach_meta(r, "rhs_", rhs);
            return r;
        }
        case BoundId::C3: {
            const auto& lhs = ctx.sup_asymmetry_any();
            const auto& rhs = ctx.sup_kd_both();
            BoundReport r = le(id, lhs.estimate, rhs.estimate, true, ctx);
            attach_meta(r, "lhs_", lhs);
            attach_meta(r, "rhs_", rhs);
            return r;
        }
        case BoundId::P5:
            return le(id, a_norm(), purity_bound(rho), false, ctx);
        case BoundId::L1:
            return le(id, comm_xk(), a_norm(), false, ctx);
        case BoundId::C4: {
            const auto& opt = ctx.sup_noncomm_x();
            BoundReport r = le(id, opt.estimate, a_norm(), true, ctx);
            attach_meta(r, "", opt);
            r.optimizer_meta["passes_disagree"] = opt.meta.at("passes_disagree");
            return r;
        }
        case BoundId::ORDER19: {
            const auto& right = ctx.sup_noncomm_both();
            const auto& middle = ctx.sup_asymmetry_any();
            const auto& left = ctx.sup_kd_both();
            BoundReport r = make_report(id, Orientation::lhs_ge_rhs, {left.estimate, middle.estimate, right.estimate},
                                        true, ctx.digest());
            attach_meta(r, "kd_", left);
            attach_meta(r, "asymmetry_", middle);
            attach_meta(r, "noncomm_", right);
            return r;
        }
        case BoundId::P6: {
            const double c = comm_xk();
            return ge(id, a_norm() * normalized_trace_asymmetry(rho, ctx.x()), c * c, false, ctx);
        }
        case BoundId::C5: {
            const auto& opt = ctx.sup_noncomm_x();
            BoundReport r = ge(id, std::sqrt(normalized_qfi(rho, k)), 2.0 * opt.estimate, true, ctx);
            attach_meta(r, "", opt);
            return r;
        }
        case BoundId::P7: {
            const double c = 2.0 * comm_xk();
            return ge(id, std::sqrt(normalized_qfi(rho, k)) * std::sqrt(normalized_qfi(rho, ctx.x())), c * c, false,
                      ctx);
        }
        case BoundId::P8: {
            const double c = 2.0 * comm_xk();
            return ge(id, std::sqrt(normalized_qfi(rho, k)) * normalized_trace_asymmetry(rho, ctx.x()), c * c / 2.0,
                      false, ctx);
        }
        case BoundId::C6: {
            const double c = 2.0 * comm_xk();
            const double coh = l1_coherence(rho, OrthonormalBasis::eigenbasis(ctx.x()));
            return ge(id, std::sqrt(normalized_qfi(rho, k)) * coh, c * c / 2.0, false, ctx);
        }
        case BoundId::B_APPX:
            return make_report(id, Orientation::lhs_le_rhs, appx_b_chain(rho, k), false, ctx.digest());
    }
    throw Error(ErrorCode::UnknownBoundId, "unhandled bound id");
}

std::vector<BoundReport> check_all(BoundContext& ctx, std::span<const BoundId> ids) {
    std::vector<BoundReport> out;
    out.reserve(ids.size());
    for (const BoundId id : ids) out.push_back(check(id, ctx));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

BoundReport single(BoundId id, const DensityOperator& rho, const Observable& k, std::optional<Observable> x = {},
                   const OptimizerConfig& cfg = BoundContext::default_config()) {
    BoundContext ctx(rho, k, std::move(x), cfg);
    return check(id, ctx);
}

}  // namespace

BoundReport check_p2(const DensityOperator& rho, const Observable& k) { return single(BoundId::P2, rho, k); }
BoundReport check_p3(const DensityOperator& rho, const Observable& k) { return single(BoundId::P3, rho, k); }
BoundReport check_p4(const DensityOperator& rho, const Observable& k, const OptimizerConfig& cfg) {
    return single(BoundId::P4, rho, k, {}, cfg);
}
BoundReport check_c1(const DensityOperator& rho, const Observable& k) { return single(BoundId::C1, rho, k); }

BoundReport check_c2(const DensityOperator& rho, const RealVector& spectrum, const OptimizerConfig& cfg) {
    require_same_dim(rho.dim(), spectrum.size(), "check_c2");
    BoundContext ctx(rho, Observable(spectrum.cast<Complex>().asDiagonal()), std::nullopt, cfg);
    return check(BoundId::C2, ctx);
}

BoundReport check_c3(const DensityOperator& rho, const OptimizerConfig& cfg) {
    return single(BoundId::C3, rho, Observable(reference_observable(rho.dim())), {}, cfg);
}

BoundReport check_p5(const DensityOperator& rho, const Observable& k) { return single(BoundId::P5, rho, k); }
BoundReport check_l1(const DensityOperator& rho, const Observable& k, const Observable& x) {
    return single(BoundId::L1, rho, k, x);
}
BoundReport check_c4(const DensityOperator& rho, const Observable& k, const OptimizerConfig& cfg) {
    return single(BoundId::C4, rho, k, {}, cfg);
}
BoundReport check_order19(const DensityOperator& rho, const OptimizerConfig& cfg) {
    return single(BoundId::ORDER19, rho, Observable(reference_observable(rho.dim())), {}, cfg);
}
BoundReport check_p6(const DensityOperator& rho, const Observable& k, const Observable& x) {
    return single(BoundId::P6, rho, k, x);
}
BoundReport check_c5(const DensityOperator& rho, const Observable& k, const OptimizerConfig& cfg) {
    return single(BoundId::C5, rho, k, {}, cfg);
}
BoundReport check_p7(const DensityOperator& rho, const Observable& k, const Observable& x) {
    return single(BoundId::P7, rho, k, x);
}
BoundReport check_p8(const DensityOperator& rho, const Observable& k, const Observable& x) {
    return single(BoundId::P8, rho, k, x);
}
BoundReport check_c6(const DensityOperator& rho, const Observable& k, const Observable& x) {
    return single(BoundId::C6, rho, k, x);
}
BoundReport check_appx_b(const DensityOperator& rho, const Observable& k) { return single(BoundId::B_APPX, rho, k); }

BoundInstance random_instance(Eigen::Index dim, std::uint64_t seed, std::uint64_t index) {
    auto engine = make_engine(seed, index);
    RandomSpec spec;
    spec.dim = dim;
    spec.seed = seed;
    if (index % 2 == 1) {
        const int rank = 1 + static_cast<int>(engine() % static_cast<std::uint64_t>(dim));
        spec.kind = GinibreMixed{rank};
    }
    DensityOperator rho = random_state(spec, engine);
    Observable k(random_hermitian(dim, engine));
    Observable x(random_hermitian(dim, engine));
    return {std::move(rho), std::move(k), std::move(x),
            "seed=" + std::to_string(seed) + ";index=" + std::to_string(index) + ";dim=" + std::to_string(dim)};
}

}  // namespace asymforge
