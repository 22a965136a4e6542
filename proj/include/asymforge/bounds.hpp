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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "asymforge/measures.hpp"
#include "asymforge/states.hpp"
#include "asymforge/varopt.hpp"

namespace asymforge {

enum class BoundId { P2, P3, P4, C1, C2, C3, P5, L1, C4, ORDER19, P6, C5, P7, P8, C6, B_APPX };

inline constexpr std::array<BoundId, 16> kAllBounds = {
    BoundId::P2, BoundId::P3, BoundId::P4,      BoundId::C1, BoundId::C2, BoundId::C3, BoundId::P5, BoundId::L1,
    BoundId::C4, BoundId::ORDER19, BoundId::P6, BoundId::C5, BoundId::P7, BoundId::P8, BoundId::C6, BoundId::B_APPX};

std::string_view to_string(BoundId id);
std::optional<BoundId> parse_bound_id(std::string_view s);
/// "all" or a comma-separated list of ids; throws UnknownBoundId.
std::vector<BoundId> parse_bound_selection(std::string_view s);

/// Whether the bound requires an auxiliary observable X.
bool needs_second_observable(BoundId id);

inline constexpr double kClosedFormSlackTol = 1e-8;
inline constexpr double kOptimizerSlackTol = 1e-4;

enum class Orientation { lhs_le_rhs, lhs_ge_rhs };

struct BoundReport {
    BoundId bound_id = BoundId::P2;
    double lhs = 0;
    double rhs = 0;
    /// Larger side minus smaller side for the claimed orientation; for
    /// multi-term chains, the smallest consecutive gap.
    double slack = 0;
    bool satisfied = false;
    Orientation orientation = Orientation::lhs_le_rhs;
    double tolerance = kClosedFormSlackTol;
    bool optimizer_assisted = false;
    std::string inputs_digest;
    /// Every term of a chain, from the largest-claimed end for lhs_ge_rhs
    /// and the smallest for lhs_le_rhs.
    std::vector<double> terms;
    std::map<std::string, double> optimizer_meta;
};

nlohmann::json to_json(const BoundReport& r);

/// Inputs of one verification instance plus memoized optimizer results that
/// several bounds share. The shared optima are chained by warm starts so
/// that, e.g., the joint KD sup is never below the asymmetry sup it bounds.
class BoundContext {
  public:
    BoundContext(DensityOperator rho, Observable k, std::optional<Observable> x = std::nullopt,
                 OptimizerConfig cfg = default_config(), std::string digest = "");

    /// Fewer random restarts than the optimizer default; warm starts carry
    /// the monotone structure.
    static OptimizerConfig default_config();

    const DensityOperator& rho() const { return rho_; }
    const Observable& k() const { return k_; }
    const Observable& x() const;
    bool has_x() const { return x_.has_value(); }
    const OptimizerConfig& config() const { return cfg_; }
    const std::string& digest() const { return digest_; }

    /// Spectrum defining the fixed-spectrum class for C2; defaults to K's.
    void set_fixed_spectrum(RealVector spectrum) { fixed_spectrum_ = std::move(spectrum); }
    const RealVector& fixed_spectrum() const { return fixed_spectrum_; }

    const TraceAsymmetry& normalized_decomposition();
    const EstimationReport& sup_noncomm_x();
    const EstimationReport& sup_noncomm_both();
    const EstimationReport& sup_asymmetry_fixed();
    const EstimationReport& sup_asymmetry_any();
    const EstimationReport& sup_kd_both();
    const EstimationReport& sup_kd_fixed_k();

  private:
    DensityOperator rho_;
    Observable k_;
    std::optional<Observable> x_;
    OptimizerConfig cfg_;
    std::string digest_;
    RealVector fixed_spectrum_;
    std::optional<TraceAsymmetry> decomposition_;
    std::optional<EstimationReport> noncomm_x_, noncomm_both_, asym_fixed_, asym_any_, kd_both_, kd_fixed_;
};

BoundReport check(BoundId id, BoundContext& ctx);
std::vector<BoundReport> check_all(BoundContext& ctx, std::span<const BoundId> ids = kAllBounds);

// Single-bound entry points.
BoundReport check_p2(const DensityOperator& rho, const Observable& k);
BoundReport check_p3(const DensityOperator& rho, const Observable& k);
BoundReport check_p4(const DensityOperator& rho, const Observable& k,
                     const OptimizerConfig& cfg = BoundContext::default_config());
BoundReport check_c1(const DensityOperator& rho, const Observable& k);
BoundReport check_c2(const DensityOperator& rho, const RealVector& spectrum,
                     const OptimizerConfig& cfg = BoundContext::default_config());
BoundReport check_c3(const DensityOperator& rho, const OptimizerConfig& cfg = BoundContext::default_config());
BoundReport check_p5(const DensityOperator& rho, const Observable& k);
BoundReport check_l1(const DensityOperator& rho, const Observable& k, const Observable& x);
BoundReport check_c4(const DensityOperator& rho, const Observable& k,
                     const OptimizerConfig& cfg = BoundContext::default_config());
BoundReport check_order19(const DensityOperator& rho, const OptimizerConfig& cfg = BoundContext::default_config());
BoundReport check_p6(const DensityOperator& rho, const Observable& k, const Observable& x);
BoundReport check_c5(const DensityOperator& rho, const Observable& k,
                     const OptimizerConfig& cfg = BoundContext::default_config());
BoundReport check_p7(const DensityOperator& rho, const Observable& k, const Observable& x);
BoundReport check_p8(const DensityOperator& rho, const Observable& k, const Observable& x);
BoundReport check_c6(const DensityOperator& rho, const Observable& k, const Observable& x);
BoundReport check_appx_b(const DensityOperator& rho, const Observable& k);

/// Seeded verification instance: stream `index` of `seed` draws rho
/// (Haar-pure for even indices, Ginibre of random rank for odd ones), then K
/// and X from the Gaussian unitary ensemble.
struct BoundInstance {
    DensityOperator rho;
    Observable k;
    Observable x;
    std::string digest;
};

BoundInstance random_instance(Eigen::Index dim, std::uint64_t seed, std::uint64_t index);

}  // namespace asymforge
