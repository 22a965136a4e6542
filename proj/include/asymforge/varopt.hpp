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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "asymforge/measures.hpp"
#include "asymforge/states.hpp"

namespace asymforge {

/// Real parameters lambda (length d^2) mapped onto U(d) by
/// lambda -> exp(i H(lambda)). H takes its d diagonal entries from
/// lambda[0..d) and the real/imaginary parts of each upper off-diagonal pair
/// (a, b), in row-major pair order, from the remaining d(d-1) entries.
class BasisParameterization {
  public:
    explicit BasisParameterization(Eigen::Index dim) : dim_(dim) {}

    Eigen::Index dim() const { return dim_; }
    std::size_t param_count() const { return static_cast<std::size_t>(dim_ * dim_); }

    ComplexMatrix hermitian(std::span<const double> params) const;
    ComplexMatrix unitary(std::span<const double> params) const;
    OrthonormalBasis basis(std::span<const double> params) const { return OrthonormalBasis(unitary(params)); }

  private:
    Eigen::Index dim_;
};

/// Two-angle qubit basis {cos(a/2)|0> + e^{ib} sin(a/2)|1>,
/// sin(a/2)|0> - e^{ib} cos(a/2)|1>}.
ComplexMatrix bloch_basis(double alpha, double beta);

enum class OptimizerMethod { simplex, coordinate };

std::optional<OptimizerMethod> parse_optimizer_method(std::string_view s);

struct OptimizerConfig {
    int restarts = 8;
    /// Per restart: simplex rounds or coordinate sweeps.
    int max_iters = 400;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    OptimizerMethod method = OptimizerMethod::coordinate;
};

struct EstimationReport {
    double estimate = 0;
    std::optional<double> exact;
    int iterations = 0;
    int restarts_used = 0;
    long long shots = 0;
    double theta_step = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    std::vector<std::pair<int, double>> trace;
    /// Optimal frames (bases), in the order documented by each optimizer.
    std::vector<ComplexMatrix> frames;
    /// Optimal operator, for optimizers over Hermitian operators.
    std::optional<ComplexMatrix> op;
    std::map<std::string, double> meta;
};

// ---------------------------------------------------------------------------
// Generic multi-start search over products of unitary frames and real
// "extra" coordinates. Every objective here is invariant under column phases
// of each frame, so only the d(d-1) off-diagonal generator directions are
// searched.

struct FrameSearchSpace {
    Eigen::Index dim = 2;
    int frames = 1;
    int extras = 0;
};

struct FramePoint {
    std::vector<ComplexMatrix> frames;
    std::vector<double> extras;
};

using FrameObjective = std::function<double(const FramePoint&)>;

struct FrameOptimum {
    FramePoint point;
    double value = 0;
    int iterations = 0;
    int restart = 0;
    int restarts_used = 0;
    bool converged = false;
    std::vector<std::pair<int, double>> trace;
};

/// Maximizes `objective`. Runs one local search from each warm start, then
/// cfg.restarts more from Haar-random frames and uniform extras in
/// [-pi, pi]; restart r draws from stream r of cfg.seed. The best value
/// wins, ties resolved by the lowest restart index.
FrameOptimum optimize_frames(const FrameSearchSpace& space, const FrameObjective& objective,
                             const OptimizerConfig& cfg, std::span<const FramePoint> warm_starts = {});

// ---------------------------------------------------------------------------

/// Eigenbasis of i[K, rho]; attains A_w = A_Tr exactly.
OrthonormalBasis optimal_basis_exact(const DensityOperator& rho, const Observable& k);

/// Variational sup over bases of sum_x |Im <x|K rho|x>|. frames = {basis}.
EstimationReport maximize_aw(const DensityOperator& rho, const Observable& k, const OptimizerConfig& cfg);

/// sup over x-bases of sum |Im Pr_KD| with the k-basis held fixed.
/// frames = {x_basis}.
EstimationReport maximize_kd_nonreality(const DensityOperator& rho, const OrthonormalBasis& k_basis,
                                        const OptimizerConfig& cfg, std::span<const FramePoint> warm_starts = {});

/// Joint sup over both KD bases. frames = {k_basis, x_basis}.
EstimationReport maximize_kd_nonreality_both(const DensityOperator& rho, const OptimizerConfig& cfg,
                                             std::span<const FramePoint> warm_starts = {});

/// sup over X of |Tr([X~, K~] rho)| / 2. A first pass fixes the spectrum of X
/// to {+1, -1, 0, ...} and optimizes its eigenframe; a second pass also frees
/// the remaining d-1 normalized eigenvalues. meta records both passes and
/// `passes_disagree` (1 when they differ by more than 1e-6). op = X*.
EstimationReport maximize_noncomm(const DensityOperator& rho, const Observable& k, const OptimizerConfig& cfg);

/// sup of A~_Tr over K = U diag(spectrum) U^dagger (spectrum fixed,
/// eigenframe optimized). frames = {U}; op = K*.
EstimationReport maximize_asymmetry_fixed_spectrum(const DensityOperator& rho, const RealVector& spectrum,
                                                   const OptimizerConfig& cfg,
                                                   std::span<const FramePoint> warm_starts = {});

/// sup of A~_Tr over all Hermitian K, by the {+1, -1, 0, ...} frame pass
/// followed by a free-spectrum pass. Warm starts carry a frame and d-1
/// extras t with spectrum (1, sin t_1, ..., sin t_{d-1}). op = K*.
EstimationReport maximize_asymmetry_any(const DensityOperator& rho, const OptimizerConfig& cfg,
                                        std::span<const FramePoint> warm_starts = {});

/// sup over K and X of |Tr([X~, K~] rho)| / 2, same two-pass scheme.
/// frames = {K frame, X frame}; op = K*; meta["k_spectrum_i"] for K*.
EstimationReport maximize_noncomm_both(const DensityOperator& rho, const OptimizerConfig& cfg);

/// Free-spectrum warm start reproducing the operator V diag(s) V^dagger up to
/// normalization and overall sign.
FramePoint spectrum_warm_start(const ComplexMatrix& frame, const RealVector& spectrum);

/// Shot-based estimate of A_Tr. Each objective query replaces Pr(x|rho) and
/// Pr(x|rho_{+-h}) by frequencies from `shots` multinomial samples and
/// assembles sum_x |Im K_w| Pr(x) from the score-function estimator.
/// shots == 0 runs maximize_aw instead.
EstimationReport estimate_atr_sampled(const DensityOperator& rho, const Observable& k, long long shots, double h,
                                      const OptimizerConfig& cfg);

/// Noiseless score-function objective sum_x |Pr(x|rho_h) - Pr(x|rho_-h)| / (4h).
double score_objective(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis, double h);

}  // namespace asymforge
