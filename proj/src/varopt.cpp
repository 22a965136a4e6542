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

#include "asymforge/varopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "asymforge/rng.hpp"

namespace asymforge {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Index offdiag_param_count(Eigen::Index d) { return d * (d - 1); }

/// Hermitian matrix with zero diagonal from the d(d-1) pair coordinates.
ComplexMatrix offdiag_hermitian(Eigen::Index d, const double* v) {
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    Eigen::Index idx = 0;
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a + 1; b < d; ++b) {
            const double re = v[idx++];
            const double im = v[idx++];
            h(a, b) = Complex(re, -im);
            h(b, a) = Complex(re, im);
        }
    }
    return h;
}

/// U <- U exp(i t G) for the elementary generator of pair `pair`; component 0
/// is E_ab + E_ba, component 1 is -i E_ab + i E_ba.
void rotate_columns(ComplexMatrix& u, Eigen::Index d, Eigen::Index pair, int component, double t) {
    Eigen::Index a = 0, b = 1, idx = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j, ++idx) {
            if (idx == pair) {
                a = i;
                b = j;
            }
        }
    }
    const double c = std::cos(t), s = std::sin(t);
    Complex raa = c, rbb = c, rab, rba;
    if (component == 0) {
        rab = Complex(0, s);
        rba = Complex(0, s);
    } else {
        rab = s;
        rba = -s;
    }
    const ComplexVector ca = u.col(a);
    const ComplexVector cb = u.col(b);
    u.col(a) = ca * raa + cb * rba;
    u.col(b) = ca * rab + cb * rbb;
}

double scale_of(double value) { return std::max(1.0, std::abs(value)); }

/// Local chart around a center: v -> (center_f exp(i H(v_f)), center_e + v_e).
class Chart {
  public:
    Chart(const FrameSearchSpace& space, FramePoint center) : space_(space), center_(std::move(center)) {}

    Eigen::Index size() const { return space_.frames * offdiag_param_count(space_.dim) + space_.extras; }

    FramePoint at(const Eigen::VectorXd& v) const {
        FramePoint p = center_;
        const Eigen::Index per = offdiag_param_count(space_.dim);
        for (int f = 0; f < space_.frames; ++f) {
            const Eigen::VectorXd seg = v.segment(f * per, per);
            if (seg.cwiseAbs().maxCoeff() == 0.0) continue;
            p.frames[f] = center_.frames[f] * exp_i_hermitian(offdiag_hermitian(space_.dim, seg.data()));
        }
        for (int e = 0; e < space_.extras; ++e) p.extras[e] += v(space_.frames * per + e);
        return p;
    }

  private:
    const FrameSearchSpace& space_;
    FramePoint center_;
};

struct SimplexOutcome {
    Eigen::VectorXd x;
    double value = 0;
    double diameter = 0;
    int evals = 0;
    bool flat = false;  // the initial simplex showed no variation
};

/// Adaptive Nelder-Mead (maximizing), started from the origin.
template <typename F>
SimplexOutcome nelder_mead_max(F&& f, Eigen::Index n, double step, int max_evals, double ftol) {
    const double dn = static_cast<double>(n);
    const double alpha = 1.0, chi = 1.0 + 2.0 / dn, rho = 0.75 - 1.0 / (2.0 * dn), sigma = 1.0 - 1.0 / dn;
    std::vector<Eigen::VectorXd> x(n + 1, Eigen::VectorXd::Zero(n));
    std::vector<double> g(n + 1);  // minimized: g = -f
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& v) {
        ++evals;
        return -f(v);
    };
    g[0] = eval(x[0]);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i + 1](i) = step;
        g[i + 1] = eval(x[i + 1]);
    }
    const bool flat = *std::max_element(g.begin(), g.end()) - *std::min_element(g.begin(), g.end()) <= ftol;
    std::vector<Eigen::Index> order(n + 1);
    auto sort_vertices = [&] {
        for (Eigen::Index i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return g[a] < g[b]; });
        std::vector<Eigen::VectorXd> xs(n + 1);
        std::vector<double> gs(n + 1);
        for (Eigen::Index i = 0; i <= n; ++i) {
            xs[i] = std::move(x[order[i]]);
            gs[i] = g[order[i]];
        }
        x = std::move(xs);
        g = std::move(gs);
    };
    while (evals < max_evals) {
        sort_vertices();
        if (g[n] - g[0] <= ftol) break;
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) c += x[i];
        c /= dn;
        const Eigen::VectorXd xr = c + alpha * (c - x[n]);
        const double gr = eval(xr);
        if (gr < g[0]) {
            const Eigen::VectorXd xe = c + chi * (xr - c);
            const double ge = eval(xe);
            if (ge < gr) {
                x[n] = xe;
                g[n] = ge;
            } else {
                x[n] = xr;
                g[n] = gr;
            }
            continue;
        }
        if (gr < g[n - 1]) {
            x[n] = xr;
            g[n] = gr;
            continue;
        }
        bool shrink = false;
        if (gr < g[n]) {
            const Eigen::VectorXd xc = c + rho * (xr - c);
            const double gc = eval(xc);
            if (gc <= gr) {
                x[n] = xc;
                g[n] = gc;
            } else {
                shrink = true;
            }
        } else {
            const Eigen::VectorXd xc = c - rho * (c - x[n]);
            const double gc = eval(xc);
            if (gc < g[n]) {
                x[n] = xc;
                g[n] = gc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (Eigen::Index i = 1; i <= n; ++i) {
                x[i] = x[0] + sigma * (x[i] - x[0]);
                g[i] = eval(x[i]);
            }
        }
    }
    sort_vertices();
    double diameter = 0;
    for (Eigen::Index i = 1; i <= n; ++i) diameter = std::max(diameter, (x[i] - x[0]).cwiseAbs().maxCoeff());
    return {x[0], -g[0], diameter, evals, flat};
}

struct LocalResult {
    FramePoint point;
    double value = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::pair<int, double>> trace;
};

LocalResult simplex_search(const FrameSearchSpace& space, const FrameObjective& objective,
                           const OptimizerConfig& cfg, FramePoint start) {
    LocalResult out;
    out.point = std::move(start);
    out.value = objective(out.point);
    out.trace.emplace_back(0, out.value);
    double step = 0.5;
    const int n = static_cast<int>(Chart(space, out.point).size());
    const int budget = std::max(400, 80 * n);
    for (int round = 1; round <= cfg.max_iters; ++round) {
        Chart chart(space, out.point);
        const auto res = nelder_mead_max([&](const Eigen::VectorXd& v) { return objective(chart.at(v)); }, n,
                                         step, budget, 0.1 * cfg.tol * scale_of(out.value));
        const double gain = res.value - out.value;
        if (round == 1 && res.flat) {
            out.converged = true;  // flat landscape
            break;
        }
        if (gain > 0) {
            out.point = chart.at(res.x);
            out.value = res.value;
        }
        out.iterations = round;
        out.trace.emplace_back(round, out.value);
        if (gain <= cfg.tol) {
            if (step <= 1e-6) {
                out.converged = true;
                break;
            }
            step = std::max(1e-7, step * 0.1);
        } else {
            step = std::clamp(2.0 * res.diameter, 1e-6, 0.5);
        }
    }
    return out;
}

LocalResult coordinate_search(const FrameSearchSpace& space, const FrameObjective& objective,
                              const OptimizerConfig& cfg, FramePoint start) {
    LocalResult out;
    out.point = std::move(start);
    out.value = objective(out.point);
    out.trace.emplace_back(0, out.value);
    const Eigen::Index pairs = space.dim * (space.dim - 1) / 2;
    const Eigen::Index n_frame = 2 * pairs;
    const Eigen::Index n = space.frames * n_frame + space.extras;
    std::vector<double> steps(static_cast<std::size_t>(n), 0.5);
    auto moved = [&](Eigen::Index j, double t) {
        FramePoint p = out.point;
        if (j < space.frames * n_frame) {
            const Eigen::Index f = j / n_frame, r = j % n_frame;
            rotate_columns(p.frames[f], space.dim, r / 2, static_cast<int>(r % 2), t);
        } else {
            p.extras[j - space.frames * n_frame] += t;
        }
        return p;
    };
    const double start_value = out.value;
    for (int sweep = 1; sweep <= cfg.max_iters; ++sweep) {
        const double before = out.value;
        bool flat = sweep == 1;
        for (Eigen::Index j = 0; j < n; ++j) {
            double& s = steps[j];
            bool accepted = false;
            for (const double sign : {1.0, -1.0}) {
                FramePoint cand = moved(j, sign * s);
                const double v = objective(cand);
                if (std::abs(v - start_value) > cfg.tol) flat = false;
                if (v > out.value) {
                    out.point = std::move(cand);
                    out.value = v;
                    s = std::min(2.0 * s, 0.5 * kPi);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) s *= 0.5;
        }
        if (flat) {
            out.converged = true;  // flat landscape
            break;
        }
        out.iterations = sweep;
        out.trace.emplace_back(sweep, out.value);
        const double max_step = *std::max_element(steps.begin(), steps.end());
        if (out.value - before <= cfg.tol && max_step < 1e-7) {
            out.converged = true;
            break;
        }
    }
    return out;
}

FramePoint random_point(const FrameSearchSpace& space, std::mt19937_64& engine) {
    FramePoint p;
    for (int f = 0; f < space.frames; ++f) p.frames.push_back(random_unitary(space.dim, engine));
    for (int e = 0; e < space.extras; ++e) p.extras.push_back(kPi * (2.0 * uniform01(engine) - 1.0));
    return p;
}

RealVector pm_one_spectrum(Eigen::Index d) {
    RealVector s = RealVector::Zero(d);
    s(0) = 1.0;
    if (d > 1) s(1) = -1.0;
    return s;
}

/// (1, sin t_1, ..., sin t_{d-1}).
RealVector free_spectrum(std::span<const double> t) {
    RealVector s(static_cast<Eigen::Index>(t.size()) + 1);
    s(0) = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) s(static_cast<Eigen::Index>(i) + 1) = std::sin(t[i]);
    return s;
}

ComplexMatrix operator_from(const ComplexMatrix& frame, const RealVector& spectrum) {
    return frame * spectrum.cast<Complex>().asDiagonal() * frame.adjoint();
}

EstimationReport report_from(const FrameOptimum& opt, const OptimizerConfig& cfg) {
    EstimationReport r;
    r.estimate = opt.value;
    r.iterations = opt.iterations;
    r.restarts_used = opt.restarts_used;
    r.seed = cfg.seed;
    r.converged = opt.converged;
    r.trace = opt.trace;
    r.frames = opt.point.frames;
    r.meta["best_restart"] = opt.restart;
    return r;
}

/// Two passes over {+1,-1,0,...} spectra and then free spectra, for one or
/// more operator frames. `eval` receives the operators' spectra.
template <typename Eval>
std::pair<FrameOptimum, FrameOptimum> two_pass(Eigen::Index d, int frames, const Eval& eval,
                                               const OptimizerConfig& cfg, std::span<const FramePoint> warm_fixed,
                                               std::span<const FramePoint> warm_free) {
    const RealVector fixed = pm_one_spectrum(d);
    FrameSearchSpace fixed_space{d, frames, 0};
    const FrameObjective fixed_obj = [&](const FramePoint& p) {
        std::vector<RealVector> spectra(frames, fixed);
        return eval(p.frames, spectra);
    };
    FrameOptimum first = optimize_frames(fixed_space, fixed_obj, cfg, warm_fixed);

    const int per = static_cast<int>(d - 1);
    FrameSearchSpace free_space{d, frames, frames * per};
    const FrameObjective free_obj = [&](const FramePoint& p) {
        std::vector<RealVector> spectra;
        for (int f = 0; f < frames; ++f)
            spectra.push_back(free_spectrum(std::span<const double>(p.extras).subspan(f * per, per)));
        return eval(p.frames, spectra);
    };
    std::vector<FramePoint> warm(warm_free.begin(), warm_free.end());
    FramePoint from_first = first.point;
    for (int f = 0; f < frames; ++f) {
        for (int i = 0; i < per; ++i) from_first.extras.push_back(i == 0 ? -0.5 * kPi : 0.0);
    }
    warm.insert(warm.begin(), from_first);
    OptimizerConfig second_cfg = cfg;
    second_cfg.seed = mix64(cfg.seed ^ 0x5EC0'DDA5'5ULL);
    FrameOptimum second = optimize_frames(free_space, free_obj, second_cfg, warm);
    return {std::move(first), std::move(second)};
}

}  // namespace

ComplexMatrix BasisParameterization::hermitian(std::span<const double> params) const {
    if (params.size() != param_count()) {
        throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(param_count()) + " parameters");
    }
    ComplexMatrix h = offdiag_hermitian(dim_, params.data() + dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) h(i, i) = params[static_cast<std::size_t>(i)];
    return h;
}

ComplexMatrix BasisParameterization::unitary(std::span<const double> params) const {
    for (const double p : params) {
        if (!std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "non-finite basis parameter");
    }
    return exp_i_hermitian(hermitian(params));
}

ComplexMatrix bloch_basis(double alpha, double beta) {
    const double c = std::cos(alpha / 2), s = std::sin(alpha / 2);
    const Complex phase = std::polar(1.0, beta);
    ComplexMatrix u(2, 2);
    u << c, s, phase * s, -phase * c;
    return u;
}

std::optional<OptimizerMethod> parse_optimizer_method(std::string_view s) {
    if (s == "simplex") return OptimizerMethod::simplex;
    if (s == "coordinate") return OptimizerMethod::coordinate;
    return std::nullopt;
}

FrameOptimum optimize_frames(const FrameSearchSpace& space, const FrameObjective& objective,
                             const OptimizerConfig& cfg, std::span<const FramePoint> warm_starts) {
    if (cfg.restarts < 0 || cfg.max_iters < 1 || !(cfg.tol > 0)) {
        throw Error(ErrorCode::InvalidArgument, "optimizer configuration must be positive");
    }
    const int total = static_cast<int>(warm_starts.size()) + cfg.restarts;
    if (total < 1) throw Error(ErrorCode::InvalidArgument, "optimizer needs at least one start");
    FrameOptimum best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < total; ++r) {
        FramePoint start;
        if (r < static_cast<int>(warm_starts.size())) {
            start = warm_starts[r];
        } else {
            auto engine = make_engine(cfg.seed, static_cast<std::uint64_t>(r));
            start = random_point(space, engine);
        }
        LocalResult local = cfg.method == OptimizerMethod::simplex
                                ? simplex_search(space, objective, cfg, std::move(start))
                                : coordinate_search(space, objective, cfg, std::move(start));
        best.iterations += local.iterations;
        if (local.value > best.value) {
            best.point = std::move(local.point);
            best.value = local.value;
            best.restart = r;
            best.converged = local.converged;
            best.trace = std::move(local.trace);
        }
    }
    best.restarts_used = total;
    return best;
}

OrthonormalBasis optimal_basis_exact(const DensityOperator& rho, const Observable& k) {
    return trace_asymmetry_decomposition(rho, k).optimal_basis;
}

EstimationReport maximize_aw(const DensityOperator& rho, const Observable& k, const OptimizerConfig& cfg) {
    require_same_dim(rho.dim(), k.dim(), "maximize_aw");
    const ComplexMatrix kr = k.matrix() * rho.matrix();
    const FrameObjective obj = [&](const FramePoint& p) { return kernels::abs_im_diagonal_sum(kr, p.frames[0]); };
    const auto opt = optimize_frames({rho.dim(), 1, 0}, obj, cfg);
    EstimationReport r = report_from(opt, cfg);
    r.exact = trace_asymmetry(rho, k);
    return r;
}

EstimationReport maximize_kd_nonreality(const DensityOperator& rho, const OrthonormalBasis& k_basis,
                                        const OptimizerConfig& cfg, std::span<const FramePoint> warm_starts) {
    require_same_dim(rho.dim(), k_basis.dim(), "maximize_kd_nonreality");
    const ComplexMatrix& ku = k_basis.matrix();
    const FrameObjective obj = [&](const FramePoint& p) {
        return kernels::kd_abs_im_sum(rho.matrix(), ku, p.frames[0]);
    };
    const auto opt = optimize_frames({rho.dim(), 1, 0}, obj, cfg, warm_starts);
    EstimationReport r = report_from(opt, cfg);
    if (rho.dim() == 2) r.exact = l1_coherence(rho, k_basis);
    return r;
}

EstimationReport maximize_kd_nonreality_both(const DensityOperator& rho, const OptimizerConfig& cfg,
                                             std::span<const FramePoint> warm_starts) {
    const FrameObjective obj = [&](const FramePoint& p) {
        return kernels::kd_abs_im_sum(rho.matrix(), p.frames[0], p.frames[1]);
    };
    const auto opt = optimize_frames({rho.dim(), 2, 0}, obj, cfg, warm_starts);
    EstimationReport r = report_from(opt, cfg);
    if (rho.dim() == 2) r.exact = std::sqrt(std::max(0.0, 2.0 * purity(rho) - 1.0));
    return r;
}

EstimationReport maximize_noncomm(const DensityOperator& rho, const Observable& k, const OptimizerConfig& cfg) {
    require_same_dim(rho.dim(), k.dim(), "maximize_noncomm");
    if (k.is_trivial()) throw Error(ErrorCode::TrivialObservable, "||K||_max is zero");
    const ComplexMatrix kn = k.matrix() / k.spectral_radius();
    auto eval = [&](const std::vector<ComplexMatrix>& frames, const std::vector<RealVector>& spectra) {
        return kernels::noncomm(rho.matrix(), operator_from(frames[0], spectra[0]), kn);
    };
    auto [first, second] = two_pass(rho.dim(), 1, eval, cfg, {}, {});
    const bool second_wins = second.value > first.value;
    const FrameOptimum& win = second_wins ? second : first;
    EstimationReport r = report_from(win, cfg);
    r.iterations = first.iterations + second.iterations;
    r.restarts_used = first.restarts_used + second.restarts_used;
    const RealVector spectrum = second_wins ? free_spectrum(win.point.extras) : pm_one_spectrum(rho.dim());
    r.op = operator_from(win.point.frames[0], spectrum);
    r.exact = normalized_trace_asymmetry(rho, k);
    r.meta["fixed_spectrum_value"] = first.value;
    r.meta["free_spectrum_value"] = second.value;
    r.meta["passes_disagree"] = std::abs(second.value - first.value) > 1e-6 ? 1.0 : 0.0;
    return r;
}

EstimationReport maximize_asymmetry_fixed_spectrum(const DensityOperator& rho, const RealVector& spectrum,
                                                   const OptimizerConfig& cfg,
                                                   std::span<const FramePoint> warm_starts) {
    require_same_dim(rho.dim(), spectrum.size(), "maximize_asymmetry_fixed_spectrum");
    const double radius = spectrum.cwiseAbs().maxCoeff();
    if (!(radius > 1e-12)) throw Error(ErrorCode::TrivialObservable, "spectrum is zero");
    const RealVector s = spectrum / radius;
    const FrameObjective obj = [&](const FramePoint& p) {
        return kernels::trace_asymmetry(rho.matrix(), operator_from(p.frames[0], s));
    };
    const auto opt = optimize_frames({rho.dim(), 1, 0}, obj, cfg, warm_starts);
    EstimationReport r = report_from(opt, cfg);
    r.op = operator_from(opt.point.frames[0], s);
    return r;
}

FramePoint spectrum_warm_start(const ComplexMatrix& frame, const RealVector& spectrum) {
    const Eigen::Index d = spectrum.size();
    Eigen::Index top = 0;
    spectrum.cwiseAbs().maxCoeff(&top);
    const double scale = spectrum(top);
    RealVector s = spectrum / (scale != 0.0 ? scale : 1.0);
    ComplexMatrix u = frame;
    if (top != 0) {
        std::swap(s(0), s(top));
        u.col(0).swap(u.col(top));
    }
    FramePoint p;
    p.frames.push_back(u);
    for (Eigen::Index i = 1; i < d; ++i) p.extras.push_back(std::asin(std::clamp(s(i), -1.0, 1.0)));
    return p;
}

EstimationReport maximize_asymmetry_any(const DensityOperator& rho, const OptimizerConfig& cfg,
                                        std::span<const FramePoint> warm_starts) {
    auto eval = [&](const std::vector<ComplexMatrix>& frames, const std::vector<RealVector>& spectra) {
        return kernels::trace_asymmetry(rho.matrix(), operator_from(frames[0], spectra[0]));
    };
    std::vector<FramePoint> warm_fixed;
    for (const auto& w : warm_starts) warm_fixed.push_back({w.frames, {}});
    auto [first, second] = two_pass(rho.dim(), 1, eval, cfg, warm_fixed, warm_starts);
    const bool second_wins = second.value > first.value;
    const FrameOptimum& win = second_wins ? second : first;
    EstimationReport r = report_from(win, cfg);
    r.iterations = first.iterations + second.iterations;
    r.restarts_used = first.restarts_used + second.restarts_used;
    const RealVector spectrum = second_wins ? free_spectrum(win.point.extras) : pm_one_spectrum(rho.dim());
    r.op = operator_from(win.point.frames[0], spectrum);
    r.meta["fixed_spectrum_value"] = first.value;
    r.meta["free_spectrum_value"] = second.value;
    if (rho.dim() == 2) r.exact = std::sqrt(std::max(0.0, 2.0 * purity(rho) - 1.0));
    return r;
}

EstimationReport maximize_noncomm_both(const DensityOperator& rho, const OptimizerConfig& cfg) {
    auto eval = [&](const std::vector<ComplexMatrix>& frames, const std::vector<RealVector>& spectra) {
        return kernels::noncomm(rho.matrix(), operator_from(frames[1], spectra[1]),
                                operator_from(frames[0], spectra[0]));
    };
    auto [first, second] = two_pass(rho.dim(), 2, eval, cfg, {}, {});
    const bool second_wins = second.value > first.value;
    const FrameOptimum& win = second_wins ? second : first;
    EstimationReport r = report_from(win, cfg);
    r.iterations = first.iterations + second.iterations;
    r.restarts_used = first.restarts_used + second.restarts_used;
    const int per = static_cast<int>(rho.dim() - 1);
    const RealVector k_spectrum =
        second_wins ? free_spectrum(std::span<const double>(win.point.extras).subspan(0, per))
                    : pm_one_spectrum(rho.dim());
    r.op = operator_from(win.point.frames[0], k_spectrum);
    for (Eigen::Index i = 0; i < k_spectrum.size(); ++i) r.meta["k_spectrum_" + std::to_string(i)] = k_spectrum(i);
    r.meta["fixed_spectrum_value"] = first.value;
    r.meta["free_spectrum_value"] = second.value;
    if (rho.dim() == 2) r.exact = std::sqrt(std::max(0.0, 2.0 * purity(rho) - 1.0));
    return r;
}

// ---------------------------------------------------------------------------
// Shot-based estimation.

namespace {

/// Multinomial counts by sequential conditional binomials.
Eigen::VectorXd sample_frequencies(const RealVector& p, long long shots, std::mt19937_64& engine) {
    const Eigen::Index d = p.size();
    Eigen::VectorXd freq = Eigen::VectorXd::Zero(d);
    long long remaining = shots;
    double mass = 1.0;
    for (Eigen::Index i = 0; i < d && remaining > 0; ++i) {
        const double pi = std::max(0.0, p(i));
        long long n = remaining;
        if (i + 1 < d) {
            const double q = mass > 0 ? std::clamp(pi / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<long long> dist(remaining, q);
            n = dist(engine);
        }
        freq(i) = static_cast<double>(n) / static_cast<double>(shots);
        remaining -= n;
        mass -= pi;
    }
    return freq;
}

struct SampledObjective {
    const ComplexMatrix& rho;
    const ComplexMatrix& rho_plus;
    const ComplexMatrix& rho_minus;
    long long shots;
    double h;
    std::mt19937_64* engine;
    long long* excluded;
    long long* queries;

    double operator()(const ComplexMatrix& u) const {
        ++*queries;
        const auto f0 = sample_frequencies(kernels::outcome_probabilities(rho, u), shots, *engine);
        const auto fp = sample_frequencies(kernels::outcome_probabilities(rho_plus, u), shots, *engine);
        const auto fm = sample_frequencies(kernels::outcome_probabilities(rho_minus, u), shots, *engine);
        const double threshold = 10.0 / static_cast<double>(shots);
        double sum = 0;
        for (Eigen::Index x = 0; x < u.cols(); ++x) {
            if (f0(x) < threshold) {
                ++*excluded;
                continue;
            }
            const double im_weak = 0.5 * (fp(x) - fm(x)) / (2.0 * h * f0(x));
            sum += std::abs(im_weak) * f0(x);
        }
        return sum;
    }
};

/// Simultaneous-perturbation stochastic approximation in the chart around
/// `start`, returning the Polyak average of the second half of the iterates.
FramePoint spsa_refine(const FrameSearchSpace& space, const FrameObjective& noisy, FramePoint start,
                       double scale, int iterations, std::mt19937_64& engine,
                       std::vector<std::pair<int, double>>& trace, int trace_offset) {
    Chart chart(space, std::move(start));
    const Eigen::Index n = chart.size();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(n);
    int averaged = 0;
    const double a = 0.25 / std::max(scale, 1e-3);
    const double c = 0.15;
    const double big_a = 0.1 * iterations;
    for (int it = 0; it < iterations; ++it) {
        const double ak = a / std::pow(it + 1 + big_a, 0.602);
        const double ck = c / std::pow(it + 1, 0.101);
        Eigen::VectorXd delta(n);
        for (Eigen::Index i = 0; i < n; ++i) delta(i) = (engine() & 1ULL) ? 1.0 : -1.0;
        const double fp = noisy(chart.at(v + ck * delta));
        const double fm = noisy(chart.at(v - ck * delta));
        const double g = (fp - fm) / (2.0 * ck);
        v += ak * g * delta;  // delta_i^{-1} == delta_i
        v = v.cwiseMax(-kPi).cwiseMin(kPi);
        if (it >= iterations / 2) {
            avg += v;
            ++averaged;
        }
        if ((it + 1) % 50 == 0) trace.emplace_back(trace_offset + it + 1, 0.5 * (fp + fm));
    }
    if (averaged > 0) v = avg / averaged;
    return chart.at(v);
}

}  // namespace

double score_objective(const DensityOperator& rho, const Observable& k, const OrthonormalBasis& basis, double h) {
    if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    require_same_dim(rho.dim(), k.dim(), "score_objective");
    const RealVector p0 = kernels::outcome_probabilities(rho.matrix(), basis.matrix());
    const RealVector pp = kernels::outcome_probabilities(translate(rho, k, h).matrix(), basis.matrix());
    const RealVector pm = kernels::outcome_probabilities(translate(rho, k, -h).matrix(), basis.matrix());
    double sum = 0;
    for (Eigen::Index x = 0; x < p0.size(); ++x) {
        if (p0(x) <= kProbFloor) continue;
        sum += std::abs(pp(x) - pm(x)) / (4.0 * h);
    }
    return sum;
}

EstimationReport estimate_atr_sampled(const DensityOperator& rho, const Observable& k, long long shots, double h,
                                      const OptimizerConfig& cfg) {
    require_same_dim(rho.dim(), k.dim(), "estimate_atr_sampled");
    if (shots < 0) throw Error(ErrorCode::InvalidShotCount, "shot count must be nonnegative");
    if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "theta step must be positive");
    if (shots == 0) {
        EstimationReport r = maximize_aw(rho, k, cfg);
        r.theta_step = h;
        return r;
    }
    const ComplexMatrix rho_plus = translate(rho, k, h).matrix();
    const ComplexMatrix rho_minus = translate(rho, k, -h).matrix();
    long long excluded = 0, queries = 0;
    const FrameSearchSpace space{rho.dim(), 1, 0};

    // Coarse direct search on the noisy objective, then a stochastic
    // approximation stage that averages the noise out. The two stages draw
    // from their own streams of the restart's sampling engine.
    OptimizerConfig coarse = cfg;
    coarse.restarts = 0;
    coarse.max_iters = std::min(cfg.max_iters, 12);
    coarse.tol = std::max(cfg.tol, 1e-6);
    const int spsa_iterations = 1500;

    EstimationReport report;
    report.shots = shots;
    report.theta_step = h;
    report.seed = cfg.seed;
    double best_check = -std::numeric_limits<double>::infinity();
    FramePoint best_point;
    const int restarts = std::max(1, cfg.restarts);
    for (int r = 0; r < restarts; ++r) {
        auto start_engine = make_engine(cfg.seed, static_cast<std::uint64_t>(r));
        auto sample_engine = make_engine(mix64(cfg.seed ^ 0x5A3B'1E5ULL), static_cast<std::uint64_t>(r));
        SampledObjective sampled{rho.matrix(), rho_plus, rho_minus, shots, h, &sample_engine, &excluded, &queries};
        const FrameObjective noisy = [&](const FramePoint& p) { return sampled(p.frames[0]); };
        std::vector<FramePoint> warm{random_point(space, start_engine)};
        coarse.seed = mix64(cfg.seed + static_cast<std::uint64_t>(r));
        const FrameOptimum stage1 = optimize_frames(space, noisy, coarse, warm);
        std::vector<std::pair<int, double>> trace = stage1.trace;
        const int offset = trace.empty() ? 0 : trace.back().first;
        FramePoint refined = spsa_refine(space, noisy, stage1.point, std::max(stage1.value, 0.0),
                                         spsa_iterations, sample_engine, trace, offset);
        double check = 0;
        for (int i = 0; i < 4; ++i) check += noisy(refined) / 4.0;
        report.iterations += stage1.iterations + spsa_iterations;
        if (check > best_check) {
            best_check = check;
            best_point = std::move(refined);
            report.trace = std::move(trace);
            report.meta["best_restart"] = r;
        }
    }
    report.restarts_used = restarts;
    report.frames = best_point.frames;
    report.estimate = score_objective(rho, k, OrthonormalBasis(best_point.frames[0]), h);
    report.exact = trace_asymmetry(rho, k);
    // A fixed stochastic budget; no convergence claim is made under noise.
    report.converged = false;
    report.meta["sampled_objective"] = best_check;
    report.meta["excluded_outcomes"] = static_cast<double>(excluded);
    report.meta["queries"] = static_cast<double>(queries);
    return report;
}

}  // namespace asymforge
