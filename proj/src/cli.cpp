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

#include "asymforge/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "asymforge/bounds.hpp"
#include "asymforge/io.hpp"
#include "asymforge/quasi.hpp"

namespace asymforge::cli {

namespace {

enum class OutputFormat { json, jsonl, csv_summary };

const std::map<std::string, OutputFormat> kOutputFormats = {
    {"json", OutputFormat::json}, {"jsonl", OutputFormat::jsonl}, {"csv-summary", OutputFormat::csv_summary}};

struct Inputs {
    DensityOperator rho;
    std::optional<Observable> k;
    std::optional<Observable> x;
    std::optional<OrthonormalBasis> basis;
};

DensityOperator load_state(const std::string& path) { return validate_state(io::load_matrix(path)); }

Observable load_observable(const std::string& path) {
    try {
        return Observable(io::load_matrix(path));
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.detail());
    }
}

const Observable& need(const std::optional<Observable>& o, MeasureName q, const char* flag) {
    if (!o) {
        throw Error(ErrorCode::InvalidArgument,
                    "quantity " + std::string(to_string(q)) + " needs " + std::string(flag));
    }
    return *o;
}

MeasureValue evaluate(MeasureName q, const Inputs& in, const OptimizerConfig& cfg) {
    MeasureValue v{q, 0, {}};
    auto flag_identity = [&](const Observable& k) {
        if (k.is_proportional_to_identity()) v.metadata["observable_proportional_to_identity"] = "true";
    };
    switch (q) {
        case MeasureName::a_tr: {
            const auto& k = need(in.k, q, "--observable");
            flag_identity(k);
            v.value = trace_asymmetry(in.rho, k);
            break;
        }
        case MeasureName::a_tr_normalized: {
            const auto& k = need(in.k, q, "--observable");
            flag_identity(k);
            v.value = normalized_trace_asymmetry(in.rho, k);
            break;
        }
        case MeasureName::a_w_at_basis: {
            const auto& k = need(in.k, q, "--observable");
            if (in.basis) {
                v.value = avg_abs_im_weak_value(in.rho, k, *in.basis);
                v.metadata["basis"] = "supplied";
            } else {
                v.value = avg_abs_im_weak_value(in.rho, k, optimal_basis_exact(in.rho, k));
                v.metadata["basis"] = "commutator_eigenbasis";
            }
            break;
        }
        case MeasureName::variance:
            v.value = variance(in.rho, need(in.k, q, "--observable"));
            break;
        case MeasureName::qfi:
            v.value = qfi(in.rho, need(in.k, q, "--observable"));
            break;
        case MeasureName::qfi_normalized:
            v.value = normalized_qfi(in.rho, need(in.k, q, "--observable"));
            break;
        case MeasureName::l1_coherence:
            if (in.basis) {
                v.value = l1_coherence(in.rho, *in.basis);
                v.metadata["basis"] = "supplied";
            } else if (in.k) {
                v.value = l1_coherence(in.rho, OrthonormalBasis::eigenbasis(*in.k));
                v.metadata["basis"] = "observable_eigenbasis";
            } else {
                v.value = l1_coherence(in.rho, OrthonormalBasis::computational(in.rho.dim()));
                v.metadata["basis"] = "computational";
            }
            break;
        case MeasureName::c_kd_fixed_k: {
            const auto& k = need(in.k, q, "--observable");
            const std::vector<FramePoint> warm = {{{optimal_basis_exact(in.rho, k).matrix()}, {}}};
            const auto r = maximize_kd_nonreality(in.rho, OrthonormalBasis::eigenbasis(k), cfg, warm);
            v.value = r.estimate;
            v.metadata["method"] = "variational";
            v.metadata["restarts_used"] = std::to_string(r.restarts_used);
            v.metadata["converged"] = r.converged ? "true" : "false";
            break;
        }
        case MeasureName::purity:
            v.value = purity(in.rho);
            break;
        case MeasureName::purity_bound:
            v.value = purity_bound(in.rho);
            break;
        case MeasureName::noncomm_avg:
            v.value = noncomm_avg(in.rho, need(in.x, q, "--x-observable"), need(in.k, q, "--observable"));
            break;
        case MeasureName::wy_skew:
            v.value = wy_skew(in.rho, need(in.k, q, "--observable"));
            break;
    }
    return v;
}

std::vector<MeasureName> parse_quantities(const std::string& s) {
    std::vector<MeasureName> out;
    std::stringstream ss(s);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto q = parse_measure_name(token);
        if (!q) throw Error(ErrorCode::InvalidArgument, "unknown quantity '" + token + "'");
        out.push_back(*q);
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no quantity given");
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

OptimizerConfig make_config(int restarts, int max_iters, double tol, std::uint64_t seed, const std::string& method) {
    OptimizerConfig cfg;
    cfg.restarts = restarts;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    cfg.seed = seed;
    const auto m = parse_optimizer_method(method);
    if (!m) throw Error(ErrorCode::InvalidArgument, "unknown optimizer method '" + method + "'");
    cfg.method = *m;
    if (restarts < 0 || max_iters < 1 || !(tol > 0)) {
        throw Error(ErrorCode::InvalidArgument, "--restarts must be >= 0, --max-iters >= 1 and --tol > 0");
    }
    return cfg;
}

std::vector<double> parse_triple(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "--bloch expects three comma-separated numbers");
        }
    }
    if (v.size() != 3) throw Error(ErrorCode::InvalidArgument, "--bloch expects three comma-separated numbers");
    return v;
}

struct BoundSummary {
    std::size_t count = 0;
    std::size_t violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_slack = -std::numeric_limits<double>::infinity();
};

}  // namespace

nlohmann::json to_json(const MeasureValue& v) {
    nlohmann::json j = {{"name", to_string(v.name)}, {"value", v.value}};
    if (!v.metadata.empty()) j["metadata"] = v.metadata;
    return j;
}

nlohmann::json to_json(const EstimationReport& r) {
    nlohmann::json j = {{"estimate", r.estimate},
                        {"iterations", r.iterations},
                        {"restarts_used", r.restarts_used},
                        {"shots", r.shots},
                        {"theta_step", r.theta_step},
                        {"seed", r.seed},
                        {"converged", r.converged}};
    if (r.exact) {
        j["exact"] = *r.exact;
        j["abs_error"] = std::abs(r.estimate - *r.exact);
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& [it, value] : r.trace) trace.push_back({it, value});
    j["trace"] = std::move(trace);
    if (!r.frames.empty()) j["basis"] = io::matrix_to_json(r.frames.front());
    if (!r.meta.empty()) j["meta"] = r.meta;
    return j;
}

std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ASYMFORGE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
    if (n == 0) return;
    const std::size_t workers = worker_count(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trace-norm asymmetry toolkit"};
    app.require_subcommand(1);

    std::string output = "json";
    int restarts = 8, max_iters = 400;
    double tol = 1e-9;
    std::string method = "coordinate";
    auto add_optimizer_flags = [&](CLI::App* sub) {
        sub->add_option("--restarts", restarts, "random optimizer restarts");
        sub->add_option("--max-iters", max_iters, "sweeps or rounds per restart");
        sub->add_option("--tol", tol, "optimizer convergence tolerance");
        sub->add_option("--method", method, "simplex or coordinate")->check(CLI::IsMember({"simplex", "coordinate"}));
    };
    auto add_output_flag = [&](CLI::App* sub) {
        sub->add_option("--output", output, "json, jsonl or csv-summary")
            ->check(CLI::IsMember({"json", "jsonl", "csv-summary"}));
    };

    // compute
    auto* compute = app.add_subcommand("compute", "evaluate measures of a state");
    std::string quantity, state_path, observable_path, x_path, basis_path;
    std::uint64_t compute_seed = 0;
    compute->add_option("--quantity", quantity, "measure name(s), comma separated")->required();
    compute->add_option("--state", state_path, "state JSON file")->required();
    compute->add_option("--observable", observable_path, "observable K JSON file");
    compute->add_option("--x-observable", x_path, "second observable X JSON file");
    compute->add_option("--basis", basis_path, "basis JSON file (columns are basis vectors)");
    compute->add_option("--seed", compute_seed, "optimizer seed");
    add_optimizer_flags(compute);
    add_output_flag(compute);

    // verify
    auto* verify = app.add_subcommand("verify", "check bounds on seeded random instances");
    std::string bounds = "all";
    long long dim = 0, count = 100;
    std::optional<std::uint64_t> verify_seed;
    bool summary_only = false;
    int verify_restarts = BoundContext::default_config().restarts;
    int verify_max_iters = BoundContext::default_config().max_iters;
    verify->add_option("--bounds", bounds, "bound ids, comma separated, or all");
    verify->add_option("--dim", dim, "Hilbert space dimension")->required();
    verify->add_option("--count", count, "number of instances");
    verify->add_option("--seed", verify_seed, "instance seed (mandatory)");
    verify->add_option("--restarts", verify_restarts, "random optimizer restarts per sup");
    verify->add_option("--max-iters", verify_max_iters, "sweeps or rounds per restart");
    verify->add_option("--tol", tol, "optimizer convergence tolerance");
    verify->add_option("--method", method, "simplex or coordinate")
        ->check(CLI::IsMember({"simplex", "coordinate"}));
    verify->add_flag("--summary-only", summary_only, "omit per-instance reports");
    add_output_flag(verify);

    // estimate
    auto* estimate = app.add_subcommand("estimate", "variational or shot-based estimate of A_Tr");
    long long shots = 0;
    double theta_step = 1e-2;
    std::optional<std::uint64_t> estimate_seed;
    estimate->add_option("--state", state_path, "state JSON file")->required();
    estimate->add_option("--observable", observable_path, "observable K JSON file")->required();
    estimate->add_option("--shots", shots, "samples per probability estimate; 0 for noiseless");
    estimate->add_option("--theta-step", theta_step, "finite-difference step h");
    estimate->add_option("--seed", estimate_seed, "seed (mandatory when --shots > 0)");
    add_optimizer_flags(estimate);
    add_output_flag(estimate);

    // random
    auto* random = app.add_subcommand("random", "generate a state JSON");
    std::string kind = "haar_pure", bloch_text, out_path;
    long long rank = 1;
    std::uint64_t random_seed = 0;
    long long random_dim = 2;
    random->add_option("--dim", random_dim, "Hilbert space dimension");
    random->add_option("--kind", kind, "haar_pure, ginibre or bloch")
        ->check(CLI::IsMember({"haar_pure", "ginibre", "bloch"}));
    random->add_option("--rank", rank, "Ginibre rank");
    random->add_option("--bloch", bloch_text, "Bloch vector x,y,z");
    random->add_option("--seed", random_seed, "seed");
    random->add_option("--out", out_path, "output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitInvalid;
    }
    const OutputFormat format = kOutputFormats.at(output);

    try {
        if (*compute) {
            const auto quantities = parse_quantities(quantity);
            Inputs in{load_state(state_path), std::nullopt, std::nullopt, std::nullopt};
            if (!observable_path.empty()) in.k = load_observable(observable_path);
            if (!x_path.empty()) in.x = load_observable(x_path);
            if (!basis_path.empty()) in.basis = OrthonormalBasis(io::load_matrix(basis_path));
            if (in.k) require_same_dim(in.rho.dim(), in.k->dim(), "--observable");
            if (in.x) require_same_dim(in.rho.dim(), in.x->dim(), "--x-observable");
            if (in.basis) require_same_dim(in.rho.dim(), in.basis->dim(), "--basis");
            const auto cfg = make_config(restarts, max_iters, tol, compute_seed, method);
            std::vector<MeasureValue> values;
            for (const auto q : quantities) values.push_back(evaluate(q, in, cfg));
            if (format == OutputFormat::csv_summary) {
                out << "name,value\n";
                for (const auto& v : values) out << to_string(v.name) << "," << format_double(v.value) << "\n";
            } else if (format == OutputFormat::jsonl) {
                for (const auto& v : values) out << to_json(v).dump() << "\n";
            } else if (values.size() == 1) {
                out << to_json(values.front()).dump() << "\n";
            } else {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& v : values) arr.push_back(to_json(v));
                out << arr.dump() << "\n";
            }
            return kExitOk;
        }

        if (*verify) {
            const auto ids = parse_bound_selection(bounds);
            if (!verify_seed) throw Error(ErrorCode::InvalidArgument, "verify needs --seed");
            if (dim < 2) throw Error(ErrorCode::InvalidArgument, "--dim must be at least 2");
            if (count < 1) throw Error(ErrorCode::InvalidArgument, "--count must be positive");
            const auto cfg = make_config(verify_restarts, verify_max_iters, tol, *verify_seed, method);
            const auto n = static_cast<std::size_t>(count);
            std::vector<std::vector<BoundReport>> results(n);
            parallel_for(n, [&](std::size_t i) {
                auto inst = random_instance(dim, *verify_seed, i);
                OptimizerConfig c = cfg;
                c.seed = *verify_seed ^ (0x9E37'79B9'7F4A'7C15ULL * (i + 1));
                BoundContext ctx(std::move(inst.rho), std::move(inst.k), std::move(inst.x), c, inst.digest);
                results[i] = check_all(ctx, ids);
            });
            std::map<BoundId, BoundSummary> summary;
            bool all_ok = true;
            for (const auto& reports : results) {
                for (const auto& r : reports) {
                    auto& s = summary[r.bound_id];
                    ++s.count;
                    if (!r.satisfied) {
                        ++s.violations;
                        all_ok = false;
                    }
                    s.min_slack = std::min(s.min_slack, r.slack);
                    s.max_slack = std::max(s.max_slack, r.slack);
                }
            }
            auto summary_json = [&](BoundId id) {
                const auto& s = summary.at(id);
                return nlohmann::json{{"summary", true},        {"bound_id", to_string(id)},
                                      {"count", s.count},       {"violations", s.violations},
                                      {"min_slack", s.min_slack}, {"max_slack", s.max_slack}};
            };
            if (format == OutputFormat::csv_summary) {
                out << "bound_id,count,violations,min_slack,max_slack\n";
                for (const auto id : ids) {
                    const auto& s = summary.at(id);
                    out << to_string(id) << "," << s.count << "," << s.violations << ","
                        << format_double(s.min_slack) << "," << format_double(s.max_slack) << "\n";
                }
            } else if (format == OutputFormat::jsonl) {
                if (!summary_only) {
                    for (const auto& reports : results) {
                        for (const auto& r : reports) out << to_json(r).dump() << "\n";
                    }
                }
                for (const auto id : ids) out << summary_json(id).dump() << "\n";
            } else {
                nlohmann::json doc;
                doc["summary"] = nlohmann::json::array();
                for (const auto id : ids) doc["summary"].push_back(summary_json(id));
                if (!summary_only) {
                    doc["reports"] = nlohmann::json::array();
                    for (const auto& reports : results) {
                        for (const auto& r : reports) doc["reports"].push_back(to_json(r));
                    }
                }
                out << doc.dump() << "\n";
            }
            if (!all_ok) err << "bound violations found\n";
            return all_ok ? kExitOk : kExitViolations;
        }

        if (*estimate) {
            if (shots < 0) throw Error(ErrorCode::InvalidShotCount, "--shots must be nonnegative");
            if (shots > 0 && !estimate_seed) throw Error(ErrorCode::InvalidArgument, "sampled estimate needs --seed");
            const DensityOperator rho = load_state(state_path);
            const Observable k = load_observable(observable_path);
            const auto cfg = make_config(restarts, max_iters, tol, estimate_seed.value_or(0), method);
            const auto report = estimate_atr_sampled(rho, k, shots, theta_step, cfg);
            out << to_json(report).dump() << "\n";
            return kExitOk;
        }

        if (*random) {
            RandomSpec spec;
            spec.dim = random_dim;
            spec.seed = random_seed;
            if (random_dim < 1) throw Error(ErrorCode::InvalidArgument, "--dim must be positive");
            if (kind == "ginibre") {
                spec.kind = GinibreMixed{static_cast<int>(rank)};
            } else if (kind == "bloch") {
                if (bloch_text.empty()) throw Error(ErrorCode::InvalidArgument, "--kind bloch needs --bloch x,y,z");
                const auto r = parse_triple(bloch_text);
                spec.kind = BlochVector{r[0], r[1], r[2]};
            }
            const DensityOperator rho = random_state(spec);
            const std::string text = io::matrix_to_json(rho.matrix()).dump();
            if (out_path.empty()) {
                out << text << "\n";
            } else {
                io::save_matrix(out_path, rho.matrix());
                out << nlohmann::json{{"written", out_path}, {"dim", rho.dim()}}.dump() << "\n";
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_numerical_failure(e.code()) ? kExitNumerical : kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

}  // namespace asymforge::cli
