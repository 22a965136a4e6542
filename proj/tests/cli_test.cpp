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

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "asymforge/io.hpp"
#include "test_support.hpp"

namespace asymforge {
namespace {

namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("asymforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const ComplexMatrix& m) {
        const auto p = dir_ / name;
        io::save_matrix(p, m);
        return p.string();
    }
    std::string write_text(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    fs::path dir_;
};

TEST_F(CliTest, ComputeTraceAsymmetry) {
    const auto state = write("q1.json", testing::bloch_matrix(0.6, 0, 0));
    const auto k = write("k.json", testing::sz());
    const auto r = run({"compute", "--quantity", "a_tr", "--state", state, "--observable", k});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["name"], "a_tr");
    EXPECT_NEAR(j["value"].get<double>(), 0.6, 1e-12);
}

TEST_F(CliTest, ComputeSeveralQuantitiesAndFormats) {
    const auto state = write("mm.json", testing::mm_state(2).matrix());
    const auto k = write("k.json", testing::sz());
    const auto arr = run({"compute", "--quantity", "purity,a_tr", "--state", state, "--observable", k});
    ASSERT_EQ(arr.code, 0) << arr.err;
    const auto j = nlohmann::json::parse(arr.out);
    ASSERT_TRUE(j.is_array());
    EXPECT_NEAR(j[0]["value"].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j[1]["value"].get<double>(), 0.0, 1e-12);

    const auto csv = run({"compute", "--quantity", "purity", "--state", state, "--output", "csv-summary"});
    ASSERT_EQ(csv.code, 0) << csv.err;
    EXPECT_EQ(csv.out.substr(0, 11), "name,value\n");
    EXPECT_NE(csv.out.find("purity,0.5"), std::string::npos);

    const auto jl = run({"compute", "--quantity", "purity,purity_bound", "--state", state, "--output", "jsonl"});
    ASSERT_EQ(jl.code, 0);
    std::istringstream lines(jl.out);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        EXPECT_TRUE(nlohmann::json::parse(line).contains("value"));
        ++n;
    }
    EXPECT_EQ(n, 2);
}

TEST_F(CliTest, ComputeFlagsIdentityObservable) {
    const auto state = write("q1.json", testing::bloch_matrix(0.6, 0, 0));
    const auto k = write("i.json", ComplexMatrix::Identity(2, 2) * 3.0);
    const auto r = run({"compute", "--quantity", "a_tr", "--state", state, "--observable", k});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["value"].get<double>(), 0.0, 1e-12);
    EXPECT_EQ(j["metadata"]["observable_proportional_to_identity"], "true");
}

TEST_F(CliTest, ComputeVariationalQuantity) {
    const auto state = write("q1.json", testing::bloch_matrix(0.6, 0, 0));
    const auto k = write("k.json", testing::sz());
    const auto r = run({"compute", "--quantity", "c_kd_fixed_k", "--state", state, "--observable", k});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), 0.6, 1e-6);
}

TEST_F(CliTest, InvalidInputsExitTwo) {
    const auto ragged = write_text("bad.json", R"({"dim":2,"matrix":[[[1,0],[0,0]],[[0,0]]]})");
    const auto r = run({"compute", "--quantity", "purity", "--state", ragged});
    EXPECT_EQ(r.code, cli::kExitInvalid);
    EXPECT_NE(r.err.find("ParseError"), std::string::npos);

    const auto state = write("q1.json", testing::bloch_matrix(0.6, 0, 0));
    EXPECT_EQ(run({"compute", "--quantity", "a_tr", "--state", state}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"compute", "--quantity", "nonsense", "--state", state}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"compute", "--quantity", "purity", "--state", (dir_ / "missing.json").string()}).code,
              cli::kExitInvalid);
    const auto not_psd = write("np.json", testing::mat2(1.5, 0, 0, -0.5));
    EXPECT_EQ(run({"compute", "--quantity", "purity", "--state", not_psd}).code, cli::kExitInvalid);
    const auto k3 = write("k3.json", ComplexMatrix::Identity(3, 3));
    EXPECT_EQ(run({"compute", "--quantity", "a_tr", "--state", state, "--observable", k3}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({}).code, cli::kExitInvalid);
}

TEST_F(CliTest, VerifyAllBoundsSummary) {
    const auto r = run({"verify", "--bounds", "all", "--dim", "2", "--count", "3", "--seed", "5", "--output", "jsonl",
                        "--summary-only"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j["summary"].get<bool>());
        EXPECT_EQ(j["count"], 3);
        EXPECT_EQ(j["violations"], 0);
        ++rows;
    }
    EXPECT_EQ(rows, 16);
}

TEST_F(CliTest, VerifyReportsAndDeterminism) {
    const std::vector<std::string> args = {"verify", "--bounds", "P2,P3", "--dim", "3", "--count", "4", "--seed", "9"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["summary"].size(), 2u);
    EXPECT_EQ(j["reports"].size(), 8u);
    EXPECT_EQ(j["reports"][0]["bound_id"], "P2");

    const auto csv = run({"verify", "--bounds", "P2", "--dim", "4", "--count", "5", "--seed", "1", "--output",
                          "csv-summary"});
    ASSERT_EQ(csv.code, 0);
    EXPECT_EQ(csv.out.rfind("bound_id,count,violations,min_slack,max_slack\nP2,5,0,", 0), 0u);
}

TEST_F(CliTest, VerifyRejectsBadArguments) {
    EXPECT_EQ(run({"verify", "--bounds", "BOGUS", "--dim", "2", "--seed", "1"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"verify", "--bounds", "P2", "--dim", "2"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"verify", "--bounds", "P2", "--dim", "1", "--seed", "1"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"verify", "--bounds", "P2", "--seed", "1"}).code, cli::kExitInvalid);
}

TEST_F(CliTest, EstimateNoiseless) {
    const auto state = write("q1.json", testing::bloch_matrix(0.6, 0, 0));
    const auto k = write("k.json", testing::sz());
    const auto r = run({"estimate", "--state", state, "--observable", k, "--shots", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["estimate"].get<double>(), 0.6, 1e-6);
    EXPECT_TRUE(j.contains("trace"));
    EXPECT_TRUE(j.contains("basis"));

    const auto sym = write("sym.json", testing::mat2(0.7, 0, 0, 0.3));
    const auto s = run({"estimate", "--state", sym, "--observable", k});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_LE(nlohmann::json::parse(s.out)["estimate"].get<double>(), 1e-9);
}

TEST_F(CliTest, EstimateSampledNeedsSeed) {
    const auto state = write("q1.json", testing::bloch_matrix(0.6, 0, 0));
    const auto k = write("k.json", testing::sz());
    EXPECT_EQ(run({"estimate", "--state", state, "--observable", k, "--shots", "1000"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"estimate", "--state", state, "--observable", k, "--shots", "-4", "--seed", "1"}).code,
              cli::kExitInvalid);
    const auto r = run({"estimate", "--state", state, "--observable", k, "--shots", "100000", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["shots"], 100000);
    EXPECT_FALSE(j["converged"].get<bool>());
    EXPECT_NEAR(j["estimate"].get<double>(), 0.6, 0.1);
}

TEST_F(CliTest, RandomStates) {
    const auto b = run({"random", "--kind", "bloch", "--bloch", "0.6,0,0"});
    ASSERT_EQ(b.code, 0) << b.err;
    const ComplexMatrix m = io::parse_matrix(b.out);
    EXPECT_LT(max_abs_entry(m - testing::bloch_matrix(0.6, 0, 0)), 1e-15);

    const auto g = run({"random", "--dim", "4", "--kind", "ginibre", "--rank", "2", "--seed", "8"});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto eig = testing::eigenvalues_oracle(io::parse_matrix(g.out));
    EXPECT_EQ((eig.array() > 1e-9).count(), 2);
    EXPECT_NEAR(eig.sum(), 1.0, 1e-12);

    const auto h = run({"random", "--dim", "3", "--kind", "haar_pure", "--seed", "8"});
    ASSERT_EQ(h.code, 0);
    const ComplexMatrix p = io::parse_matrix(h.out);
    EXPECT_NEAR((p * p).trace().real(), 1.0, 1e-12);
    EXPECT_EQ(h.out, run({"random", "--dim", "3", "--kind", "haar_pure", "--seed", "8"}).out);
    EXPECT_NE(h.out, run({"random", "--dim", "3", "--kind", "haar_pure", "--seed", "9"}).out);

    EXPECT_EQ(run({"random", "--kind", "bloch", "--bloch", "1,1,0"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"random", "--dim", "2", "--kind", "ginibre", "--rank", "5"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"random", "--kind", "sphere"}).code, cli::kExitInvalid);
}

TEST_F(CliTest, RandomRoundTripsThroughCompute) {
    const auto path = (dir_ / "rho.json").string();
    const auto w = run({"random", "--dim", "2", "--kind", "bloch", "--bloch", "0.6,0.3,0", "--out", path});
    ASSERT_EQ(w.code, 0) << w.err;
    EXPECT_EQ(nlohmann::json::parse(w.out)["dim"], 2);
    const auto k = write("k.json", testing::sz());
    const auto r = run({"compute", "--quantity", "a_tr", "--state", path, "--observable", k});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), std::sqrt(0.45), 1e-12);
}

TEST(Workers, ThreadCapAndParallelFor) {
    ::setenv("ASYMFORGE_THREADS", "1", 1);
    EXPECT_EQ(cli::worker_count(100), 1u);
    ::setenv("ASYMFORGE_THREADS", "junk", 1);
    EXPECT_GE(cli::worker_count(100), 1u);
    EXPECT_EQ(cli::worker_count(1), 1u);
    ::unsetenv("ASYMFORGE_THREADS");

    std::vector<int> hits(50, 0);
    cli::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (const int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(cli::parallel_for(5, [](std::size_t i) {
                     if (i == 3) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}

}  // namespace
}  // namespace asymforge
