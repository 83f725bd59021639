// Runs the fairrank binary end to end through the shell.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fairrank/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("fairrank_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string data(const std::string& name) { return std::string(FAIRRANK_DATA_DIR) + "/" + name; }

    CliResult run(const std::string& args) const {
        std::string err_path = path("stderr.txt");
        std::string cmd = std::string("\"") + FAIRRANK_CLI + "\" " + args + " 2>\"" + err_path + "\"";
        CliResult r;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (pipe == nullptr) return r;
        char buf[4096];
        std::size_t got;
        while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
        int status = pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = read(err_path);
        return r;
    }

    static std::string read(const std::string& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

    // solve into a file and return the parsed JSON
    json solve_to(const std::string& name, const std::string& extra) const {
        auto r = run("solve " + data("jobseeker.csv") + " --bias log:e " + extra + " > \"" + path(name) + "\"");
        EXPECT_EQ(r.code, 0) << r.err;
        return json::parse(read(path(name)));
    }

    fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

TEST_F(Cli, SolveUnconstrained) {
    auto j = solve_to("s.json", "");
    EXPECT_EQ(j["status"], "optimal");
    EXPECT_NEAR(j["objective"].get<double>(), 3.8193, 5e-4);
    for (double x : j["P"]["data"].get<std::vector<double>>()) EXPECT_TRUE(x < 1e-9 || x > 1 - 1e-9);
}

TEST_F(Cli, SolveParity) {
    auto j = solve_to("s.json", "--constraint demographic-parity:M,F");
    EXPECT_NEAR(j["objective"].get<double>(), 3.8031, 5e-4);
    EXPECT_EQ(j["fairness_constraints"].size(), 1u);
    EXPECT_LE(j["constraints"][0]["residual"].get<double>(), 1e-6);
}

TEST_F(Cli, SolveReadsStdin) {
    auto r = run("solve - < \"" + data("jobseeker.csv") + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["objective"].get<double>(), 3.8193, 5e-4);
}

TEST_F(Cli, EmptyItemsFileIsUsageError) {
    write("empty.csv", "");
    auto r = run("solve " + path("empty.csv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("empty"), std::string::npos);
}

TEST_F(Cli, ParseErrorNamesLine) {
    write("bad.csv", "id,group,utility\na,x,0.5\nb,y,lots\n");
    auto r = run("solve " + path("bad.csv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownNotionAndMissingSubcommand) {
    EXPECT_EQ(run("solve " + data("jobseeker.csv") + " --constraint fairness:M,F").code, 1);
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("solve").code, 1);
}

TEST_F(Cli, InfeasibleSolveCarriesDiagnosis) {
    write("skew.csv", "id,group,utility\na,x,0.99\nb,x,0.99\nc,x,0.99\nd,y,0.01\ne,y,0.01\nf,y,0.01\n");
    auto r = run("solve " + path("skew.csv") + " --constraint disparate-treatment:x,y");
    EXPECT_EQ(r.code, 2);
    auto j = json::parse(r.out);
    EXPECT_EQ(j["status"], "infeasible");
    ASSERT_EQ(j["diagnosis"].size(), 1u);
    EXPECT_FALSE(j["diagnosis"][0]["feasible"].get<bool>());
    EXPECT_TRUE(j["diagnosis"][0].contains("note"));
}

TEST_F(Cli, MultiGroupAndIndividualConstraints) {
    write("three.csv", "id,group,utility\na,x,0.6\nb,y,0.58\nc,z,0.55\nd,x,0.5\ne,y,0.48\nf,z,0.45\n");
    auto r = run("solve " + path("three.csv") + " --constraint demographic-parity:x,y,z");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["fairness_constraints"].size(), 2u);
    auto s = run("solve " + path("three.csv") + " --constraint individual-treatment");
    ASSERT_EQ(s.code, 0) << s.err;
    auto j = json::parse(s.out);
    EXPECT_EQ(j["fairness_constraints"].size(), 5u);
    EXPECT_NEAR(j["objective"].get<double>(), 2.5374028126, 1e-8);  // independent dense LP
}

TEST_F(Cli, PlotDataAndLpDump) {
    auto r = run("solve " + data("jobseeker.csv") + " --constraint demographic-parity:M,F --emit-plot-data "
                 + path("plot.csv") + " --lp-dump " + path("model.lp"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(read(path("plot.csv")));
    ASSERT_EQ(rows.size(), 37u);
    EXPECT_EQ(rows[0], "item,rank,probability");
    EXPECT_EQ(rows[1].rfind("applicant_1,1,", 0), 0u);
    auto lp = read(path("model.lp"));
    EXPECT_NE(lp.find("Maximize"), std::string::npos);
    EXPECT_NE(lp.find("fair_1"), std::string::npos);
}

TEST_F(Cli, DecomposePermutationHasOneTerm) {
    solve_to("s.json", "");
    auto r = run("decompose " + path("s.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    ASSERT_EQ(j["terms"].size(), 1u);
    EXPECT_DOUBLE_EQ(j["terms"][0]["theta"].get<double>(), 1.0);
}

TEST_F(Cli, DecomposeParityHasTwoTerms) {
    solve_to("s.json", "--constraint demographic-parity:M,F");
    auto r = run("decompose " + path("s.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["terms"].size(), 2u);
    double total = 0.0;
    for (const auto& t : j["terms"]) total += t["theta"].get<double>();
    EXPECT_NEAR(total, 1.0, 1e-6);
    EXPECT_LE(j["reconstruction_error"].get<double>(), 1e-6);
}

TEST_F(Cli, DecomposeRejectsTamperedMatrix) {
    auto j = solve_to("s.json", "--constraint demographic-parity:M,F");
    auto& data = j["P"]["data"];
    for (std::size_t k = 0; k < 6; ++k) data[k] = data[k].get<double>() * 0.9;
    write("tampered.json", j.dump());
    auto r = run("decompose " + path("tampered.json"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("doubly stochastic"), std::string::npos) << r.err;
}

TEST_F(Cli, SampleUserIsStable) {
    solve_to("s.json", "--constraint demographic-parity:M,F");
    ASSERT_EQ(run("decompose " + path("s.json") + " > " + path("d.json")).code, 0);
    auto a = run("sample " + path("d.json") + " --user alice");
    auto b = run("sample " + path("d.json") + " --user alice");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(lines(a.out).size(), 1u);
    EXPECT_NE(a.out.find("applicant_"), std::string::npos);
}

TEST_F(Cli, SampleCountZeroIsEmpty) {
    solve_to("s.json", "");
    ASSERT_EQ(run("decompose " + path("s.json") + " > " + path("d.json")).code, 0);
    auto r = run("sample " + path("d.json") + " --count 0 --seed 1");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(run("sample " + path("d.json") + " --count 3 --user x").code, 1);
}

TEST_F(Cli, SampleFrequenciesFollowTheta) {
    solve_to("s.json", "--constraint demographic-parity:M,F");
    ASSERT_EQ(run("decompose " + path("s.json") + " > " + path("d.json")).code, 0);
    auto d = json::parse(read(path("d.json")));
    auto r = run("sample " + path("d.json") + " --count 100000 --seed 7");
    ASSERT_EQ(r.code, 0);
    std::map<std::string, double> freq;
    for (const auto& l : lines(r.out)) freq[l] += 1.0 / 100000;
    ASSERT_EQ(freq.size(), d["terms"].size());
    auto ids = d["problem"]["items"];
    for (const auto& t : d["terms"]) {
        std::string key;
        for (const auto& i : t["ranking"]) {
            if (!key.empty()) key += ',';
            key += ids[i.get<std::size_t>()]["id"].get<std::string>();
        }
        EXPECT_NEAR(freq[key], t["theta"].get<double>(), 0.01) << key;
    }
}

TEST_F(Cli, EvaluatePrpDtr) {
    solve_to("s.json", "");
    auto r = run("evaluate " + path("s.json") + " --groups M,F --against-optimal");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["dtr"].get<double>(), 1.7483, 1e-3);
    EXPECT_NEAR(j["cof"].get<double>(), 0.0, 1e-9);
    EXPECT_NEAR(j["symmetric_unfairness"]["dtr"].get<double>(), 1.0 / 1.7483, 1e-3);
}

TEST_F(Cli, EvaluateParityGap) {
    solve_to("s.json", "--constraint demographic-parity:M,F");
    auto r = run("evaluate " + path("s.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LE(json::parse(r.out)["exposure_gap"].get<double>(), 1e-6);
}

TEST_F(Cli, FeasibilityVerdicts) {
    auto ok = run("feasibility " + data("jobseeker.csv") + " --groups M,F --notion disparate-treatment");
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(json::parse(ok.out)["feasible"].get<bool>());
    write("skew.csv", "id,group,utility\na,x,0.99\nb,x,0.99\nc,x,0.99\nd,y,0.01\ne,y,0.01\nf,y,0.01\n");
    auto bad = run("feasibility " + path("skew.csv") + " --notion disparate-treatment");
    EXPECT_EQ(bad.code, 2);
    auto j = json::parse(bad.out);
    EXPECT_FALSE(j["feasible"].get<bool>());
    EXPECT_NEAR(j["attainable_range"][1].get<double>(), 1.8155, 1e-4);
    EXPECT_NEAR(j["required_ratio"].get<double>(), 99.0, 1e-9);
}

TEST_F(Cli, SimulateIsDeterministic) {
    solve_to("s.json", "--constraint disparate-treatment:M,F");
    ASSERT_EQ(run("decompose " + path("s.json") + " > " + path("d.json")).code, 0);
    auto a = run("simulate " + path("d.json") + " --users 20000 --seed 3 --threads 1");
    auto b = run("simulate " + path("d.json") + " --users 20000 --seed 3 --threads 4");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto j = json::parse(a.out);
    EXPECT_NEAR(j["dtr"].get<double>(), 1.0, 4.0 * j["dtr_se"].get<double>());
}

TEST_F(Cli, PipelineReproducesAnalyticMetrics) {
    auto r = run("solve " + data("jobseeker.csv") + " --constraint disparate-treatment:M,F | \"" + FAIRRANK_CLI
                 + "\" decompose - > " + path("d.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_EQ(run("sample " + path("d.json") + " --count 50000 --seed 11 > " + path("rankings.txt")).code, 0);
    auto analytic = json::parse(run("evaluate " + path("d.json")).out);
    auto empirical = run("evaluate " + path("d.json") + " --rankings " + path("rankings.txt"));
    ASSERT_EQ(empirical.code, 0) << empirical.err;
    auto e = json::parse(empirical.out);
    EXPECT_EQ(e["source"], "empirical");
    EXPECT_NEAR(e["dtr"].get<double>(), analytic["dtr"].get<double>(), 0.02);
    EXPECT_NEAR(e["dcg"].get<double>(), analytic["dcg"].get<double>(), 0.01);
}

TEST_F(Cli, GenerateDataMatchesShippedFixtures) {
    ASSERT_EQ(run("generate-data --out-dir " + dir_.string()).code, 0);
    EXPECT_EQ(read(path("jobseeker.csv")), read(data("jobseeker.csv")));
    EXPECT_EQ(read(path("synthetic_news.csv")), read(data("synthetic_news.csv")));
}

}  // namespace
