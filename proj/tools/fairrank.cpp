// fairrank command-line front end.
//
//   fairrank solve ITEMS.csv [--bias log:e] [--constraint NOTION:G1,G2[,...]]...
//   fairrank decompose SOLUTION.json
//   fairrank sample DECOMPOSITION.json (--user KEY... | --seed S --count K)
//   fairrank evaluate SOLUTION.json [--groups A,B] [--against-optimal] [--rankings FILE]
//   fairrank feasibility ITEMS.csv --groups A,B --notion NOTION
//   fairrank simulate DECOMPOSITION.json --users N --seed S
//   fairrank generate-data --out-dir DIR
//
// Any input path may be "-" for stdin. Exit codes: 0 ok, 1 usage or bad
// input, 2 infeasible, 3 numerical failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrank/datasets.hpp"
#include "fairrank/fairrank.hpp"
#include "fairrank/io.hpp"

namespace {

using fairrank::io::json;

constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw fairrank::InvalidArgument("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw fairrank::InvalidArgument((path == "-" ? std::string("<stdin>") : path) + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw fairrank::InvalidArgument("cannot write '" + path + "'");
    }
    out << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        out.push_back(tok);
    }
    return out;
}

std::pair<std::string, std::string> group_pair(const fairrank::RankingProblem& p, const std::string& spec) {
    if (spec.empty()) {
        if (p.groups().size() < 2) {
            throw fairrank::InvalidArgument("the problem has a single group; nothing to compare");
        }
        return {p.groups()[0], p.groups()[1]};
    }
    auto g = split(spec, ',');
    if (g.size() != 2) {
        throw fairrank::InvalidArgument("--groups expects A,B");
    }
    return {g[0], g[1]};
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

// ---- solve ----

struct SolveArgs {
    std::string items;
    std::string bias = "log:e";
    std::vector<std::string> constraints;
    std::string plot_data;
    std::string lp_dump;
};

struct ParsedConstraint {
    std::string spec;
    std::optional<fairrank::Notion> notion;  // empty for individual-treatment
    std::vector<std::string> groups;
};

ParsedConstraint parse_constraint(const std::string& spec) {
    if (spec == "individual-treatment") {
        return {spec, std::nullopt, {}};
    }
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw fairrank::InvalidArgument("constraint '" + spec + "': expected NOTION:G1,G2[,...]");
    }
    return {spec, fairrank::parse_notion(spec.substr(0, colon)), split(spec.substr(colon + 1), ',')};
}

int run_solve(const SolveArgs& a) {
    std::istringstream text(slurp(a.items));
    auto items = fairrank::io::read_items_csv(text, a.items == "-" ? "<stdin>" : a.items);
    fairrank::RankingProblem problem(std::move(items), fairrank::io::parse_bias(a.bias));

    std::vector<ParsedConstraint> parsed;
    std::vector<fairrank::FairnessConstraint> constraints;
    for (const auto& spec : a.constraints) {
        auto c = parse_constraint(spec);
        auto rows = c.notion ? fairrank::multi_group_constraints(problem, *c.notion, c.groups)
                             : fairrank::individual_treatment(problem);
        constraints.insert(constraints.end(), rows.begin(), rows.end());
        parsed.push_back(std::move(c));
    }
    auto lp = fairrank::build_lp(problem, constraints);
    if (!a.lp_dump.empty()) {
        std::ofstream out(a.lp_dump);
        fairrank::write_lp_format(out, lp);
    }
    auto report = fairrank::solve(lp);

    json j = fairrank::io::to_json(report);
    j["problem"] = fairrank::io::to_json(problem);
    json cs = json::array();
    for (const auto& c : constraints) {
        cs.push_back(fairrank::io::to_json(c));
    }
    j["fairness_constraints"] = cs;

    if (report.status == fairrank::SolveStatus::Infeasible) {
        json diagnosis = json::array();
        for (const auto& c : parsed) {
            if (!c.notion) {
                continue;
            }
            for (std::size_t k = 0; k + 1 < c.groups.size(); ++k) {
                auto f = fairrank::check_feasibility(problem, *c.notion, c.groups[k], c.groups[k + 1]);
                json d = fairrank::io::to_json(f);
                d["groups"] = {c.groups[k], c.groups[k + 1]};
                diagnosis.push_back(d);
            }
        }
        j["diagnosis"] = diagnosis;
        print(j);
        std::cerr << "fairrank: constraints are infeasible\n";
        return kExitInfeasible;
    }
    if (!report.optimal()) {
        print(j);
        std::cerr << "fairrank: solver reported " << fairrank::to_string(report.status) << ": " << report.message
                  << '\n';
        return kExitNumerical;
    }
    if (!a.plot_data.empty()) {
        std::ostringstream out;
        out << "item,rank,probability\n";
        out.precision(17);
        const auto& m = report.P->matrix();
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t r = 0; r < m.size(); ++r) {
                out << problem.item(i).id << ',' << r + 1 << ',' << m(i, r) << '\n';
            }
        }
        write_file(a.plot_data, out.str());
    }
    print(j);
    return 0;
}

// ---- decompose ----

int run_decompose(const std::string& path, double tol) {
    auto j = read_json(path);
    if (!j.contains("P")) {
        throw fairrank::InvalidArgument("solution JSON has no matrix 'P'");
    }
    auto m = fairrank::io::matrix_from_json(j.at("P"));
    auto d = fairrank::decompose(m, tol);
    json out = fairrank::io::to_json(d);
    out["reconstruction_error"] = fairrank::reconstruct(d).max_abs_diff(m);
    out["user_hash"] = std::string(fairrank::kUserHashAlgorithm);
    if (j.contains("problem")) {
        out["problem"] = j["problem"];
    }
    print(out);
    return 0;
}

// ---- sample ----

std::vector<std::string> item_ids(const json& j, std::size_t n) {
    std::vector<std::string> ids;
    if (j.contains("problem")) {
        for (const auto& it : j["problem"].at("items")) {
            ids.push_back(it.at("id").get<std::string>());
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back(std::to_string(i));
        }
    }
    if (ids.size() != n) {
        throw fairrank::DimensionMismatch("problem items", n, ids.size());
    }
    return ids;
}

std::string format_ranking(const fairrank::Ranking& r, const std::vector<std::string>& ids) {
    std::string line;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (k > 0) line += ',';
        line += ids[r[k]];
    }
    return line;
}

int run_sample(const std::string& path, const std::vector<std::string>& users, std::uint64_t seed,
               std::uint64_t count) {
    auto j = read_json(path);
    auto d = fairrank::io::decomposition_from_json(j);
    auto ids = item_ids(j, d.n);
    if (!users.empty()) {
        for (const auto& u : users) {
            std::cout << format_ranking(fairrank::sample_for_user(d, u), ids) << '\n';
        }
        return 0;
    }
    if (count == 0) {
        return 0;
    }
    fairrank::RankingSampler sampler(d, seed);
    std::string buf;
    for (std::uint64_t k = 0; k < count; ++k) {
        buf += format_ranking(sampler.next(), ids);
        buf += '\n';
        if (buf.size() > (1u << 16)) {
            std::cout << buf;
            buf.clear();
        }
    }
    std::cout << buf;
    return 0;
}

// ---- evaluate ----

fairrank::Matrix matrix_of(const json& j) {
    if (j.contains("P")) {
        return fairrank::io::matrix_from_json(j["P"]);
    }
    if (j.contains("terms")) {
        return fairrank::reconstruct(fairrank::io::decomposition_from_json(j));
    }
    throw fairrank::InvalidArgument("input has neither a matrix 'P' nor decomposition 'terms'");
}

fairrank::Matrix rankings_matrix(const std::string& path, const fairrank::RankingProblem& p) {
    std::istringstream in(slurp(path));
    std::vector<fairrank::Ranking> rankings;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fairrank::Ranking r;
        for (const auto& id : split(line, ',')) {
            std::size_t i = 0;
            while (i < p.size() && p.item(i).id != id) ++i;
            if (i == p.size()) {
                throw fairrank::io::ParseError(path, lineno, "unknown item id '" + id + "'");
            }
            r.push_back(i);
        }
        if (!fairrank::is_permutation(r, p.size())) {
            throw fairrank::io::ParseError(path, lineno, "line is not a ranking of all items");
        }
        rankings.push_back(std::move(r));
    }
    return fairrank::io::empirical_matrix(rankings, p.size());
}

int run_evaluate(const std::string& path, const std::string& groups, bool against_optimal,
                 const std::string& rankings) {
    auto j = read_json(path);
    if (!j.contains("problem")) {
        throw fairrank::InvalidArgument("input JSON has no embedded 'problem'");
    }
    auto problem = fairrank::io::problem_from_json(j["problem"]);
    auto m = rankings.empty() ? matrix_of(j) : rankings_matrix(rankings, problem);
    auto [g0, g1] = group_pair(problem, groups);

    std::optional<fairrank::Matrix> best;
    if (against_optimal) {
        auto r = fairrank::solve(problem);
        if (!r.optimal()) {
            std::cerr << "fairrank: unconstrained solve failed: " << r.message << '\n';
            return kExitNumerical;
        }
        best = r.P->matrix();
    }
    auto report = fairrank::evaluate(m, problem, g0, g1, best ? &*best : nullptr);
    json out = fairrank::io::to_json(report);
    out["exposure_gap"] =
        std::abs(fairrank::group_exposure(m, problem, g0) - fairrank::group_exposure(m, problem, g1));
    out["stochasticity_violation"] = fairrank::stochasticity_violation(m);
    auto sym = [](const std::optional<double>& r) {
        return r && *r > 0.0 ? json(std::min(*r, 1.0 / *r)) : json(nullptr);
    };
    out["symmetric_unfairness"] = {
        {"dtr", sym(report.dtr)},
        {"dir", sym(report.dir)},
        {"note", "convenience value min(r, 1/r); 1 means balanced, orientation-free"}};
    if (!rankings.empty()) {
        out["source"] = "empirical";
    }
    print(out);
    return 0;
}

// ---- feasibility ----

int run_feasibility(const std::string& path, const std::string& bias, const std::string& groups,
                    const std::string& notion) {
    std::istringstream text(slurp(path));
    auto items = fairrank::io::read_items_csv(text, path == "-" ? "<stdin>" : path);
    fairrank::RankingProblem problem(std::move(items), fairrank::io::parse_bias(bias));
    auto [g0, g1] = group_pair(problem, groups);
    auto r = fairrank::check_feasibility(problem, fairrank::parse_notion(notion), g0, g1);
    json out = fairrank::io::to_json(r);
    out["groups"] = {g0, g1};
    print(out);
    return r.feasible ? 0 : kExitInfeasible;
}

// ---- simulate ----

int run_simulate(const std::string& path, std::uint64_t users, std::uint64_t seed, const std::string& groups,
                 unsigned threads) {
    auto j = read_json(path);
    if (!j.contains("problem")) {
        throw fairrank::InvalidArgument("decomposition JSON has no embedded 'problem'");
    }
    auto problem = fairrank::io::problem_from_json(j["problem"]);
    auto d = fairrank::io::decomposition_from_json(j);
    fairrank::SimulationOptions opt;
    opt.threads = threads;
    if (!groups.empty() || problem.groups().size() >= 2) {
        std::tie(opt.g0, opt.g1) = group_pair(problem, groups);
    }
    print(fairrank::io::to_json(fairrank::simulate(d, problem, users, seed, opt)));
    return 0;
}

// ---- generate-data ----

int run_generate(const std::string& dir) {
    std::ostringstream a;
    fairrank::io::write_items_csv(a, fairrank::datasets::jobseeker_items());
    write_file(dir + "/jobseeker.csv", a.str());
    std::ostringstream b;
    fairrank::io::write_items_csv(b, fairrank::datasets::synthetic_news_items());
    write_file(dir + "/synthetic_news.csv", b.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair ranking under exposure constraints"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "solve the fair ranking LP for an items CSV");
    solve->add_option("items", solve_args.items, "items CSV (id,group,utility) or -")->required();
    solve->add_option("--bias", solve_args.bias, "log:e, log:2, dcg:BASE:K or explicit:v1,v2,...");
    solve->add_option("--constraint", solve_args.constraints,
                      "NOTION:G1,G2[,...] with NOTION one of demographic-parity, disparate-treatment, "
                      "disparate-impact; or individual-treatment");
    solve->add_option("--emit-plot-data", solve_args.plot_data, "write item,rank,probability triples to FILE");
    solve->add_option("--lp-dump", solve_args.lp_dump, "write the LP in CPLEX LP format to FILE");

    std::string input;
    double tol = fairrank::kDefaultBvnTol;
    auto* decompose = app.add_subcommand("decompose", "Birkhoff-von Neumann decomposition of a solution");
    decompose->add_option("solution", input, "solution JSON or -")->required();
    decompose->add_option("--tol", tol, "entries at or below this count as zero");

    std::vector<std::string> users;
    std::uint64_t seed = 0;
    std::uint64_t count = 1;
    auto* sample = app.add_subcommand("sample", "draw rankings from a decomposition");
    sample->add_option("decomposition", input, "decomposition JSON or -")->required();
    auto* user_opt = sample->add_option("--user", users, "stable per-user draw (repeatable)");
    auto* seed_opt = sample->add_option("--seed", seed, "seed for independent draws");
    auto* count_opt = sample->add_option("--count", count, "number of independent draws");
    user_opt->excludes(seed_opt)->excludes(count_opt);

    std::string groups;
    bool against_optimal = false;
    std::string rankings;
    auto* evaluate = app.add_subcommand("evaluate", "fairness and utility metrics of a solution");
    evaluate->add_option("solution", input, "solution or decomposition JSON, or -")->required();
    evaluate->add_option("--groups", groups, "G0,G1 (defaults to the first two groups)");
    evaluate->add_flag("--against-optimal", against_optimal, "also report the cost of fairness");
    evaluate->add_option("--rankings", rankings, "evaluate observed rankings (one comma-separated list per line)");

    std::string bias = "log:e";
    std::string notion = "disparate-treatment";
    auto* feasibility = app.add_subcommand("feasibility", "decide whether a fairness constraint can be met");
    feasibility->add_option("items", input, "items CSV or -")->required();
    feasibility->add_option("--bias", bias, "position bias");
    feasibility->add_option("--groups", groups, "G0,G1 (defaults to the first two groups)");
    feasibility->add_option("--notion", notion, "demographic-parity, disparate-treatment or disparate-impact");

    std::uint64_t n_users = 100000;
    unsigned threads = 0;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo users under the examination click model");
    simulate->add_option("decomposition", input, "decomposition JSON or -")->required();
    simulate->add_option("--users", n_users, "number of simulated users");
    simulate->add_option("--seed", seed, "simulation seed");
    simulate->add_option("--groups", groups, "G0,G1 (defaults to the first two groups)");
    simulate->add_option("--threads", threads, "worker threads (0 = all cores)");

    std::string out_dir = ".";
    auto* generate = app.add_subcommand("generate-data", "write the bundled item fixtures as CSV");
    generate->add_option("--out-dir", out_dir, "target directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve) return run_solve(solve_args);
        if (*decompose) return run_decompose(input, tol);
        if (*sample) return run_sample(input, users, seed, count);
        if (*evaluate) return run_evaluate(input, groups, against_optimal, rankings);
        if (*feasibility) return run_feasibility(input, bias, groups, notion);
        if (*simulate) return run_simulate(input, n_users, seed, groups, threads);
        if (*generate) return run_generate(out_dir);
    } catch (const fairrank::Error& e) {
        std::cerr << "fairrank: " << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "fairrank: malformed JSON input: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
