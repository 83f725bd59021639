// Six applicants, two groups: compare the unconstrained ranking with the
// three fair alternatives, then serve a few users from the parity solution.

#include <cstdio>

#include "fairrank/datasets.hpp"
#include "fairrank/fairrank.hpp"

int main() {
    using namespace fairrank;
    auto problem = datasets::jobseeker();

    auto best = solve(problem);
    std::printf("%-22s %8s %8s %8s\n", "constraint", "DCG", "DTR", "DIR");
    auto row = [&](const char* name, const SolveReport& r) {
        const auto& p = r.P->matrix();
        std::printf("%-22s %8.4f %8.4f %8.4f\n", name, r.objective, dtr(p, problem, "M", "F"),
                    dir(p, problem, "M", "F"));
    };
    row("none", best);
    for (auto notion : {Notion::DemographicParity, Notion::DisparateTreatment, Notion::DisparateImpact}) {
        auto r = solve(problem, {make_constraint(notion, problem, "M", "F")});
        if (!r.optimal()) {
            std::printf("%-22s %s\n", to_string(notion).c_str(), to_string(r.status).c_str());
            continue;
        }
        row(to_string(notion).c_str(), r);
    }

    auto fair = solve(problem, {demographic_parity(problem, "M", "F")});
    auto d = decompose(*fair.P);
    std::printf("\nparity solution as %zu rankings:\n", d.terms.size());
    for (const auto& t : d.terms) {
        std::printf("  %.4f ", t.theta);
        for (auto i : t.ranking) std::printf(" %s", problem.item(i).id.c_str());
        std::printf("\n");
    }
    std::printf("\nper-user rankings:\n");
    for (const char* user : {"alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi"}) {
        std::printf("  %-6s", user);
        for (auto i : sample_for_user(d, user)) std::printf(" %s", problem.item(i).id.c_str());
        std::printf("\n");
    }
}
