#pragma once

// Monte-Carlo users under the position-bias examination click model.
//
// Each simulated user draws a ranking from the decomposition, examines the item
// at rank j with probability scale·v_j (independently across ranks) and clicks
// an examined item i with probability u_i. Every user owns a counter-derived
// random stream and all tallies are integers, so results are bit-identical for
// a given seed regardless of the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fairrank/bvn.hpp"
#include "fairrank/sampler.hpp"

namespace fairrank {

struct SimulatedGroup {
    std::string label;
    std::size_t size = 0;
    double exposure = 0.0;  // mean examinations per member per user (scaled units)
    double exposure_se = 0.0;
    double ctr = 0.0;  // mean clicks per member per user
    double ctr_se = 0.0;
};

struct SimulationReport {
    std::uint64_t users = 0;
    std::uint64_t seed = 0;
    double scale = 1.0;  // examination probability at rank j is scale·v_j
    std::vector<double> item_exposure;
    std::vector<double> item_exposure_se;
    std::vector<double> item_ctr;
    std::vector<SimulatedGroup> groups;
    std::string g0;
    std::string g1;
    std::optional<double> dtr;
    std::optional<double> dtr_se;
    std::optional<double> dir;
    std::optional<double> dir_se;
};

namespace detail {

class UserStream {
public:
    UserStream(std::uint64_t seed, std::uint64_t user) : state_(splitmix64(seed ^ splitmix64(user))) {}
    double next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return unit_interval(z ^ (z >> 31));
    }

private:
    std::uint64_t state_;
};

struct Tally {
    std::vector<std::uint64_t> examined;  // per item
    std::vector<std::uint64_t> clicked;   // per item
    // per group: Σk, Σk², Σc, Σc² of per-user member counts
    std::vector<std::uint64_t> k1, k2, c1, c2;
    std::uint64_t k01 = 0;  // Σ k_g0·k_g1
    std::uint64_t c01 = 0;

    Tally(std::size_t n, std::size_t groups)
        : examined(n), clicked(n), k1(groups), k2(groups), c1(groups), c2(groups) {}

    void merge(const Tally& o) {
        for (std::size_t i = 0; i < examined.size(); ++i) {
            examined[i] += o.examined[i];
            clicked[i] += o.clicked[i];
        }
        for (std::size_t g = 0; g < k1.size(); ++g) {
            k1[g] += o.k1[g];
            k2[g] += o.k2[g];
            c1[g] += o.c1[g];
            c2[g] += o.c2[g];
        }
        k01 += o.k01;
        c01 += o.c01;
    }
};

// Delta-method standard error of (mean a)/(mean b).
inline double ratio_se(double n, double sa, double saa, double sb, double sbb, double sab) {
    double a = sa / n;
    double b = sb / n;
    double var_a = saa / n - a * a;
    double var_b = sbb / n - b * b;
    double cov = sab / n - a * b;
    double r = a / b;
    double var_r = (var_a - 2.0 * r * cov + r * r * var_b) / (n * b * b);
    return std::sqrt(std::max(var_r, 0.0));
}

}  // namespace detail

struct SimulationOptions {
    std::string g0;  // ratio groups; defaults to the first two groups of the problem
    std::string g1;
    unsigned threads = 0;  // 0: hardware concurrency
};

inline SimulationReport simulate(const BvnDecomposition& d, const RankingProblem& problem, std::uint64_t n_users,
                                 std::uint64_t seed, SimulationOptions options = {}) {
    const std::size_t n = problem.size();
    if (n_users == 0) {
        throw InvalidArgument("simulation needs at least one user");
    }
    if (d.n != n) {
        throw DimensionMismatch("decomposition", n, d.n);
    }
    TermSampler terms(d);
    auto u = problem.utilities();
    auto v = problem.position_bias();
    double vmax = *std::max_element(v.begin(), v.end());
    double scale = vmax > 0.0 ? 1.0 / vmax : 1.0;
    std::vector<double> examine(n);
    for (std::size_t j = 0; j < n; ++j) {
        examine[j] = v[j] * scale;
    }

    const auto& labels = problem.groups();
    std::vector<std::size_t> group_of(n);
    std::vector<std::size_t> group_size(labels.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = std::find(labels.begin(), labels.end(), problem.item(i).group);
        group_of[i] = static_cast<std::size_t>(it - labels.begin());
        ++group_size[group_of[i]];
    }
    if (options.g0.empty() && labels.size() >= 2) {
        options.g0 = labels[0];
        options.g1 = labels[1];
    }
    std::optional<std::size_t> idx0, idx1;
    for (std::size_t g = 0; g < labels.size(); ++g) {
        if (labels[g] == options.g0) idx0 = g;
        if (labels[g] == options.g1) idx1 = g;
    }
    if (!options.g0.empty() && (!idx0 || !idx1 || *idx0 == *idx1)) {
        throw InvalidArgument("simulation ratio groups '" + options.g0 + "', '" + options.g1 + "' are not two groups of the problem");
    }

    auto run_range = [&](std::uint64_t begin, std::uint64_t end, detail::Tally& t) {
        std::vector<std::uint64_t> k(labels.size());
        std::vector<std::uint64_t> c(labels.size());
        for (std::uint64_t user = begin; user < end; ++user) {
            detail::UserStream rng(seed, user);
            const Ranking& ranking = terms.ranking_for(rng.next());
            std::fill(k.begin(), k.end(), 0);
            std::fill(c.begin(), c.end(), 0);
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t item = ranking[j];
                double e = rng.next();
                double click = rng.next();
                if (e < examine[j]) {
                    ++t.examined[item];
                    ++k[group_of[item]];
                    if (click < u[item]) {
                        ++t.clicked[item];
                        ++c[group_of[item]];
                    }
                }
            }
            for (std::size_t g = 0; g < labels.size(); ++g) {
                t.k1[g] += k[g];
                t.k2[g] += k[g] * k[g];
                t.c1[g] += c[g];
                t.c2[g] += c[g] * c[g];
            }
            if (idx0) {
                t.k01 += k[*idx0] * k[*idx1];
                t.c01 += c[*idx0] * c[*idx1];
            }
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, n_users / 1000)));
    threads = std::max(threads, 1u);
    std::vector<detail::Tally> parts(threads, detail::Tally(n, labels.size()));
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            std::uint64_t begin = n_users * w / threads;
            std::uint64_t end = n_users * (w + 1) / threads;
            workers.emplace_back([&, begin, end, w] { run_range(begin, end, parts[w]); });
        }
    }
    detail::Tally total(n, labels.size());
    for (const auto& p : parts) {
        total.merge(p);
    }

    const double users = static_cast<double>(n_users);
    SimulationReport r;
    r.users = n_users;
    r.seed = seed;
    r.scale = scale;
    for (std::size_t i = 0; i < n; ++i) {
        double e = static_cast<double>(total.examined[i]) / users;
        r.item_exposure.push_back(e);
        r.item_exposure_se.push_back(std::sqrt(std::max(e * (1.0 - e), 0.0) / users));
        r.item_ctr.push_back(static_cast<double>(total.clicked[i]) / users);
    }
    auto mean_se = [&](std::uint64_t s1, std::uint64_t s2, double size) {
        double m = static_cast<double>(s1) / users;
        double var = static_cast<double>(s2) / users - m * m;
        return std::pair{m / size, std::sqrt(std::max(var, 0.0) / users) / size};
    };
    for (std::size_t g = 0; g < labels.size(); ++g) {
        double size = static_cast<double>(group_size[g]);
        auto [e, ese] = mean_se(total.k1[g], total.k2[g], size);
        auto [c, cse] = mean_se(total.c1[g], total.c2[g], size);
        r.groups.push_back({labels[g], group_size[g], e, ese, c, cse});
    }
    if (idx0) {
        r.g0 = options.g0;
        r.g1 = options.g1;
        double ubar0 = mean_utility(problem, options.g0);
        double ubar1 = mean_utility(problem, options.g1);
        double s0 = static_cast<double>(group_size[*idx0]);
        double s1 = static_cast<double>(group_size[*idx1]);
        auto ratio = [&](const std::vector<std::uint64_t>& m1, const std::vector<std::uint64_t>& m2,
                         std::uint64_t cross, std::optional<double>& value, std::optional<double>& se) {
            double a = static_cast<double>(m1[*idx0]) / s0;
            double b = static_cast<double>(m1[*idx1]) / s1;
            if (!(b > 0.0) || !(ubar0 > 0.0) || !(ubar1 > 0.0)) {
                return;
            }
            double norm = ubar1 / ubar0;
            value = (a / b) * norm;
            se = norm * detail::ratio_se(users, a, static_cast<double>(m2[*idx0]) / (s0 * s0), b,
                                         static_cast<double>(m2[*idx1]) / (s1 * s1),
                                         static_cast<double>(cross) / (s0 * s1));
        };
        ratio(total.k1, total.k2, total.k01, r.dtr, r.dtr_se);
        ratio(total.c1, total.c2, total.c01, r.dir, r.dir_se);
    }
    return r;
}

}  // namespace fairrank
