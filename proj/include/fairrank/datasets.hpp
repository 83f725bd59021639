#pragma once

// Built-in instances: the six-applicant job-seeker problem and a seeded
// news-style generator (ratings/5 plus Gaussian noise, clipped to [0,1]).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fairrank/core.hpp"
#include "fairrank/sampler.hpp"

namespace fairrank::datasets {

/// Three male then three female applicants with nearly equal relevance.
inline std::vector<Item> jobseeker_items() {
    const double u[] = {0.82, 0.81, 0.80, 0.79, 0.78, 0.77};
    std::vector<Item> items;
    for (int i = 0; i < 6; ++i) {
        items.push_back({"applicant_" + std::to_string(i + 1), i < 3 ? "M" : "F", u[i]});
    }
    return items;
}

inline RankingProblem jobseeker(const PositionBias& bias = PositionBias::log_discount()) {
    return RankingProblem(jobseeker_items(), bias);
}

/// Portable Gaussian draws on top of mt19937_64 (std::normal_distribution is
/// implementation-defined).
class PortableNormal {
public:
    explicit PortableNormal(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return unit_interval(engine_()); }
    std::uint64_t bits() { return engine_(); }

    double next() {
        if (spare_) {
            spare_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    bool spare_ = false;
    double cached_ = 0.0;
};

inline constexpr std::uint64_t kNewsSeed = 20180619;

/// 25 items from two sources (15 and 10). Ratings 1..5 are drawn per item,
/// with the larger source skewed toward higher ratings.
inline std::vector<Item> synthetic_news_items(std::uint64_t seed = kNewsSeed, double noise = 0.05) {
    PortableNormal rng(seed);
    std::vector<Item> items;
    auto draw = [&](const std::vector<int>& ratings) { return ratings[rng.bits() % ratings.size()]; };
    const std::vector<int> source_a = {2, 3, 3, 4, 4, 4, 5, 5};
    const std::vector<int> source_b = {1, 2, 2, 3, 3, 4, 4, 5};
    for (int i = 0; i < 25; ++i) {
        bool first = i < 15;
        int rating = draw(first ? source_a : source_b);
        double u = std::clamp(rating / 5.0 + noise * rng.next(), 0.0, 1.0);
        char id[16];
        std::snprintf(id, sizeof id, "news_%02d", i + 1);
        items.push_back({id, first ? "source_a" : "source_b", u});
    }
    return items;
}

inline RankingProblem synthetic_news(std::uint64_t seed = kNewsSeed,
                                     const PositionBias& bias = PositionBias::log_discount()) {
    return RankingProblem(synthetic_news_items(seed), bias);
}

}  // namespace fairrank::datasets
