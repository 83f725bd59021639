#pragma once

// Drawing deterministic rankings from a BvN decomposition.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "fairrank/bvn.hpp"

namespace fairrank {

/// Identifier of the user-key hash, recorded in outputs for reproducibility.
inline constexpr std::string_view kUserHashAlgorithm = "fnv1a64-splitmix64";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t user_hash(std::string_view key) { return splitmix64(fnv1a64(key)); }

/// Top 53 bits of x as a double in [0,1).
inline constexpr double unit_interval(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Inverse-CDF lookup over the decomposition's θ; boundary ties go to the lower index.
class TermSampler {
public:
    explicit TermSampler(const BvnDecomposition& d) : d_(d) {
        if (d.terms.empty()) {
            throw InvalidArgument("cannot sample from an empty decomposition");
        }
        double acc = 0.0;
        for (const auto& t : d.terms) {
            acc += t.theta;
            cumulative_.push_back(acc);
        }
    }

    std::size_t term_for(double unit) const {
        double target = unit * cumulative_.back();
        // first cumulative >= target: a target exactly on a boundary stays with the lower term
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
        auto idx = static_cast<std::size_t>(it - cumulative_.begin());
        return std::min(idx, cumulative_.size() - 1);
    }

    const Ranking& ranking_for(double unit) const { return d_.terms[term_for(unit)].ranking; }
    std::size_t size() const { return cumulative_.size(); }

private:
    const BvnDecomposition& d_;
    std::vector<double> cumulative_;
};

/// Seeded draws; the engine is std::mt19937_64 and the unit draw is its top 53 bits.
class RankingSampler {
public:
    RankingSampler(const BvnDecomposition& d, std::uint64_t seed) : terms_(d), engine_(seed) {}

    std::size_t next_term() { return terms_.term_for(unit_interval(engine_())); }
    const Ranking& next() { return terms_.ranking_for(unit_interval(engine_())); }

private:
    TermSampler terms_;
    std::mt19937_64 engine_;
};

/// One draw with probability θ_k/Σθ for term k.
inline Ranking sample(const BvnDecomposition& d, std::uint64_t seed) {
    RankingSampler s(d, seed);
    return s.next();
}

inline std::size_t term_for_user(const BvnDecomposition& d, std::string_view user_key) {
    return TermSampler(d).term_for(unit_interval(user_hash(user_key)));
}

/// Same key, same ranking: the draw is a pure function of (decomposition, key).
inline Ranking sample_for_user(const BvnDecomposition& d, std::string_view user_key) {
    return d.terms.at(term_for_user(d, user_key)).ranking;
}

}  // namespace fairrank
