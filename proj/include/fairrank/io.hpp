#pragma once

// Items CSV ingestion and the JSON documents exchanged between CLI stages.
//
// CSV: header `id,group,utility`, one item per line, UTF-8.
// JSON: matrices are {"n": N, "data": [row-major N*N]}; decompositions are
// {"n", "terms": [{"theta", "ranking": [item indices by rank]}], "residual"};
// every document embeds the "problem" it was computed for.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairrank/bvn.hpp"
#include "fairrank/constraints.hpp"
#include "fairrank/core.hpp"
#include "fairrank/feasibility.hpp"
#include "fairrank/lp.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/simulator.hpp"

namespace fairrank::io {

using nlohmann::json;

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line, const std::string& source, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        char c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    cur += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
            was_quoted = false;
        } else {
            cur += c;
        }
    }
    if (quoted) {
        throw ParseError(source, lineno, "unterminated quoted field");
    }
    fields.push_back(cur);
    return fields;
}

inline std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && issp(static_cast<unsigned char>(s[b]))) ++b;
    return s.substr(b);
}

}  // namespace detail

inline std::vector<Item> read_items_csv(std::istream& in, const std::string& source = "<items>") {
    std::vector<Item> items;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
            line.erase(0, 3);
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        auto fields = detail::split_csv_line(detail::trim(line), source, lineno);
        if (!header) {
            if (fields.size() != 3 || detail::trim(fields[0]) != "id" || detail::trim(fields[1]) != "group"
                || detail::trim(fields[2]) != "utility") {
                throw ParseError(source, lineno, "expected header 'id,group,utility'");
            }
            header = true;
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError(source, lineno, "expected 3 fields, found " + std::to_string(fields.size()));
        }
        Item item{detail::trim(fields[0]), detail::trim(fields[1]), 0.0};
        if (item.id.empty()) {
            throw ParseError(source, lineno, "empty item id");
        }
        std::string text = detail::trim(fields[2]);
        std::size_t used = 0;
        try {
            item.utility = std::stod(text, &used);
        } catch (const std::exception&) {
            throw ParseError(source, lineno, "utility '" + text + "' is not a number");
        }
        if (used != text.size()) {
            throw ParseError(source, lineno, "utility '" + text + "' is not a number");
        }
        if (!(item.utility >= 0.0 && item.utility <= 1.0)) {
            throw ParseError(source, lineno, "utility " + text + " outside [0,1]");
        }
        for (const auto& seen : items) {
            if (seen.id == item.id) {
                throw ParseError(source, lineno, "duplicate item id '" + item.id + "'");
            }
        }
        items.push_back(std::move(item));
    }
    if (!header) {
        throw ParseError(source, lineno, "empty items file");
    }
    if (items.empty()) {
        throw ParseError(source, lineno, "items file has a header but no items");
    }
    return items;
}

inline void write_items_csv(std::ostream& out, const std::vector<Item>& items) {
    auto field = [](const std::string& s) {
        if (s.find_first_of(",\"") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char c : s) {
            q += c;
            if (c == '"') q += '"';
        }
        return q + "\"";
    };
    out << "id,group,utility\n";
    std::ostringstream num;
    for (const auto& item : items) {
        num.str("");
        num.precision(17);
        num << item.utility;
        out << field(item.id) << ',' << field(item.group) << ',' << num.str() << '\n';
    }
}

/// "log:e", "log:2", "dcg:e:K", "dcg:2:K", "explicit:v1,v2,...".
inline PositionBias parse_bias(const std::string& text) {
    auto base_of = [&](const std::string& b) {
        if (b == "e" || b == "natural") return LogBase::Natural;
        if (b == "2") return LogBase::Two;
        throw InvalidArgument("bias '" + text + "': log base must be 'e' or '2'");
    };
    if (text.rfind("log:", 0) == 0) {
        return PositionBias::log_discount(base_of(text.substr(4)));
    }
    if (text.rfind("dcg:", 0) == 0) {
        auto rest = text.substr(4);
        auto colon = rest.find(':');
        if (colon == std::string::npos) {
            throw InvalidArgument("bias '" + text + "': expected dcg:BASE:K");
        }
        std::size_t used = 0;
        long k = 0;
        try {
            k = std::stol(rest.substr(colon + 1), &used);
        } catch (const std::exception&) {
            throw InvalidArgument("bias '" + text + "': K is not an integer");
        }
        if (k < 1 || used != rest.size() - colon - 1) {
            throw InvalidArgument("bias '" + text + "': K must be a positive integer");
        }
        return PositionBias::dcg_at_k(static_cast<std::size_t>(k), base_of(rest.substr(0, colon)));
    }
    if (text.rfind("explicit:", 0) == 0) {
        std::vector<double> v;
        std::stringstream ss(text.substr(9));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                v.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw InvalidArgument("bias '" + text + "': '" + tok + "' is not a number");
            }
        }
        return PositionBias::explicit_vector(std::move(v));
    }
    throw InvalidArgument("unknown bias '" + text + "' (expected log:e, log:2, dcg:BASE:K or explicit:...)");
}

inline json to_json(const Matrix& m) { return {{"n", m.size()}, {"data", m.data()}}; }

inline Matrix matrix_from_json(const json& j) {
    auto n = j.at("n").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (n == 0) {
        throw InvalidArgument("matrix dimension must be positive");
    }
    return Matrix(n, std::move(data));
}

inline json to_json(const RankingProblem& p) {
    json items = json::array();
    for (const auto& item : p.items()) {
        items.push_back({{"id", item.id}, {"group", item.group}, {"utility", item.utility}});
    }
    return {{"items", items}, {"position_bias", std::vector<double>(p.position_bias().begin(), p.position_bias().end())}};
}

inline RankingProblem problem_from_json(const json& j) {
    std::vector<Item> items;
    for (const auto& it : j.at("items")) {
        items.push_back({it.at("id").get<std::string>(), it.at("group").get<std::string>(), it.at("utility").get<double>()});
    }
    return RankingProblem(std::move(items), j.at("position_bias").get<std::vector<double>>());
}

inline std::string to_string(Relation r) {
    switch (r) {
    case Relation::Equal: return "=";
    case Relation::LessEqual: return "<=";
    case Relation::GreaterEqual: return ">=";
    }
    return "?";
}

inline json to_json(const FairnessConstraint& c) {
    return {{"label", c.label}, {"f", c.f}, {"g", c.g}, {"h", c.h}, {"relation", to_string(c.relation)}};
}

inline json to_json(const BvnDecomposition& d) {
    json terms = json::array();
    for (const auto& t : d.terms) {
        terms.push_back({{"theta", t.theta}, {"ranking", t.ranking}});
    }
    return {{"n", d.n}, {"terms", terms}, {"residual", d.residual}};
}

inline BvnDecomposition decomposition_from_json(const json& j) {
    BvnDecomposition d;
    d.n = j.at("n").get<std::size_t>();
    d.residual = j.value("residual", 0.0);
    for (const auto& t : j.at("terms")) {
        BvnTerm term{t.at("theta").get<double>(), t.at("ranking").get<Ranking>(), d.terms.size()};
        if (!is_permutation(term.ranking, d.n)) {
            throw InvalidArgument("decomposition term is not a permutation of " + std::to_string(d.n) + " items");
        }
        if (!(term.theta > 0.0)) {
            throw InvalidArgument("decomposition weights must be positive");
        }
        d.terms.push_back(std::move(term));
    }
    return d;
}

inline json to_json(const SolveReport& r) {
    json j = {{"status", to_string(r.status)},
              {"objective", r.objective},
              {"max_violation", r.max_violation},
              {"duality_gap", r.duality_gap},
              {"iterations", r.iterations}};
    json res = json::array();
    for (const auto& c : r.residuals) {
        res.push_back({{"label", c.label}, {"value", c.value}, {"residual", c.residual}});
    }
    j["constraints"] = res;
    if (r.P) {
        j["P"] = to_json(r.P->matrix());
        j["tolerance"] = r.P->tolerance();
    }
    if (!r.message.empty()) {
        j["message"] = r.message;
    }
    return j;
}

inline json to_json(const MetricsReport& m) {
    json groups = json::array();
    for (const auto& g : m.groups) {
        groups.push_back({{"label", g.label},
                          {"size", g.size},
                          {"exposure", g.exposure},
                          {"mean_utility", g.mean_utility},
                          {"ctr", g.ctr}});
    }
    json j = {{"dcg", m.dcg}, {"groups", groups}, {"g0", m.g0}, {"g1", m.g1}};
    j["dtr"] = m.dtr ? json(*m.dtr) : json(nullptr);
    j["dir"] = m.dir ? json(*m.dir) : json(nullptr);
    if (m.cof) {
        j["cof"] = *m.cof;
    }
    return j;
}

inline json to_json(const FeasibilityReport& r) {
    json j = {{"feasible", r.feasible}, {"notion", to_string(r.notion)}, {"method", r.method}};
    if (r.notion != Notion::DemographicParity) {
        j["required_ratio"] = r.required_ratio;
    }
    if (r.method == "closed-form") {
        auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
        j["attainable_range"] = {num(r.attainable.min), num(r.attainable.max)};
    }
    if (!r.note.empty()) {
        j["note"] = r.note;
    }
    return j;
}

inline json to_json(const SimulationReport& s) {
    json groups = json::array();
    for (const auto& g : s.groups) {
        groups.push_back({{"label", g.label},
                          {"size", g.size},
                          {"exposure", g.exposure},
                          {"exposure_se", g.exposure_se},
                          {"ctr", g.ctr},
                          {"ctr_se", g.ctr_se}});
    }
    json j = {{"users", s.users},
              {"seed", s.seed},
              {"scale", s.scale},
              {"item_exposure", s.item_exposure},
              {"item_exposure_se", s.item_exposure_se},
              {"item_ctr", s.item_ctr},
              {"groups", groups},
              {"g0", s.g0},
              {"g1", s.g1}};
    auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
    j["dtr"] = opt(s.dtr);
    j["dtr_se"] = opt(s.dtr_se);
    j["dir"] = opt(s.dir);
    j["dir_se"] = opt(s.dir_se);
    return j;
}

/// Frequency matrix of observed rankings: P_ij = share of rankings placing item i at rank j.
inline Matrix empirical_matrix(const std::vector<Ranking>& rankings, std::size_t n) {
    if (rankings.empty()) {
        throw InvalidArgument("no rankings to evaluate");
    }
    Matrix m(n);
    double w = 1.0 / static_cast<double>(rankings.size());
    for (const auto& r : rankings) {
        if (!is_permutation(r, n)) {
            throw InvalidArgument("ranking is not a permutation of the problem's items");
        }
        for (std::size_t j = 0; j < n; ++j) {
            m(r[j], j) += w;
        }
    }
    return m;
}

}  // namespace fairrank::io
