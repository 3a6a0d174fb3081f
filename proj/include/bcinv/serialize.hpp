#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcinv/natural.hpp"
#include "bcinv/odometer.hpp"
#include "bcinv/order_profiles.hpp"
#include "bcinv/snf.hpp"
#include "bcinv/structure.hpp"

// JSON conventions shared by every report: arbitrary-precision values
// (residues, orders, counts, matrix entries) travel as decimal strings;
// small structural integers (levels, ranks, exponents) as JSON numbers;
// ratios as num/den string pairs.  No floating point anywhere.

namespace bcinv {

using json = nlohmann::ordered_json;

inline json to_json(const Natural& n) { return n.str(); }

inline json to_json(const PrimeSet& s) {
    json a = json::array();
    for (const Natural& p : s) a.push_back(p.str());
    return a;
}

inline json to_json(const std::vector<Natural>& v) {
    json a = json::array();
    for (const Natural& n : v) a.push_back(n.str());
    return a;
}

inline json to_json(const Rational& r) {
    return json{{"num", r.num.str()}, {"den", r.den.str()}};
}

inline json to_json(const MultiIndex& mi) {
    json o = json::object();
    for (const auto& [p, l] : mi.entries) o[p.str()] = l;
    return o;
}

inline json to_json(const OrderProfile& profile) {
    json o;
    o["p"] = profile.p.str();
    o["m"] = profile.m.str();
    o["branch"] = branch_name(profile.branch);
    o["base_order"] = profile.base_order.str();
    o["L"] = profile.L;
    o["degenerate"] = profile.degenerate;
    return o;
}

inline json to_json(const StabilizationData& data) {
    json o;
    o["F"] = to_json(data.F);
    o["q"] = data.q.str();
    o["K"] = to_json(data.K);
    o["d"] = data.d.str();
    o["z"] = to_json(data.z);
    return o;
}

inline json to_json(const SupernaturalNumber& n) {
    json finite = json::object();
    for (const auto& [p, e] : n.finite) finite[p.str()] = static_cast<std::uint64_t>(e);
    json infinite = json::array();
    for (const Natural& p : n.infinite) infinite.push_back(p.str());
    return json{{"finite", finite}, {"infinite", infinite}};
}

inline json to_json(const IntMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m.at(i, j).str());
        rows.push_back(row);
    }
    return rows;
}

inline IntMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) fail(errc::invalid_argument, "matrix must be a nonempty array");
    std::vector<Int> entries;
    const int rows = static_cast<int>(j.size());
    int cols = -1;
    for (const auto& row : j) {
        if (!row.is_array() || row.empty())
            fail(errc::invalid_argument, "matrix rows must be nonempty arrays");
        if (cols < 0) cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != cols)
            fail(errc::invalid_argument, "matrix rows must have equal length");
        for (const auto& cell : row) {
            if (cell.is_number_integer())
                entries.emplace_back(cell.get<long long>());
            else if (cell.is_string())
                entries.emplace_back(Int(cell.get<std::string>()));
            else
                fail(errc::invalid_argument, "matrix entries must be integers or decimal strings");
        }
    }
    return IntMatrix(rows, cols, std::move(entries));
}

inline json to_json(const TorusBundleDescriptor& d) {
    return json{{"torus_rank", d.torus_rank}, {"fiber_size", d.fiber_size.str()}};
}

inline json to_json(const KTheoryExtensionDescriptor& d) {
    return json{{"sub", d.sub.name()}, {"quotient", d.quotient.name()}};
}

inline json to_json(const SubquotientDescriptor& d) {
    json o;
    o["action_primes"] = to_json(d.action_primes);
    o["space_primes"] = to_json(d.space_primes);
    o["kind"] = subquotient_kind_name(d.kind);
    o["summand_count"] = d.summand_count.str();
    o["stabilized_level"] = d.stabilized_level;
    o["stabilization"] = "heuristic";
    o["stabilizer_note"] = d.stabilizer_note;
    if (d.supernatural) o["supernatural"] = to_json(*d.supernatural);
    if (d.k_theory) {
        o["k_theory"] = json{{"K0", to_json(d.k_theory->first)}, {"K1", to_json(d.k_theory->second)}};
    }
    return o;
}

inline json to_json(const CompositionSeriesReport& r) {
    json o;
    o["F"] = to_json(r.F);
    o["bottom"] = json{{"space_primes", to_json(r.bottom.space_primes)}, {"note", r.bottom.note}};
    json layers = json::array();
    for (std::size_t k = 0; k < r.layers.size(); ++k) {
        json layer;
        layer["k"] = static_cast<int>(k + 1);
        json descriptors = json::array();
        for (const auto& d : r.layers[k]) descriptors.push_back(to_json(d));
        layer["summands"] = descriptors;
        layers.push_back(layer);
    }
    o["layers"] = layers;
    o["top"] = json{{"torus_rank", r.top.torus_rank}, {"note", "C(T^F)"}};
    return o;
}

inline json to_json(const BostConnesTruncationReport& r) {
    json o;
    o["complement"] = to_json(r.complement);
    o["level"] = r.level;
    o["group_order"] = r.group_order.str();
    o["generators"] = to_json(r.generators);
    o["dirichlet_primes"] = to_json(r.dirichlet_primes);
    o["E_n"] = to_json(r.E_n);
    o["growth_ratio"] = to_json(r.growth_ratio);
    o["paper_bound"] = to_json(r.paper_bound);
    return o;
}

inline json to_json(const BdKTheoryDescriptor& d) {
    json o;
    o["n"] = to_json(d.n);
    o["K0"] = json{{"tag", d.k0_tag}, {"order_unit_class", d.k0_order_unit_class.str()}};
    o["K1"] = json{{"tag", d.k1_tag}};
    return o;
}

/// Report envelope: every CLI invocation emits exactly this shape.
struct OracleCheck {
    std::string name;
    bool pass = false;
};

inline json make_envelope(const std::string& command, json inputs, json result,
                          const std::vector<OracleCheck>& checks) {
    json o;
    o["schema"] = 1;
    o["command"] = command;
    o["inputs"] = std::move(inputs);
    o["result"] = std::move(result);
    if (!checks.empty()) {
        json cs = json::array();
        for (const auto& c : checks) cs.push_back(json{{"name", c.name}, {"pass", c.pass}});
        o["oracle_checks"] = cs;
    }
    return o;
}

inline json make_error(const std::string& code, const std::string& message) {
    json o;
    o["schema"] = 1;
    o["error"] = json{{"code", code}, {"message", message}};
    return o;
}

/// Plain-text rendering of a report: an indented key/value tree.
inline void render_text(const json& j, std::string& out, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || value.is_array()) {
                out += pad + key + ":\n";
                render_text(value, out, indent + 1);
            } else {
                out += pad + key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
            }
        }
    } else if (j.is_array()) {
        bool scalars = true;
        for (const auto& v : j)
            if (v.is_object() || v.is_array()) scalars = false;
        if (scalars) {
            std::string line;
            for (const auto& v : j) {
                if (!line.empty()) line += ", ";
                line += v.is_string() ? v.get<std::string>() : v.dump();
            }
            out += pad + "[" + line + "]\n";
        } else {
            int i = 0;
            for (const auto& v : j) {
                out += pad + "- [" + std::to_string(i++) + "]\n";
                render_text(v, out, indent + 1);
            }
        }
    } else {
        out += pad + (j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
    }
}

}  // namespace bcinv
