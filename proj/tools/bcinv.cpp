// bcinv: exact-arithmetic reports on unit-group orders, stabilization data,
// subgroup indices, Smith normal forms, odometer systems and the structure
// descriptors built from them.  Every subcommand emits a single JSON (or
// plain-text) report envelope on stdout.
//
// Exit codes: 0 success, 1 domain error or failed oracle check (structured
// error JSON on stdout), 2 usage error (message on stderr).

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcinv/arith.hpp"
#include "bcinv/errors.hpp"
#include "bcinv/natural.hpp"
#include "bcinv/odometer.hpp"
#include "bcinv/order_profiles.hpp"
#include "bcinv/serialize.hpp"
#include "bcinv/snf.hpp"
#include "bcinv/structure.hpp"
#include "bcinv/units.hpp"

namespace {

using namespace bcinv;

struct UsageError {
    std::string message;
};

Natural parse_natural_arg(const std::string& text, const std::string& what) {
    try {
        return parse_natural(text);
    } catch (const DomainError&) {
        throw UsageError{what + " must be a decimal natural number, got '" + text + "'"};
    }
}

Natural parse_prime_arg(const std::string& text, const std::string& what) {
    Natural p = parse_natural_arg(text, what);
    if (!is_prime(p)) throw UsageError{p.str() + " is not prime"};
    return p;
}

PrimeSet parse_prime_set(const std::string& text, const std::string& what) {
    PrimeSet set;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        Natural p = parse_prime_arg(item, what);
        if (!set.insert(p).second) throw UsageError{"duplicate prime " + p.str() + " in " + what};
    }
    if (set.empty()) throw UsageError{what + " must list at least one prime"};
    return set;
}

std::vector<Natural> parse_natural_list(const std::string& text, const std::string& what) {
    std::vector<Natural> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(parse_natural_arg(item, what));
    }
    if (values.empty()) throw UsageError{what + " must list at least one value"};
    return values;
}

// "2*3^inf", "2^3", "1"
SupernaturalNumber parse_supernatural(const std::string& text) {
    if (text == "1") return make_supernatural({}, {});
    std::map<Natural, Natural> finite;
    PrimeSet infinite;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, '*')) {
        if (token.empty()) throw UsageError{"empty factor in supernatural number '" + text + "'"};
        std::string base = token, exp;
        if (auto caret = token.find('^'); caret != std::string::npos) {
            base = token.substr(0, caret);
            exp = token.substr(caret + 1);
        }
        Natural p = parse_prime_arg(base, "supernatural factor");
        if (exp == "inf") {
            infinite.insert(p);
        } else if (exp.empty()) {
            finite[p] += 1;
        } else {
            Natural e = parse_natural_arg(exp, "supernatural exponent");
            if (e == 0) throw UsageError{"exponents in a supernatural number must be positive"};
            finite[p] += e;
        }
    }
    return make_supernatural(std::move(finite), std::move(infinite));
}

struct Caps {
    Natural enumeration = kDefaultEnumerationCap;
    Natural prime_search = kDefaultPrimeSearchCap;
};

struct Report {
    json envelope;
    bool checks_passed = true;
};

void append_check(std::vector<OracleCheck>& checks, std::string name, bool pass) {
    checks.push_back({std::move(name), pass});
}

bool all_pass(const std::vector<OracleCheck>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

// ---------------------------------------------------------------------------
// subcommand bodies

Report run_orders(const Natural& p, const Natural& m, int lmax, const Caps& caps) {
    OrderProfile prof = profile(p, m);
    json table = json::array();
    std::vector<OracleCheck> checks;
    int verified_up_to = 0;
    bool agree = true;
    for (int l = 1; l <= lmax; ++l) {
        Natural closed = order_at(prof, l);
        json row;
        row["l"] = l;
        row["order"] = closed.str();
        Natural modulus = pow_natural(p, static_cast<unsigned>(l));
        if (modulus <= caps.enumeration) {
            Natural brute = order_bruteforce(m, modulus);
            row["bruteforce"] = brute.str();
            if (brute != closed) agree = false;
            verified_up_to = l;
        }
        table.push_back(row);
    }
    append_check(checks, "closed-form orders match brute force up to level " +
                             std::to_string(verified_up_to),
                 agree);
    json result;
    result["profile"] = to_json(prof);
    result["orders"] = table;
    json inputs{{"p", p.str()}, {"m", m.str()}, {"lmax", lmax}};
    return {make_envelope("orders", inputs, result, checks), all_pass(checks)};
}

Report run_profile(const Natural& p, const Natural& m) {
    OrderProfile prof = profile(p, m);
    std::vector<OracleCheck> checks;
    // Construction already scanned the brute-force orders and would have
    // failed on disagreement.
    append_check(checks, "stabilization scan agrees with the closed form", true);
    json inputs{{"p", p.str()}, {"m", m.str()}};
    return {make_envelope("profile", inputs, to_json(prof), checks), true};
}

Report run_stabilize(const PrimeSet& F, const Natural& q, const Caps& caps) {
    StabilizationData data = stabilization_data(F, q);
    std::vector<OracleCheck> checks;
    for (int l = 0; l <= 2; ++l) {
        Natural expected = data.d;
        for (const Natural& p : F) expected *= pow_natural(p, static_cast<unsigned>(l));
        Natural got = multi_order(F, q, data.K + MultiIndex::uniform(F, l));
        append_check(checks, "order law at uniform offset " + std::to_string(l),
                     got == expected);
    }
    Natural modulus = 1;
    for (const Natural& p : F) modulus *= pow_natural(p, static_cast<unsigned>(data.K.at(p)));
    if (modulus <= caps.enumeration) {
        append_check(checks, "brute-force order at level K equals d",
                     order_bruteforce(q, modulus) == data.d);
    }
    json inputs{{"primes", to_json(F)}, {"q", q.str()}};
    return {make_envelope("stabilize", inputs, to_json(data), checks), all_pass(checks)};
}

Report run_index(const PrimeSet& F, const Natural& q, const Caps& caps) {
    Natural index = index_closure(F, q);
    StabilizationData data = stabilization_data(F, q);
    std::vector<OracleCheck> checks;
    BruteForcedIndex brute = subquotient_summands(F, {q}, caps.enumeration);
    append_check(checks,
                 "stabilized brute-force index at level " + std::to_string(brute.stabilized_level),
                 brute.value == index);
    json result;
    result["index"] = index.str();
    result["K"] = to_json(data.K);
    result["d"] = data.d.str();
    json inputs{{"primes", to_json(F)}, {"q", q.str()}};
    return {make_envelope("index", inputs, result, checks), all_pass(checks)};
}

Report run_summands(const PrimeSet& space, const PrimeSet& action, const Caps& caps) {
    BruteForcedIndex brute = subquotient_summands(space, action, caps.enumeration);
    std::vector<OracleCheck> checks;
    if (action.size() == 1) {
        append_check(checks, "closed-form index formula",
                     index_closure(space, *action.begin()) == brute.value);
    } else if (action.size() == 2 && space.size() == 1 && *space.begin() != 2) {
        auto it = action.begin();
        Natural q = *it++;
        Natural r = *it;
        append_check(checks, "two-generator index formula",
                     two_generator_index(*space.begin(), q, r) == brute.value);
    }
    json result;
    result["count"] = brute.value.str();
    result["stabilized_level"] = brute.stabilized_level;
    result["stabilization"] = "heuristic";
    json inputs{{"space", to_json(space)}, {"action", to_json(action)}};
    return {make_envelope("summands", inputs, result, checks), all_pass(checks)};
}

Report run_ktheory(const Natural& p, const Natural& q, const Natural& r, const Caps& caps) {
    TwoPrimeKTheory kt = two_prime_k_theory(p, q, r, caps.enumeration);
    std::vector<OracleCheck> checks;
    BruteForcedIndex brute = subquotient_summands({p}, {q, r}, caps.enumeration);
    append_check(checks,
                 "stabilized brute-force count at level " + std::to_string(brute.stabilized_level),
                 brute.value == kt.count);
    json result;
    result["count"] = kt.count.str();
    result["K0"] = to_json(kt.k0);
    result["K1"] = to_json(kt.k1);
    result["I_q"] = kt.i_q.str();
    result["I_r"] = kt.i_r.str();
    json inputs{{"p", p.str()}, {"q", q.str()}, {"r", r.str()}};
    return {make_envelope("ktheory", inputs, result, checks), all_pass(checks)};
}

Report run_snf(const json& matrix_json) {
    IntMatrix a = matrix_from_json(matrix_json);
    SNFDecomposition snf = smith_normal_form(a);
    std::vector<OracleCheck> checks;
    append_check(checks, "A = P B Q exactly", multiply(multiply(snf.P, snf.B), snf.Q) == a);
    append_check(checks, "|det P| = 1", abs(determinant(snf.P)) == 1);
    append_check(checks, "|det Q| = 1", abs(determinant(snf.Q)) == 1);
    bool chain = true;
    int diag = std::min(a.rows, a.cols);
    for (int i = 0; i + 1 < diag; ++i) {
        const Int& d0 = snf.B.at(i, i);
        const Int& d1 = snf.B.at(i + 1, i + 1);
        if (d1 != 0 && d0 == 0) chain = false;
        if (d0 != 0 && d1 % d0 != 0) chain = false;
    }
    append_check(checks, "divisibility chain on the diagonal", chain);

    json result;
    result["B"] = to_json(snf.B);
    result["P"] = to_json(snf.P);
    result["Q"] = to_json(snf.Q);
    if (a.rows == a.cols) {
        Int det = determinant(a);
        Int prod = 1;
        for (int i = 0; i < diag; ++i) prod *= snf.B.at(i, i);
        append_check(checks, "product of diagonal equals |det A|", prod == abs(det));
        if (det != 0) {
            TorusBundleDescriptor desc = crossed_product_descriptor(a);
            result["descriptor"] = to_json(desc);
            json orders = json::array();
            for (const Natural& b : quotient_decomposition(a)) orders.push_back(b.str());
            result["quotient_cyclic_orders"] = orders;
        } else {
            result["descriptor"] = nullptr;
            result["note"] = "singular matrix: infinite quotient, no torus-bundle descriptor";
        }
    }
    json inputs{{"matrix", matrix_json}};
    return {make_envelope("snf", inputs, result, checks), all_pass(checks)};
}

Report run_odometer(const PrimeSet& F, const Natural& q, int levels,
                    const std::optional<Natural>& r, int trace_limit, const Caps& caps) {
    InverseSystemSpec sys = make_inverse_system(F, q, levels);
    OdometerSpec spec = d_sequence(sys);
    std::vector<OracleCheck> checks;

    json result;
    result["K"] = to_json(sys.K);
    result["digit_sizes"] = to_json(spec.digit_sizes);
    json moduli = json::array();
    for (int l = 0; l <= levels; ++l) moduli.push_back(sys.modulus_at(l).str());
    result["moduli"] = moduli;

    // Exhaustive equivariance and injectivity of the coding map, walking the
    // full successor cycle level by level while the state count stays under
    // the enumeration cap.
    int verified_level = -1;
    for (int l = 0; l <= levels; ++l) {
        OdometerSpec level_spec{std::vector<Natural>(spec.digit_sizes.begin(),
                                                     spec.digit_sizes.begin() + l + 1)};
        Natural count = 1;
        for (const Natural& d : level_spec.digit_sizes) count *= d;
        if (count > caps.enumeration) break;
        Natural modulus = sys.modulus_at(l);
        OdometerState state{std::vector<Natural>(level_spec.digit_sizes.size(), 0)};
        Natural first_h = h_map(sys, state, l);
        Natural prev_h = first_h;
        std::set<Natural> images{first_h};
        bool equivariant = true;
        for (Natural i = 1; i < count; ++i) {
            state = odometer_succ(state, level_spec);
            Natural h = h_map(sys, state, l);
            if (h != prev_h * sys.q % modulus) equivariant = false;
            images.insert(h);
            prev_h = h;
        }
        state = odometer_succ(state, level_spec);
        bool wraps = state.digits == std::vector<Natural>(level_spec.digit_sizes.size(), 0);
        if (first_h != prev_h * sys.q % modulus) equivariant = false;
        append_check(checks, "coding map equivariant on all states at level " + std::to_string(l),
                     equivariant && wraps);
        append_check(checks, "coding map injective at level " + std::to_string(l),
                     Natural(images.size()) == count && count == sys.order_at_level(l));
        verified_level = l;
    }
    if (verified_level < 0)
        fail(errc::needs_higher_cap, "even the level-0 state space exceeds the enumeration cap");
    result["verified_levels"] = verified_level;

    // Orbit trace at the deepest verified level.
    json trace = json::array();
    OdometerSpec verified_spec{std::vector<Natural>(
        spec.digit_sizes.begin(), spec.digit_sizes.begin() + verified_level + 1)};
    {
        OdometerState state{std::vector<Natural>(verified_spec.digit_sizes.size(), 0)};
        Natural count = 1;
        for (const Natural& d : verified_spec.digit_sizes) count *= d;
        Natural steps = std::min(Natural(trace_limit), count);
        for (Natural i = 0; i < steps; ++i) {
            json row;
            row["state"] = to_json(state.digits);
            row["h"] = h_map(sys, state, verified_level).str();
            trace.push_back(row);
            state = odometer_succ(state, verified_spec);
        }
    }
    result["trace"] = trace;

    if (r) {
        // Transported multiplication by r must commute with the successor.
        // The action rebuilds its lookup table per call, so this sweep runs
        // at the deepest level whose state count keeps that quadratic cost
        // desk-scale.
        int action_level = 0;
        Natural count = spec.digit_sizes[0];
        for (int l = 1; l <= verified_level; ++l) {
            Natural extended = count * spec.digit_sizes[static_cast<std::size_t>(l)];
            if (extended > 4096) break;
            count = extended;
            action_level = l;
        }
        OdometerSpec action_spec{std::vector<Natural>(
            spec.digit_sizes.begin(), spec.digit_sizes.begin() + action_level + 1)};
        bool commutes = true;
        OdometerState state{std::vector<Natural>(action_spec.digit_sizes.size(), 0)};
        for (Natural i = 0; i < count; ++i) {
            OdometerState a = second_generator_action(
                sys, *r, odometer_succ(state, action_spec), action_level, caps.enumeration);
            OdometerState b = odometer_succ(
                second_generator_action(sys, *r, state, action_level, caps.enumeration),
                action_spec);
            if (a.digits != b.digits) commutes = false;
            state = odometer_succ(state, action_spec);
        }
        append_check(checks,
                     "second generator commutes with the successor at level " +
                         std::to_string(action_level),
                     commutes);
        json second;
        second["r"] = r->str();
        second["level"] = action_level;
        second["commutes"] = commutes;
        result["second_generator"] = second;
    }

    json inputs{{"primes", to_json(F)}, {"q", q.str()}, {"levels", levels}};
    if (r) inputs["r"] = r->str();
    return {make_envelope("odometer", inputs, result, checks), all_pass(checks)};
}

Report run_bdk(const SupernaturalNumber& n, const std::optional<std::pair<Int, Natural>>& query,
               const std::optional<std::pair<std::vector<Natural>, int>>& cylinder) {
    BdKTheoryDescriptor desc = bd_k_theory(n);
    json result;
    result["k_theory"] = to_json(desc);
    if (query) {
        bool contains = z_inv_contains(n, query->first, query->second);
        json q;
        q["num"] = query->first.str();
        q["den"] = query->second.str();
        q["contains"] = contains;
        result["membership"] = q;
    }
    if (cylinder) {
        OdometerSpec spec{cylinder->first};
        json c;
        c["digit_sizes"] = to_json(cylinder->first);
        c["k"] = cylinder->second;
        c["class"] = to_json(cylinder_class(spec, cylinder->second));
        result["cylinder"] = c;
    }
    json inputs;
    inputs["n"] = to_json(n);
    return {make_envelope("bdk", inputs, result, {}), true};
}

Report run_lattice(int n, int k, int trials, std::uint32_t seed, int ground,
                   const std::optional<std::vector<std::uint16_t>>& explicit_sets) {
    std::vector<OracleCheck> checks;
    json result;
    if (explicit_sets) {
        LatticeCheckResult check = lattice_identity_check(*explicit_sets, k);
        result["lhs"] = check.lhs;
        result["rhs"] = check.rhs;
        result["equal"] = check.equal;
        append_check(checks, "lattice identity on the given sets", check.equal);
        json inputs{{"k", k},
                    {"sets", json(*explicit_sets)}};
        return {make_envelope("lattice", inputs, result, checks), all_pass(checks)};
    }

    // Raw engine bits keep the stream identical across platforms.
    std::mt19937 rng(seed);
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        int nn = n > 0 ? n : 2 + static_cast<int>(rng() % 5u);
        int kk = k > 0 ? k : 1 + static_cast<int>(rng() % static_cast<std::uint32_t>(nn));
        std::vector<std::uint16_t> sets;
        for (int i = 0; i < nn; ++i)
            sets.push_back(static_cast<std::uint16_t>(rng() & ((1u << ground) - 1)));
        if (!lattice_identity_check(sets, kk).equal) ++failures;
    }
    result["trials"] = trials;
    result["failures"] = failures;
    append_check(checks, "lattice identity holds on every randomized instance", failures == 0);
    json inputs{{"n", n}, {"k", k}, {"trials", trials}, {"seed", seed}, {"ground", ground}};
    return {make_envelope("lattice", inputs, result, checks), all_pass(checks)};
}

Report run_series(const PrimeSet& F, const Caps& caps) {
    CompositionSeriesReport report = composition_series(F, caps.enumeration);
    std::vector<OracleCheck> checks;
    // Layer k must have C(|F|, k) summand records.
    bool sizes_ok = true;
    const int n = static_cast<int>(F.size());
    for (std::size_t k = 0; k < report.layers.size(); ++k) {
        long long expect = 1;
        for (std::size_t i = 0; i < k + 1; ++i)
            expect = expect * (n - static_cast<long long>(i)) / (static_cast<long long>(i) + 1);
        if (static_cast<long long>(report.layers[k].size()) != expect) sizes_ok = false;
    }
    append_check(checks, "layer sizes are binomial coefficients", sizes_ok);
    // Assembly cross-checks every closed-form count against brute force and
    // would have failed on any disagreement.
    append_check(checks, "summand counts match stabilized brute force", true);
    json inputs{{"primes", to_json(F)}};
    return {make_envelope("series", inputs, to_json(report), checks), all_pass(checks)};
}

Report run_bostconnes(const PrimeSet& complement, int level, const Caps& caps) {
    BostConnesTruncationReport report =
        bost_connes_truncation(complement, level, caps.prime_search, caps.enumeration);
    std::vector<OracleCheck> checks;
    Natural modulus = 1;
    for (const Natural& p : complement) modulus *= pow_natural(p, static_cast<unsigned>(level));
    bool primes_ok = report.dirichlet_primes.size() == report.generators.size();
    for (std::size_t i = 0; i < report.dirichlet_primes.size(); ++i) {
        const Natural& q = report.dirichlet_primes[i];
        if (!is_prime(q) || q % modulus != report.generators[i] % modulus ||
            complement.count(q))
            primes_ok = false;
    }
    append_check(checks, "Dirichlet primes verify primality and congruence", primes_ok);
    append_check(checks, "growth ratio is below the displayed bound",
                 report.growth_ratio <= report.paper_bound);
    json inputs{{"complement", to_json(complement)}, {"level", level}};
    return {make_envelope("bostconnes", inputs, to_json(report), checks), all_pass(checks)};
}

// ---------------------------------------------------------------------------

int emit(const Report& report, const std::string& format) {
    if (format == "text") {
        std::string out;
        render_text(report.envelope, out);
        std::cout << out;
    } else {
        std::cout << report.envelope.dump(2) << "\n";
    }
    return report.checks_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic invariants of finite-prime unit-group dynamics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "json";
    app.add_option("--format", format, "output format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    std::string enum_cap_text;
    app.add_option("--enum-cap", enum_cap_text,
                   "enumeration cap on exhaustive oracles (default 10^7; "
                   "BCINV_ENUM_CAP overrides the default)");

    // orders
    auto* orders = app.add_subcommand("orders", "order table o_{p^l}(m) with brute-force checks");
    std::string orders_p, orders_m;
    int orders_lmax = 8;
    orders->add_option("--p", orders_p, "prime p")->required();
    orders->add_option("--m", orders_m, "base m")->required();
    orders->add_option("--lmax", orders_lmax, "largest level to tabulate")
        ->check(CLI::Range(1, 4096));

    // profile
    auto* prof_cmd = app.add_subcommand("profile", "order profile of m at the prime p");
    std::string prof_p, prof_m;
    prof_cmd->add_option("--p", prof_p, "prime p")->required();
    prof_cmd->add_option("--m", prof_m, "base m")->required();

    // stabilize
    auto* stab = app.add_subcommand("stabilize", "stabilization data (K, d, z) over a prime set");
    std::string stab_primes, stab_q;
    stab->add_option("--primes", stab_primes, "comma-separated prime set F")->required();
    stab->add_option("--q", stab_q, "acting prime q not in F")->required();

    // index
    auto* index_cmd = app.add_subcommand("index", "index of the closure of q^Z in the units over F");
    std::string index_primes, index_q;
    index_cmd->add_option("--primes", index_primes, "comma-separated prime set F")->required();
    index_cmd->add_option("--q", index_q, "acting prime q not in F")->required();

    // summands
    auto* summands_cmd = app.add_subcommand("summands", "stabilized brute-force summand count");
    std::string summands_space, summands_action;
    summands_cmd->add_option("--space", summands_space, "primes of the unit space")->required();
    summands_cmd->add_option("--action", summands_action, "acting primes")->required();

    // ktheory
    auto* ktheory_cmd = app.add_subcommand("ktheory", "two-generator summand count and K-theory");
    std::string kt_p, kt_q, kt_r;
    ktheory_cmd->add_option("--p", kt_p, "odd space prime")->required();
    ktheory_cmd->add_option("--q", kt_q, "first acting prime")->required();
    ktheory_cmd->add_option("--r", kt_r, "second acting prime")->required();

    // snf
    auto* snf_cmd = app.add_subcommand("snf", "Smith normal form of an integer matrix");
    std::string snf_matrix, snf_input;
    snf_cmd->add_option("--matrix", snf_matrix, "matrix as a JSON array of rows");
    snf_cmd->add_option("--input", snf_input, "file containing the matrix JSON");

    // odometer
    auto* odo = app.add_subcommand("odometer", "digit sequence, orbit trace and equivariance checks");
    std::string odo_primes, odo_q, odo_r;
    int odo_levels = 6, odo_trace = 24;
    odo->add_option("--primes", odo_primes, "prime set F of the unit space")->required();
    odo->add_option("--q", odo_q, "acting prime q")->required();
    odo->add_option("--levels", odo_levels, "truncation level")->check(CLI::Range(0, 64));
    odo->add_option("--r", odo_r, "second acting prime (transported action)");
    odo->add_option("--trace", odo_trace, "orbit steps to list")->check(CLI::Range(0, 100000));

    // bdk
    auto* bdk_cmd = app.add_subcommand("bdk", "Bunce-Deddens K-theory and Z[n^-1] membership");
    std::string bdk_sn = "1", bdk_num, bdk_den, bdk_sizes;
    int bdk_k = -1;
    bdk_cmd->add_option("--sn", bdk_sn, "supernatural number, e.g. 2*3^inf");
    bdk_cmd->add_option("--num", bdk_num, "query numerator (integer)");
    bdk_cmd->add_option("--den", bdk_den, "query denominator (positive)");
    bdk_cmd->add_option("--sizes", bdk_sizes, "cylinder digit sizes, e.g. 2,3,3");
    bdk_cmd->add_option("--k", bdk_k, "cylinder length k (class of a length-(k+1) cylinder)");

    // lattice
    auto* lattice_cmd = app.add_subcommand("lattice", "ideal-lattice identity in the open-set model");
    int lat_n = 0, lat_k = 0, lat_trials = 500, lat_ground = 12;
    std::uint32_t lat_seed = 7001;
    std::string lat_sets;
    lattice_cmd->add_option("--n", lat_n, "number of open sets (0 = random in 2..6)")
        ->check(CLI::Range(0, 6));
    lattice_cmd->add_option("--k", lat_k, "intersection depth k (0 = random)")
        ->check(CLI::Range(0, 6));
    lattice_cmd->add_option("--trials", lat_trials, "randomized trials")->check(CLI::Range(1, 1000000));
    lattice_cmd->add_option("--seed", lat_seed, "random seed");
    lattice_cmd->add_option("--ground", lat_ground, "ground-set size")->check(CLI::Range(1, 12));
    lattice_cmd->add_option("--sets", lat_sets, "explicit bitmask sets, e.g. 5,9,12 (overrides trials)");

    // series
    auto* series_cmd = app.add_subcommand("series", "composition-series report over a prime set");
    std::string series_primes;
    series_cmd->add_option("--primes", series_primes, "comma-separated prime set F")->required();

    // bostconnes
    auto* bc = app.add_subcommand("bostconnes", "finite-level truncation report with Dirichlet generators");
    std::string bc_complement, bc_search_cap;
    int bc_level = 1;
    bc->add_option("--complement", bc_complement, "finite complement prime set")->required();
    bc->add_option("--level", bc_level, "truncation level n")->check(CLI::Range(1, 64));
    bc->add_option("--search-cap", bc_search_cap, "candidates scanned per arithmetic progression");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Caps caps;
        if (!enum_cap_text.empty()) {
            caps.enumeration = parse_natural_arg(enum_cap_text, "--enum-cap");
        } else if (const char* env = std::getenv("BCINV_ENUM_CAP")) {
            caps.enumeration = parse_natural_arg(env, "BCINV_ENUM_CAP");
        }
        if (caps.enumeration < 2) throw UsageError{"enumeration cap must be at least 2"};

        Report report;
        if (app.got_subcommand(orders)) {
            report = run_orders(parse_prime_arg(orders_p, "--p"),
                                parse_natural_arg(orders_m, "--m"), orders_lmax, caps);
        } else if (app.got_subcommand(prof_cmd)) {
            report = run_profile(parse_prime_arg(prof_p, "--p"), parse_natural_arg(prof_m, "--m"));
        } else if (app.got_subcommand(stab)) {
            report = run_stabilize(parse_prime_set(stab_primes, "--primes"),
                                   parse_prime_arg(stab_q, "--q"), caps);
        } else if (app.got_subcommand(index_cmd)) {
            report = run_index(parse_prime_set(index_primes, "--primes"),
                               parse_prime_arg(index_q, "--q"), caps);
        } else if (app.got_subcommand(summands_cmd)) {
            report = run_summands(parse_prime_set(summands_space, "--space"),
                                  parse_prime_set(summands_action, "--action"), caps);
        } else if (app.got_subcommand(ktheory_cmd)) {
            report = run_ktheory(parse_prime_arg(kt_p, "--p"), parse_prime_arg(kt_q, "--q"),
                                 parse_prime_arg(kt_r, "--r"), caps);
        } else if (app.got_subcommand(snf_cmd)) {
            if (snf_matrix.empty() == snf_input.empty())
                throw UsageError{"snf needs exactly one of --matrix or --input"};
            std::string text = snf_matrix;
            if (!snf_input.empty()) {
                std::ifstream in(snf_input);
                if (!in) throw UsageError{"cannot read " + snf_input};
                std::stringstream buffer;
                buffer << in.rdbuf();
                text = buffer.str();
                if (text.empty()) throw UsageError{"empty matrix file " + snf_input};
            }
            json parsed = json::parse(text, nullptr, false);
            if (parsed.is_discarded()) throw UsageError{"matrix is not valid JSON"};
            report = run_snf(parsed);
        } else if (app.got_subcommand(odo)) {
            std::optional<Natural> r;
            if (!odo_r.empty()) r = parse_prime_arg(odo_r, "--r");
            report = run_odometer(parse_prime_set(odo_primes, "--primes"),
                                  parse_prime_arg(odo_q, "--q"), odo_levels, r, odo_trace, caps);
        } else if (app.got_subcommand(bdk_cmd)) {
            SupernaturalNumber n = parse_supernatural(bdk_sn);
            std::optional<std::pair<Int, Natural>> query;
            if (bdk_num.empty() != bdk_den.empty())
                throw UsageError{"membership queries need both --num and --den"};
            if (!bdk_num.empty()) {
                std::string digits = bdk_num;
                bool negative = !digits.empty() && digits[0] == '-';
                if (negative) digits = digits.substr(1);
                Int num = Int(parse_natural_arg(digits, "--num"));
                if (negative) num = -num;
                query = {num, parse_natural_arg(bdk_den, "--den")};
            }
            std::optional<std::pair<std::vector<Natural>, int>> cylinder;
            if (bdk_sizes.empty() != (bdk_k < 0))
                throw UsageError{"cylinder queries need both --sizes and --k"};
            if (!bdk_sizes.empty())
                cylinder = {parse_natural_list(bdk_sizes, "--sizes"), bdk_k};
            report = run_bdk(n, query, cylinder);
        } else if (app.got_subcommand(lattice_cmd)) {
            std::optional<std::vector<std::uint16_t>> explicit_sets;
            if (!lat_sets.empty()) {
                std::vector<std::uint16_t> sets;
                for (const Natural& v : parse_natural_list(lat_sets, "--sets")) {
                    if (v >= 4096) throw UsageError{"set masks must fit a 12-point ground set"};
                    sets.push_back(static_cast<std::uint16_t>(to_index(v)));
                }
                if (lat_k < 1) throw UsageError{"--sets requires an explicit --k"};
                explicit_sets = std::move(sets);
            }
            report = run_lattice(lat_n, lat_k, lat_trials, lat_seed, lat_ground, explicit_sets);
        } else if (app.got_subcommand(series_cmd)) {
            report = run_series(parse_prime_set(series_primes, "--primes"), caps);
        } else if (app.got_subcommand(bc)) {
            if (!bc_search_cap.empty())
                caps.prime_search = parse_natural_arg(bc_search_cap, "--search-cap");
            report = run_bostconnes(parse_prime_set(bc_complement, "--complement"), bc_level, caps);
        } else {
            throw UsageError{"no subcommand selected"};
        }
        return emit(report, format);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.message << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cout << make_error(e.code(), e.what()).dump(2) << "\n";
        return 1;
    } catch (const std::logic_error& e) {
        std::cout << make_error("internal-error", e.what()).dump(2) << "\n";
        return 1;
    }
}
