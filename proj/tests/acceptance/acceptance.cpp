// Acceptance suite: runs every criterion end to end with exact arithmetic
// and prints one PASS/FAIL line per criterion.  Exit code is the number of
// failed criteria.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bcinv/arith.hpp"
#include "bcinv/natural.hpp"
#include "bcinv/odometer.hpp"
#include "bcinv/order_profiles.hpp"
#include "bcinv/snf.hpp"
#include "bcinv/structure.hpp"
#include "bcinv/units.hpp"

#ifndef ACCEPTANCE_CLI_PATH
#define ACCEPTANCE_CLI_PATH "bcinv"
#endif
#ifndef ACCEPTANCE_GOLDEN_PATH
#define ACCEPTANCE_GOLDEN_PATH "series_2_3.golden.json"
#endif

namespace {

using namespace bcinv;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Criterion 1: closed-form order laws vs the brute-force oracle, for all
// primes p <= 50, units m <= 100 and every level with p^l <= 10^7.
// The oracle is a power ladder: successive multiplication mod p^lmax,
// resolving each level l at the first exponent k (a multiple of the
// already-resolved order below) with m^k = 1 mod p^l.

struct LadderResult {
    long long checks = 0;
    std::vector<std::string> mismatches;
};

void sweep_one(const Natural& p, const Natural& m, const Natural& cap, LadderResult& out) {
    int lmax = 0;
    Natural modulus = 1;
    while (modulus * p <= cap) {
        modulus *= p;
        ++lmax;
    }

    OrderProfile prof = profile(p, m);
    std::vector<Natural> orders(static_cast<std::size_t>(lmax) + 1, 0);

    Natural x = m % modulus;
    Natural power = 1;
    unsigned long long k = 0, t = 1;
    int level = 1;
    Natural plevel = p;
    // power stays merely congruent to m^k mod p^lmax between reductions;
    // the checkpoint test mod p^level is unaffected because p^level divides
    // the working modulus.
    while (level <= lmax) {
        if (k > 0 && k % t == 0 && power % plevel == 1) {
            orders[static_cast<std::size_t>(level)] = k;
            t = k;
            ++level;
            plevel *= p;
            continue;
        }
        power *= x;
        ++k;
        if (k % 2 == 0) power %= modulus;
    }

    for (int l = 1; l <= lmax; ++l) {
        ++out.checks;
        if (order_at(prof, l) != orders[static_cast<std::size_t>(l)]) {
            std::ostringstream msg;
            msg << "p=" << p << " m=" << m << " l=" << l << ": closed form " << order_at(prof, l)
                << " vs brute force " << orders[static_cast<std::size_t>(l)];
            out.mismatches.push_back(msg.str());
        }
    }
}

std::string criterion_order_laws() {
    const Natural cap = 10000000;
    std::vector<std::pair<Natural, Natural>> jobs;
    for (Natural p = 2; p <= 50; ++p) {
        if (!is_prime(p)) continue;
        for (Natural m = 1; m <= 100; ++m) {
            if (m % p == 0) continue;
            jobs.emplace_back(p, m);
        }
    }
    // Heaviest moduli first so the shared queue stays balanced.
    std::stable_sort(jobs.begin(), jobs.end(), [&](const auto& a, const auto& b) {
        Natural ma = 1, mb = 1;
        while (ma * a.first <= cap) ma *= a.first;
        while (mb * b.first <= cap) mb *= b.first;
        return ma > mb;
    });

    auto start = Clock::now();
    unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::vector<LadderResult> results(workers);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w)
        threads.emplace_back([&, w]() {
            for (;;) {
                std::size_t idx = next.fetch_add(1);
                if (idx >= jobs.size()) break;
                sweep_one(jobs[idx].first, jobs[idx].second, cap, results[w]);
            }
        });
    for (auto& th : threads) th.join();
    double elapsed = seconds_since(start);

    long long checks = 0;
    std::vector<std::string> mismatches;
    for (const auto& r : results) {
        checks += r.checks;
        mismatches.insert(mismatches.end(), r.mismatches.begin(), r.mismatches.end());
    }

    std::ostringstream detail;
    detail << checks << " (p,m,l) comparisons in " << std::fixed << std::setprecision(1)
           << elapsed << " s";
    if (!mismatches.empty()) return "disagreement: " + mismatches.front();
    if (elapsed >= 60.0) return "runtime " + detail.str() + " exceeds the 60 s budget";
    return "OK " + detail.str();
}

// ---------------------------------------------------------------------------

struct GridCase {
    PrimeSet F;
    Natural q;
};

std::vector<GridCase> stabilization_grid() {
    std::vector<PrimeSet> families{{3}, {5}, {3, 5}, {2, 3}, {3, 5, 7}};
    std::vector<GridCase> grid;
    for (const auto& F : families)
        for (Natural q : {2, 3, 7, 11})
            if (!F.count(q)) grid.push_back({F, q});
    return grid;
}

std::vector<MultiIndex> offset_cube(const PrimeSet& F) {
    std::vector<MultiIndex> offsets{MultiIndex()};
    for (const Natural& p : F) {
        std::vector<MultiIndex> extended;
        for (const MultiIndex& base : offsets)
            for (int v = 0; v <= 2; ++v) {
                MultiIndex next = base;
                next.entries[p] = v;
                extended.push_back(next);
            }
        offsets = std::move(extended);
    }
    return offsets;
}

std::string criterion_stabilization_law() {
    const Natural cap = 10000000;
    long long checks = 0;
    for (const GridCase& c : stabilization_grid()) {
        StabilizationData data = stabilization_data(c.F, c.q);
        for (const MultiIndex& l : offset_cube(c.F)) {
            Natural expected = data.d;
            for (const Natural& p : c.F)
                expected *= pow_natural(p, static_cast<unsigned>(l.at(p)));
            MultiIndex level = data.K + l;
            if (multi_order(c.F, c.q, level) != expected) {
                std::ostringstream msg;
                msg << "law fails at q=" << c.q << " |F|=" << c.F.size();
                return msg.str();
            }
            Natural modulus = 1;
            for (const Natural& p : c.F)
                modulus *= pow_natural(p, static_cast<unsigned>(level.at(p)));
            if (modulus <= cap && order_bruteforce(c.q, modulus) != expected)
                return "brute-force disagreement at modulus " + modulus.str();
            ++checks;
        }
    }
    return "OK " + std::to_string(checks) + " multi-index points, all exact";
}

std::string criterion_index_formula() {
    struct Known {
        PrimeSet F;
        Natural q;
        Natural expected;
    };
    for (const Known& k :
         std::vector<Known>{{{3}, 2, 1}, {{7}, 2, 2}, {{2}, 3, 2}}) {
        if (index_closure(k.F, k.q) != k.expected)
            return "closed-form index wrong for q=" + k.q.str();
    }
    long long checks = 0;
    for (const GridCase& c : stabilization_grid()) {
        Natural formula = index_closure(c.F, c.q);
        BruteForcedIndex brute = subquotient_summands(c.F, {c.q});
        if (formula != brute.value) {
            std::ostringstream msg;
            msg << "formula " << formula << " vs brute " << brute.value << " for q=" << c.q;
            return msg.str();
        }
        ++checks;
    }
    return "OK " + std::to_string(checks) + " grid cases plus 3 pinned values";
}

std::string criterion_two_generator_index() {
    struct Known {
        Natural p, q, r, expected;
    };
    for (const Known& k : std::vector<Known>{{5, 2, 3, 1}, {7, 2, 3, 1}, {31, 2, 5, 2}}) {
        Natural formula = two_generator_index(k.p, k.q, k.r);
        if (formula != k.expected) return "formula value wrong at p=" + k.p.str();
        BruteForcedIndex brute = subquotient_summands({k.p}, {k.q, k.r});
        if (brute.value != k.expected)
            return "brute-force index disagrees at p=" + k.p.str();
    }
    return "OK 3 cases, formula = stabilized brute force";
}

std::string criterion_equivariance() {
    auto start = Clock::now();
    std::vector<GridCase> systems;
    std::vector<PrimeSet> families{{3}, {5}, {7}, {3, 5}, {3, 7}, {5, 7}};
    for (const auto& F : families)
        for (Natural q : {2, 3, 7})
            if (!F.count(q)) systems.push_back({F, q});

    long long states_checked = 0;
    for (const GridCase& c : systems) {
        InverseSystemSpec sys = make_inverse_system(c.F, c.q, 3);
        OdometerSpec spec = d_sequence(sys);
        for (int level = 0; level <= 3; ++level) {
            OdometerSpec truncated{std::vector<Natural>(spec.digit_sizes.begin(),
                                                        spec.digit_sizes.begin() + level + 1)};
            Natural count = 1;
            for (const Natural& d : truncated.digit_sizes) count *= d;
            Natural modulus = sys.modulus_at(level);

            OdometerState state{std::vector<Natural>(truncated.digit_sizes.size(), 0)};
            Natural first = h_map(sys, state, level);
            Natural previous = first;
            std::vector<Natural> images{first};
            for (Natural i = 1; i < count; ++i) {
                state = odometer_succ(state, truncated);
                Natural image = h_map(sys, state, level);
                if (image != previous * c.q % modulus) {
                    std::ostringstream msg;
                    msg << "equivariance fails at q=" << c.q << " level " << level;
                    return msg.str();
                }
                images.push_back(image);
                previous = image;
                ++states_checked;
            }
            if (first != previous * c.q % modulus) return "cycle does not close up";
            std::sort(images.begin(), images.end());
            if (std::adjacent_find(images.begin(), images.end()) != images.end())
                return "coding map is not injective at level " + std::to_string(level);
            if (Natural(images.size()) != count || count != sys.order_at_level(level))
                return "image size differs from the digit product";
        }
    }
    double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "OK " << states_checked << " states across " << systems.size() << " systems in "
           << std::fixed << std::setprecision(1) << elapsed << " s";
    if (elapsed >= 10.0) return "runtime exceeds the 10 s budget";
    return detail.str();
}

std::string criterion_supernatural() {
    for (const GridCase& c : stabilization_grid()) {
        StabilizationData data = stabilization_data(c.F, c.q);
        InverseSystemSpec sys = make_inverse_system(c.F, c.q, 4);
        SupernaturalNumber expected =
            with_infinite_primes(supernatural_from_natural(data.d), c.F);
        if (!sn_equal(supernatural_of_spec(d_sequence(sys), c.F), expected))
            return "supernatural mismatch at q=" + c.q.str();
    }
    SupernaturalNumber known = supernatural_of_spec(
        d_sequence(make_inverse_system(PrimeSet{3}, 2, 4)), PrimeSet{3});
    if (!sn_equal(known, make_supernatural({{2, 1}}, {3}))) return "({3},2) is not 2*3^inf";
    return "OK full grid plus the pinned ({3},2) value";
}

std::string criterion_two_odometers() {
    struct System {
        PrimeSet F;
        Natural q, r;
    };
    long long states = 0;
    for (const System& s : std::vector<System>{{{5}, 2, 3}, {{3}, 2, 5}, {{7}, 3, 2}}) {
        InverseSystemSpec sys = make_inverse_system(s.F, s.q, 3);
        OdometerSpec spec = d_sequence(sys);
        for (int level = 0; level <= 3; ++level) {
            OdometerSpec truncated{std::vector<Natural>(spec.digit_sizes.begin(),
                                                        spec.digit_sizes.begin() + level + 1)};
            Natural count = 1;
            for (const Natural& d : truncated.digit_sizes) count *= d;

            OdometerState state{std::vector<Natural>(truncated.digit_sizes.size(), 0)};
            std::set<std::vector<Natural>> image;
            for (Natural i = 0; i < count; ++i) {
                OdometerState a =
                    second_generator_action(sys, s.r, odometer_succ(state, truncated), level);
                OdometerState b = odometer_succ(
                    second_generator_action(sys, s.r, state, level), truncated);
                if (a.digits != b.digits)
                    return "transported action fails to commute at level " + std::to_string(level);
                image.insert(second_generator_action(sys, s.r, state, level).digits);
                state = odometer_succ(state, truncated);
                ++states;
            }
            if (Natural(image.size()) != count)
                return "transported action is not a bijection at level " + std::to_string(level);
        }
    }
    return "OK " + std::to_string(states) + " states, commuting bijections throughout";
}

std::string criterion_snf() {
    std::mt19937_64 rng(20030917);
    long long done = 0;
    for (int t = 0; t < 1000; ++t) {
        int k = 1 + static_cast<int>(rng() % 6);
        IntMatrix a(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) a.at(i, j) = Int(rng() % 41) - 20;

        SNFDecomposition snf = smith_normal_form(a);
        if (multiply(multiply(snf.P, snf.B), snf.Q) != a) return "reconstruction failed";
        if (abs(determinant(snf.P)) != 1 || abs(determinant(snf.Q)) != 1)
            return "transform matrices are not unimodular";
        Int prod = 1;
        for (int i = 0; i < k; ++i) {
            const Int& d = snf.B.at(i, i);
            if (d < 0) return "negative diagonal entry";
            if (i + 1 < k) {
                const Int& next = snf.B.at(i + 1, i + 1);
                if (d == 0 && next != 0) return "zero precedes a nonzero diagonal entry";
                if (d != 0 && next % d != 0) return "divisibility chain broken";
            }
            prod *= d;
        }
        if (prod != abs(determinant(a))) return "diagonal product differs from |det|";

        if (k <= 4) {
            Natural partial = 1;
            for (int j = 1; j <= k; ++j) {
                partial *= Natural(snf.B.at(j - 1, j - 1));
                // determinantal-divisor oracle: gcd of all j x j minors
                std::vector<int> rows(static_cast<std::size_t>(j)), cols(static_cast<std::size_t>(j));
                std::function<Int(const IntMatrix&)> cof = [&](const IntMatrix& mm) -> Int {
                    if (mm.rows == 1) return mm.at(0, 0);
                    Int det = 0;
                    for (int c = 0; c < mm.cols; ++c) {
                        if (mm.at(0, c) == 0) continue;
                        IntMatrix minor(mm.rows - 1, mm.cols - 1);
                        for (int r = 1; r < mm.rows; ++r) {
                            int cc = 0;
                            for (int c2 = 0; c2 < mm.cols; ++c2)
                                if (c2 != c) minor.at(r - 1, cc++) = mm.at(r, c2);
                        }
                        Int term = mm.at(0, c) * cof(minor);
                        det += (c % 2 == 0) ? term : -term;
                    }
                    return det;
                };
                auto advance = [](std::vector<int>& idx, int n) {
                    int kk = static_cast<int>(idx.size());
                    int pos = kk - 1;
                    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - kk + pos) --pos;
                    if (pos < 0) return false;
                    ++idx[static_cast<std::size_t>(pos)];
                    for (int i = pos + 1; i < kk; ++i)
                        idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
                    return true;
                };
                Natural g = 0;
                for (int i = 0; i < j; ++i) rows[static_cast<std::size_t>(i)] = i;
                do {
                    for (int i = 0; i < j; ++i) cols[static_cast<std::size_t>(i)] = i;
                    do {
                        IntMatrix sub(j, j);
                        for (int r = 0; r < j; ++r)
                            for (int c = 0; c < j; ++c)
                                sub.at(r, c) = a.at(rows[static_cast<std::size_t>(r)],
                                                    cols[static_cast<std::size_t>(c)]);
                        g = gcd(g, abs(cof(sub)));
                    } while (advance(cols, k));
                } while (advance(rows, k));
                if (partial != g) return "determinantal divisor mismatch";
            }
        }
        ++done;
    }
    return "OK " + std::to_string(done) + " random matrices";
}

std::string criterion_lattice() {
    std::mt19937 rng(5150);
    for (int t = 0; t < 500; ++t) {
        int n = 2 + static_cast<int>(rng() % 5u);
        int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        std::vector<std::uint16_t> sets;
        for (int i = 0; i < n; ++i) sets.push_back(static_cast<std::uint16_t>(rng() & 0xFFF));
        if (!lattice_identity_check(sets, k).equal)
            return "identity fails on trial " + std::to_string(t);
    }
    return "OK 500 randomized instances, identity holds everywhere";
}

std::string criterion_bd_membership() {
    SupernaturalNumber n = make_supernatural({{2, 1}}, {3});
    if (!z_inv_contains(n, 1, 6)) return "1/6 should be admitted";
    if (z_inv_contains(n, 1, 12)) return "1/12 should be excluded";
    Rational cyl = cylinder_class(OdometerSpec{{2, 3, 3}}, 2);
    if (!(cyl == Rational(1, 18))) return "cylinder class is not 1/18";
    return "OK membership and cylinder-class values";
}

std::string criterion_bost_connes() {
    for (int n = 1; n <= 3; ++n) {
        BostConnesTruncationReport report = bost_connes_truncation({2, 3}, n);
        Natural modulus = pow_natural(2, static_cast<unsigned>(n)) *
                          pow_natural(3, static_cast<unsigned>(n));
        if (report.dirichlet_primes.size() != report.generators.size())
            return "generator/prime count mismatch at level " + std::to_string(n);
        for (std::size_t i = 0; i < report.dirichlet_primes.size(); ++i) {
            const Natural& q = report.dirichlet_primes[i];
            if (!is_prime(q)) return q.str() + " is not prime";
            if (q % modulus != report.generators[i] % modulus)
                return q.str() + " misses its congruence";
            if (report.complement.count(q)) return q.str() + " lies in the complement";
        }
        if (!(report.growth_ratio <= report.paper_bound))
            return "ratio exceeds the bound at level " + std::to_string(n);
    }
    return "OK levels 1..3 over complement {2,3}";
}

// ---------------------------------------------------------------------------

struct CliRun {
    int exit_code = -1;
    std::string output;
};

CliRun run_cli(const std::string& args) {
    std::string command = std::string(ACCEPTANCE_CLI_PATH) + " " + args + " 2>/dev/null";
    CliRun run;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return run;
    char buffer[4096];
    std::size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) run.output.append(buffer, got);
    int status = pclose(pipe);
    run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return run;
}

std::string criterion_cli_determinism() {
    CliRun first = run_cli("series --primes 2,3");
    CliRun second = run_cli("series --primes 2,3");
    if (first.exit_code != 0 || second.exit_code != 0) return "series run failed";
    if (first.output != second.output) return "two runs differ byte-for-byte";
    if (first.output.empty()) return "empty report";

    std::ifstream golden(ACCEPTANCE_GOLDEN_PATH, std::ios::binary);
    if (!golden) return "golden file missing";
    std::stringstream buffer;
    buffer << golden.rdbuf();
    if (buffer.str() != first.output) return "output differs from the committed golden file";

    nlohmann::json parsed = nlohmann::json::parse(first.output, nullptr, false);
    if (parsed.is_discarded()) return "report is not valid JSON";
    const auto& layers = parsed["result"]["layers"];
    if (layers.size() != 1 || layers[0]["summands"].size() != 2)
        return "layer structure is not the |F| = 2 shape";
    std::string count_s2 = layers[0]["summands"][0]["summand_count"].get<std::string>();
    std::string count_s3 = layers[0]["summands"][1]["summand_count"].get<std::string>();
    if (count_s2 != "1" || count_s3 != "2") return "layer counts are not (1, 2)";
    if (parsed["result"]["top"]["torus_rank"].get<int>() != 2) return "torus rank is not 2";

    // no floating-point values anywhere in the report
    std::function<bool(const nlohmann::json&)> no_floats = [&](const nlohmann::json& j) {
        if (j.is_number_float()) return false;
        if (j.is_object() || j.is_array())
            for (const auto& item : j)
                if (!no_floats(item)) return false;
        return true;
    };
    if (!no_floats(parsed)) return "report contains a floating-point value";
    return "OK byte-identical runs, golden match, layer counts (1, 2)";
}

struct Criterion {
    int id;
    std::string name;
    std::function<std::string()> run;
};

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "prime-power order laws vs brute force (p<=50, m<=100, p^l<=1e7)", criterion_order_laws},
        {2, "multi-index stabilization law on the (F, q) grid", criterion_stabilization_law},
        {3, "closure index formula vs stabilized brute force", criterion_index_formula},
        {4, "two-generator index formula vs brute force", criterion_two_generator_index},
        {5, "odometer coding map equivariance and injectivity", criterion_equivariance},
        {6, "supernatural numbers d * prod p^inf", criterion_supernatural},
        {7, "two independent odometers commute", criterion_two_odometers},
        {8, "Smith normal form on 1000 random matrices", criterion_snf},
        {9, "ideal-lattice identity in the open-set model", criterion_lattice},
        {10, "Bunce-Deddens K-theory membership and cylinder classes", criterion_bd_membership},
        {11, "Bost-Connes truncation with Dirichlet generators", criterion_bost_connes},
        {12, "CLI determinism and golden series report", criterion_cli_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        bool pass = detail.rfind("OK", 0) == 0;
        if (!pass) ++failures;
        std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
    }
    if (failures == 0) std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return failures;
}
