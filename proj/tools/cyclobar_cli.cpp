// cyclobar: exact computations around the weight-graded cyclic bar
// construction, its Tate/homotopy-fixed-point spectral sequences, and the
// Witt-vector tables they assemble into.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cyclobar/cyclic_bar.hpp"
#include "cyclobar/exact_linalg.hpp"
#include "cyclobar/ss_engine.hpp"
#include "cyclobar/tc_assembly.hpp"
#include "cyclobar/witt.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace cyclobar;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBudget = 2;
constexpr int kExitInvariant = 3;

struct RunConfig {
    long long prime = 2;
    long long max_degree = 10;
    long long max_weight = 3;
    std::string format = "json";  // json | csv | md
    std::string cache_dir;
    std::string config_file;
};

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "prime")
        cfg.prime = std::stoll(value);
    else if (key == "max_degree")
        cfg.max_degree = std::stoll(value);
    else if (key == "budget" || key == "max_weight")
        cfg.max_weight = std::stoll(value);
    else if (key == "format")
        cfg.format = value;
    else if (key == "cache_dir")
        cfg.cache_dir = value;
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

// precedence: flags > environment > config file > defaults
void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            auto end = s.find_last_not_of(" \t");
            s.erase(end == std::string::npos ? 0 : end + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!key.empty()) apply_key_value(cfg, key, value);
    }
}

void load_environment(RunConfig& cfg) {
    if (const char* dir = std::getenv("CYCLOBAR_CACHE_DIR")) cfg.cache_dir = dir;
    if (const char* budget = std::getenv("CYCLOBAR_BUDGET")) cfg.max_weight = std::stoll(budget);
}

std::string group_string(const linalg::FiniteAbelianGroup& g) { return g.to_string(); }

json group_json(const linalg::FiniteAbelianGroup& g) {
    json factors = json::array();
    for (const Int& d : g.invariant_factors()) factors.push_back(d.str());
    return json{{"free_rank", g.free_rank()}, {"invariant_factors", factors}};
}

void emit(const std::string& text) { std::cout << text; }

// ---------------------------------------------------------------- ktable --

std::string render_ktable(const std::vector<tc::KTableRow>& rows, long long p, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        json out = json::array();
        for (const auto& row : rows) {
            json entries = json::array();
            for (auto& [mprime, s] : row.entries) entries.push_back(json{{"mprime", mprime}, {"s", s}});
            json orders = json::array();
            for (const Int& d : row.group.invariant_factors()) orders.push_back(d.str());
            out.push_back(json{{"prime", p},
                               {"degree", row.degree},
                               {"entries", entries},
                               {"group", orders},
                               {"order", row.group.is_finite() ? row.group.order().str() : "infinite"}});
            // even degrees interleaved as trivial rows
            if (&row != &rows.back())
                out.push_back(json{{"prime", p},
                                   {"degree", row.degree + 1},
                                   {"entries", json::array()},
                                   {"group", json::array()},
                                   {"order", "1"}});
        }
        os << out.dump(2) << "\n";
    } else if (format == "csv") {
        os << "prime,degree,order,group,entries\n";
        for (const auto& row : rows) {
            os << p << "," << row.degree << "," << row.group.order().str() << ",";
            for (std::size_t i = 0; i < row.group.invariant_factors().size(); ++i)
                os << (i ? ";" : "") << row.group.invariant_factors()[i].str();
            os << ",";
            for (std::size_t i = 0; i < row.entries.size(); ++i)
                os << (i ? ";" : "") << row.entries[i].first << ":" << row.entries[i].second;
            os << "\n";
            if (&row != &rows.back()) os << p << "," << row.degree + 1 << ",1,,\n";
        }
    } else {  // md
        os << "| degree | group | order | entries (m', s) |\n";
        os << "|---|---|---|---|\n";
        for (const auto& row : rows) {
            os << "| " << row.degree << " | " << group_string(row.group) << " | " << row.group.order().str() << " | ";
            for (std::size_t i = 0; i < row.entries.size(); ++i)
                os << (i ? ", " : "") << "(" << row.entries[i].first << "," << row.entries[i].second << ")";
            os << " |\n";
            if (&row != &rows.back()) os << "| " << row.degree + 1 << " | 0 | 1 |  |\n";
        }
    }
    return os.str();
}

int cmd_ktable(const RunConfig& cfg, long long rmax) {
    std::vector<tc::KTableRow> rows;
    for (long long r = 0; r <= rmax; ++r) {
        std::cerr << "ktable: degree " << 2 * r + 1 << "\r";
        tc::KTableRow row = tc::tc_groups(r, cfg.prime);
        linalg::FiniteAbelianGroup cross = tc::k_relative(r, cfg.prime);
        if (!(cross == row.group)) throw std::logic_error("ktable: cross-validation failed");
        rows.push_back(std::move(row));
    }
    std::cerr << "\n";
    emit(render_ktable(rows, cfg.prime, cfg.format));
    return kExitOk;
}

// -------------------------------------------------------------- homology --

void dump_chain_complex(const linalg::IntegerChainComplex& complex, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t n = 1; n <= complex.top_degree(); ++n) {
        const auto& b = complex.boundary(n);
        std::ofstream out(std::filesystem::path(dir) / ("boundary_" + std::to_string(n) + ".txt"));
        out << b.rows() << " " << b.cols() << "\n";
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (const auto& [j, v] : b.row(i)) out << i << " " << j << " " << v.str() << "\n";
    }
}

int cmd_homology(const RunConfig& cfg, long long m, const std::string& dump_dir) {
    bar::Budget budget{.max_weight = cfg.max_weight};
    std::cerr << "homology: building the weight-" << m << " diagonal\n";
    auto space = bar::diagonal_realization(m, budget);
    if (!dump_dir.empty()) dump_chain_complex(space.chain_complex(true), dump_dir);
    std::cerr << "homology: reducing boundary matrices\n";
    auto h = space.reduced_homology();

    bool pass = true;
    for (std::size_t n = 0; n < h.size(); ++n) {
        linalg::FiniteAbelianGroup expect;
        if (m >= 1 && (n == static_cast<std::size_t>(2 * m) || n == static_cast<std::size_t>(2 * m + 1)))
            expect = linalg::FiniteAbelianGroup::free(1);
        else if (m == 0 && n == 0)
            expect = linalg::FiniteAbelianGroup::free(1);
        if (!(h[n] == expect)) pass = false;
    }

    std::ostringstream os;
    if (cfg.format == "json") {
        json groups = json::array();
        for (std::size_t n = 0; n < h.size(); ++n)
            groups.push_back(json{{"degree", n}, {"group", group_json(h[n])}});
        json out{{"weight", m},
                 {"reduced_homology", groups},
                 {"contract", pass ? "PASS" : "FAIL"}};
        if (m == 0) out["note"] = "unit weight: sphere summand, Z in degree 0 only";
        os << out.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        os << "degree,group\n";
        for (std::size_t n = 0; n < h.size(); ++n) os << n << "," << group_string(h[n]) << "\n";
        os << "contract," << (pass ? "PASS" : "FAIL") << "\n";
    } else {
        os << "| degree | group |\n|---|---|\n";
        for (std::size_t n = 0; n < h.size(); ++n) os << "| " << n << " | " << group_string(h[n]) << " |\n";
        os << "\ncontract: " << (pass ? "PASS" : "FAIL") << (m == 0 ? " (unit weight)" : "") << "\n";
    }
    emit(os.str());
    return pass ? kExitOk : kExitInvariant;
}

// ------------------------------------------------------------------ witt --

std::vector<long long> parse_csv_longs(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    return out;
}

int cmd_witt_decompose(const RunConfig& cfg, long long r) {
    auto decomp = witt::big_witt_decomposition(r, cfg.prime);
    std::ostringstream os;
    if (cfg.format == "json") {
        json entries = json::array();
        for (auto& [m, s] : decomp) entries.push_back(json{{"mprime", m}, {"s", s}});
        os << json{{"prime", cfg.prime}, {"r", r}, {"entries", entries}}.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        os << "mprime,s\n";
        for (auto& [m, s] : decomp) os << m << "," << s << "\n";
    } else {
        os << "| m' | s |\n|---|---|\n";
        for (auto& [m, s] : decomp) os << "| " << m << " | " << s << " |\n";
    }
    emit(os.str());
    return kExitOk;
}

int cmd_witt_ghost(const RunConfig& cfg, const std::string& set_text, const std::string& input_text) {
    auto elems = parse_csv_longs(set_text);
    auto coeffs = parse_csv_longs(input_text);
    witt::TruncationSet s(elems);
    if (coeffs.size() != s.size()) throw std::invalid_argument("ghost: need one coefficient per set element");
    auto a = witt::WittVector::over_integers(s, std::vector<Int>(coeffs.begin(), coeffs.end()));
    auto w = witt::ghost(a);
    std::ostringstream os;
    if (cfg.format == "json") {
        json out = json::array();
        for (const Int& x : w) out.push_back(x.str());
        os << json{{"truncation_set", s.elements()}, {"ghost", out}}.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i].str();
        os << "\n";
    }
    emit(os.str());
    return kExitOk;
}

int cmd_witt_poly(const RunConfig& cfg, const std::string& set_text, const std::string& op_name) {
    auto elems = parse_csv_longs(set_text);
    witt::TruncationSet s(elems);
    witt::WittOp op;
    if (op_name == "add")
        op = witt::WittOp::add;
    else if (op_name == "mul")
        op = witt::WittOp::mul;
    else
        throw std::invalid_argument("witt --poly: op must be add or mul");
    const auto& comps = witt::WittPolynomialCache::instance().get(s, op);

    auto monomial_string = [](const witt::WittMonomial& m) {
        std::ostringstream ms;
        bool first = true;
        for (const auto& [var, e] : m.exponents) {
            if (!first) ms << "*";
            ms << (var.first == 0 ? "a" : "b") << var.second;
            if (e > 1) ms << "^" << e;
            first = false;
        }
        if (first) ms << "1";
        return ms.str();
    };

    std::ostringstream os;
    if (cfg.format == "json") {
        json out;
        out["truncation_set"] = s.elements();
        out["op"] = op_name;
        json jc = json::object();
        for (const auto& [d, poly] : comps) {
            json terms = json::array();
            for (const auto& [mono, c] : poly) {
                json exps = json::object();
                for (const auto& [var, e] : mono.exponents)
                    exps[(var.first == 0 ? "a" : "b") + std::to_string(var.second)] = e;
                terms.push_back(json{{"monomial", exps}, {"coefficient", c.str()}});
            }
            jc[std::to_string(d)] = terms;
        }
        out["components"] = jc;
        os << out.dump(2) << "\n";
    } else {
        for (const auto& [d, poly] : comps) {
            os << (cfg.format == "md" ? "**s_" : "s_") << d << (cfg.format == "md" ? "** = " : " = ");
            bool first = true;
            for (const auto& [mono, c] : poly) {
                if (!first) os << " + ";
                if (c != 1) os << c.str() << "*";
                os << monomial_string(mono);
                first = false;
            }
            if (first) os << "0";
            os << "\n";
        }
    }
    emit(os.str());
    return kExitOk;
}

// ---------------------------------------------------------------- verify --

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;
    double millis = 0;
};

template <typename F>
CheckResult run_check(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = name;
    try {
        std::string details = f();
        r.pass = true;
        r.details = details;
    } catch (const std::exception& e) {
        r.pass = false;
        r.details = e.what();
    }
    r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "verify: " << name << " " << (r.pass ? "PASS" : "FAIL") << " (" << r.millis << " ms)\n";
    return r;
}

void require(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

std::vector<CheckResult> verify_witt(const RunConfig&, bool quick) {
    std::vector<CheckResult> out;
    out.push_back(run_check("witt.structure_polynomials_integral", [&] {
        std::vector<witt::TruncationSet> sets;
        sets.push_back(witt::TruncationSet::big(quick ? 6 : 8));
        for (long long p : {2ll, 3ll}) sets.push_back(witt::TruncationSet::p_typical(p, quick ? 3 : 4));
        for (const auto& s : sets)
            for (auto op : {witt::WittOp::add, witt::WittOp::mul}) (void)witt::structure_polynomials(s, op);
        return "all coefficients integral";
    }));
    out.push_back(run_check("witt.ghost_ring_homomorphism", [&] {
        std::mt19937 rng(2024);
        std::uniform_int_distribution<int> dist(-9, 9);
        int trials = quick ? 100 : 500;
        std::vector<witt::TruncationSet> sets{witt::TruncationSet::big(6), witt::TruncationSet::p_typical(2, 3),
                                              witt::TruncationSet::p_typical(3, 3)};
        for (int t = 0; t < trials; ++t) {
            const auto& s = sets[t % sets.size()];
            std::vector<Int> ca(s.size()), cb(s.size());
            for (auto& x : ca) x = dist(rng);
            for (auto& x : cb) x = dist(rng);
            auto a = witt::WittVector::over_integers(s, ca), b = witt::WittVector::over_integers(s, cb);
            auto wa = witt::ghost(a), wb = witt::ghost(b);
            auto ws = witt::ghost(witt::witt_add(a, b)), wp = witt::ghost(witt::witt_mul(a, b));
            for (std::size_t i = 0; i < s.size(); ++i) {
                require(ws[i] == wa[i] + wb[i], "ghost additivity failed");
                require(wp[i] == wa[i] * wb[i], "ghost multiplicativity failed");
            }
        }
        return std::to_string(trials) + " random inputs";
    }));
    out.push_back(run_check("witt.p_typical_cyclic", [&] {
        for (long long p : {2ll, 3ll})
            for (int n = 1; n <= 3; ++n) {
                auto s = witt::TruncationSet::p_typical(p, n);
                auto gen = witt::WittVector::unit(s, witt::Ring::prime_field, p, 1);
                auto cur = witt::WittVector::zero(s, witt::Ring::prime_field, p);
                long long order = 1;
                for (int i = 0; i < n; ++i) order *= p;
                std::set<std::vector<Int>> seen;
                for (long long i = 0; i < order; ++i) {
                    require(seen.insert(cur.coefficients()).second, "repeated element before p^n steps");
                    cur = witt::witt_add(cur, gen);
                }
                require(cur == witt::WittVector::zero(s, witt::Ring::prime_field, p), "generator order is not p^n");
            }
        return "W_n(F_p) cyclic for p in {2,3}, n <= 3";
    }));
    out.push_back(run_check("witt.decomposition_lengths", [&] {
        long long rmax = quick ? 50 : 200;
        for (long long p : {2ll, 3ll, 5ll, 7ll})
            for (long long r = 1; r <= rmax; ++r) {
                long long total = 0;
                for (auto& [m, s] : witt::big_witt_decomposition(r, p)) total += s;
                require(total == r, "lengths do not sum to r");
            }
        return "sum of lengths = r up to r = " + std::to_string(rmax);
    }));
    out.push_back(run_check("witt.frobenius_verschiebung", [&] {
        std::mt19937 rng(5);
        std::uniform_int_distribution<int> dist(-5, 5);
        for (long long nop : {2ll, 3ll}) {
            auto big = witt::TruncationSet::big(6);
            auto small = big.quotient(nop);
            std::vector<Int> c(small.size());
            for (auto& x : c) x = dist(rng);
            auto a = witt::WittVector::over_integers(small, c);
            auto fv = witt::frobenius(witt::verschiebung(a, nop, big), nop);
            auto w = witt::ghost(a), wfv = witt::ghost(fv);
            for (std::size_t i = 0; i < w.size(); ++i) require(wfv[i] == nop * w[i], "F_n V_n != n");
        }
        return "F_n V_n = n on ghost coordinates";
    }));
    return out;
}

std::vector<CheckResult> verify_homology(const RunConfig& cfg, bool quick, long long mflag) {
    std::vector<CheckResult> out;
    long long mmax = mflag >= 0 ? mflag : (quick ? 2 : std::min<long long>(cfg.max_weight, 3));
    bar::Budget budget{.max_weight = std::max(cfg.max_weight, mmax)};
    for (long long m = mflag >= 0 ? mflag : 0; m <= mmax; ++m) {
        out.push_back(run_check("homology.B(" + std::to_string(m) + ")", [&, m] {
            auto h = bar::homology_B(m, budget);
            for (std::size_t n = 0; n < h.size(); ++n) {
                linalg::FiniteAbelianGroup expect;
                if ((m >= 1 && (n == std::size_t(2 * m) || n == std::size_t(2 * m + 1))) || (m == 0 && n == 0))
                    expect = linalg::FiniteAbelianGroup::free(1);
                require(h[n] == expect, "H_" + std::to_string(n) + " = " + h[n].to_string());
            }
            if (m == 0) return std::string("unit weight: Z in degree 0");
            return "Z in degrees " + std::to_string(2 * m) + ", " + std::to_string(2 * m + 1);
        }));
    }
    out.push_back(run_check("homology.subdivision_matches", [&] {
        for (long long p : {2ll, 3ll})
            for (long long m = 0; m <= (quick ? 1 : 2); ++m) {
                auto hsd = bar::SubdividedComplex(m, p, budget).diagonal_homology();
                auto hb = bar::homology_B(m, budget);
                require(hsd.size() == hb.size(), "graded ranges differ");
                for (std::size_t n = 0; n < hb.size(); ++n) require(hsd[n] == hb[n], "subdivision homology differs");
            }
        return "sd_p diagonal homology = B(m) homology";
    }));
    out.push_back(run_check("homology.free_action_iff_coprime", [&] {
        for (long long p : {2ll, 3ll})
            for (long long m = 1; m <= 6; ++m)
                require(bar::check_free_action(m, p) == (m % p != 0), "freeness mismatch");
        return "C_p acts freely iff p does not divide m";
    }));
    out.push_back(run_check("homology.koszul_tor", [&] {
        auto tz = bar::koszul_tor(bar::Coeff::integers);
        require(tz.size() == 2, "unexpected bidegrees");
        require(tz.at({0, 0}) == linalg::FiniteAbelianGroup::free(1), "Tor_0 wrong");
        require(tz.at({1, 2}) == linalg::FiniteAbelianGroup::free(1), "Tor_1 wrong");
        return "ground ring at (0,0) and (1,2)";
    }));
    out.push_back(run_check("homology.graded_dimension_identity", [&] {
        auto report = tc::iterated_thh_series(40);
        require(report.equal, "series differ");
        return "series agree to degree 40";
    }));
    return out;
}

std::vector<CheckResult> verify_ss(const RunConfig&, bool quick, long long pflag) {
    std::vector<CheckResult> out;
    std::vector<long long> primes = pflag > 0 ? std::vector<long long>{pflag} : std::vector<long long>{2, 3, 5};
    long long deg_max = quick ? 60 : 200;
    int vmax = quick ? 2 : 5;
    long long mp_max = quick ? 3 : 9;
    out.push_back(run_check("ss.survivor_closed_forms", [&] {
        for (long long p : primes)
            for (long long mp = 1; mp <= mp_max; ++mp) {
                if (mp % p == 0) continue;
                long long m = mp;
                for (int v = 0; v <= vmax; ++v, m *= p) {
                    ss::Page tate(m, p, ss::Mode::tate), hfp(m, p, ss::Mode::hfp);
                    auto tt = ss::run_to_e_infinity(tate, 0, deg_max);
                    auto ht = ss::run_to_e_infinity(hfp, 0, deg_max);
                    for (long long d = 0; d <= deg_max; ++d) {
                        if (d % 2 == 0) {
                            require(tt.count(d) == 0 && ht.count(d) == 0, "even degree not empty");
                            continue;
                        }
                        long long r = (d - 1) / 2;
                        require(tt.count(d) == std::size_t(v), "Tate count differs from v");
                        require(ht.count(d) == std::size_t(m <= r ? v + 1 : v), "hfp count differs");
                    }
                }
            }
        return "counts match W_v / W_{v+1} pattern";
    }));
    out.push_back(run_check("ss.can_iso_range", [&] {
        for (long long p : primes)
            for (long long mp = 1; mp <= mp_max; ++mp) {
                if (mp % p == 0) continue;
                long long m = mp;
                for (int v = 0; v <= vmax; ++v, m *= p)
                    for (long long r = 0; r <= std::min<long long>(deg_max / 2, 2 * m + 4); ++r)
                        require(ss::can_comparison(m, p, r) == (r < m), "can range mismatch");
            }
        return "bijection iff r < m";
    }));
    return out;
}

std::vector<CheckResult> verify_tc(const RunConfig&, bool quick, long long pflag) {
    std::vector<CheckResult> out;
    std::vector<long long> primes = pflag > 0 ? std::vector<long long>{pflag} : std::vector<long long>{2, 3, 5, 7};
    out.push_back(run_check("tc.table_orders_and_euler", [&] {
        long long rmax = quick ? 30 : 100;
        for (long long p : primes)
            for (long long r = 0; r <= rmax; ++r) {
                auto row = tc::tc_groups(r, p);
                long long total = 0;
                Int order = 1;
                for (auto& [m, s] : row.entries) {
                    total += s;
                    for (int i = 0; i < s; ++i) order *= p;
                }
                require(total == r, "lengths do not sum to r");
                require(row.group.order() == order, "group order mismatch");
                if (r >= 1) require(row.entries == witt::big_witt_decomposition(r, p), "Witt route disagrees");
            }
        return "orders p^r, entries match the Witt decomposition";
    }));
    out.push_back(run_check("tc.phi_can_kernel", [&] {
        std::vector<long long> ps = pflag > 0 ? std::vector<long long>{pflag} : std::vector<long long>{2, 3};
        for (long long p : ps)
            for (long long r = 0; r <= (quick ? 5 : 8); ++r)
                for (long long m = 1; m <= r + 2; ++m) {
                    if (m % p == 0) continue;
                    int s = tc::s_parameter(m, r, p);
                    Int order = 1;
                    for (int i = 0; i < s; ++i) order *= p;
                    auto expect = s == 0 ? linalg::FiniteAbelianGroup::trivial() : linalg::FiniteAbelianGroup::cyclic(order);
                    auto tower = tc::build_weight_tower(m, r, p);
                    for (std::uint64_t seed : {3ull, 17ull}) {
                        auto units = tc::UnitChoices::random(std::size_t(tower.vmax) + 1, p, seed);
                        require(tc::phi_can_kernel(m, r, p, units, 0) == expect, "kernel differs");
                        require(tc::phi_can_cokernel(m, r, p, units, 0).is_trivial(), "cokernel not zero");
                    }
                    require(tc::phi_can_kernel(m, r, p, tc::UnitChoices{}, 1) == expect, "truncation unstable");
                }
        return "kernel Z/p^s, cokernel 0, unit- and truncation-stable";
    }));
    out.push_back(run_check("tc.ring_structure_series", [&] {
        auto report = tc::iterated_thh_series(40);
        require(report.equal, "series differ");
        return "coefficients agree to degree 40";
    }));
    return out;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, bool quick, long long pflag, long long mflag) {
    std::vector<CheckResult> results;
    auto append = [&](std::vector<CheckResult> more) {
        for (auto& r : more) results.push_back(std::move(r));
    };
    if (suite == "witt" || suite == "all") append(verify_witt(cfg, quick));
    if (suite == "homology" || suite == "all") append(verify_homology(cfg, quick, mflag));
    if (suite == "ss" || suite == "all") append(verify_ss(cfg, quick, pflag));
    if (suite == "tc" || suite == "all") append(verify_tc(cfg, quick, pflag));
    if (results.empty()) throw std::invalid_argument("verify: unknown suite '" + suite + "'");

    bool all_pass = true;
    for (const auto& r : results) all_pass = all_pass && r.pass;

    // timings stream to stderr; stdout stays byte-stable for fixed flags
    std::ostringstream os;
    if (cfg.format == "json") {
        json checks = json::array();
        for (const auto& r : results)
            checks.push_back(json{{"name", r.name}, {"status", r.pass ? "PASS" : "FAIL"}, {"details", r.details}});
        os << json{{"suite", suite}, {"status", all_pass ? "PASS" : "FAIL"}, {"checks", checks}}.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        os << "name,status,details\n";
        for (const auto& r : results)
            os << r.name << "," << (r.pass ? "PASS" : "FAIL") << "," << r.details << "\n";
    } else {
        os << "| check | status | details |\n|---|---|---|\n";
        for (const auto& r : results)
            os << "| " << r.name << " | " << (r.pass ? "PASS" : "FAIL") << " | " << r.details << " |\n";
    }
    emit(os.str());
    return all_pass ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact cyclic-bar, spectral-sequence, and Witt-vector tables"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    RunConfig cfg;
    std::string flag_format, flag_cache, flag_config;
    long long flag_budget = -1;
    app.add_option("--format", flag_format, "output format: json, csv, or md");
    app.add_option("--cache-dir", flag_cache, "directory for the structure polynomial cache");
    app.add_option("--budget", flag_budget, "maximum weight for bar constructions");
    app.add_option("--config", flag_config, "key=value configuration file");

    auto* witt_cmd = app.add_subcommand("witt", "Witt vector tables");
    bool do_decompose = false, do_ghost = false;
    std::string poly_op, set_text, input_text;
    long long witt_p = -1, witt_r = -1;
    witt_cmd->add_flag("--decompose", do_decompose, "big Witt decomposition into p-typical lengths");
    witt_cmd->add_flag("--ghost", do_ghost, "ghost coordinates of an integer Witt vector");
    witt_cmd->add_option("--poly", poly_op, "structure polynomials for add|mul");
    witt_cmd->add_option("-p,--prime", witt_p, "prime p");
    witt_cmd->add_option("-r", witt_r, "length r");
    witt_cmd->add_option("-S,--set", set_text, "truncation set, comma separated");
    witt_cmd->add_option("--input", input_text, "coefficients, comma separated");

    auto* hom_cmd = app.add_subcommand("homology", "homology of the weight summand B(m)");
    long long hom_m = -1;
    std::string dump_dir;
    hom_cmd->add_option("-m,--weight", hom_m, "weight m")->required();
    hom_cmd->add_option("--dump-chains", dump_dir, "write boundary matrices to this directory");

    auto* ktable_cmd = app.add_subcommand("ktable", "relative K-theory table");
    long long kt_p = -1, kt_r = -1;
    ktable_cmd->add_option("-p,--prime", kt_p, "prime p")->required();
    ktable_cmd->add_option("-r", kt_r, "maximum r")->required();

    auto* verify_cmd = app.add_subcommand("verify", "run the cross-check suites");
    std::string suite;
    bool quick = false;
    long long verify_p = -1, verify_m = -1;
    verify_cmd->add_option("suite", suite, "witt | homology | ss | tc | all")->required();
    verify_cmd->add_flag("--quick", quick, "reduced parameter grid");
    verify_cmd->add_option("-p,--prime", verify_p, "restrict to one prime");
    verify_cmd->add_option("-m,--weight", verify_m, "restrict to one weight");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!flag_config.empty())
            load_config_file(cfg, flag_config);
        else if (const char* env_config = std::getenv("CYCLOBAR_CONFIG"))
            load_config_file(cfg, env_config);
        load_environment(cfg);
        if (!flag_format.empty()) cfg.format = flag_format;
        if (!flag_cache.empty()) cfg.cache_dir = flag_cache;
        if (flag_budget >= 0) cfg.max_weight = flag_budget;
        if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "md")
            throw std::invalid_argument("format must be json, csv, or md");
        if (!cfg.cache_dir.empty()) witt::WittPolynomialCache::instance().set_directory(cfg.cache_dir);

        if (witt_cmd->parsed()) {
            if (witt_p > 0) cfg.prime = witt_p;
            int modes = int(do_decompose) + int(do_ghost) + int(!poly_op.empty());
            if (modes != 1) throw std::invalid_argument("witt: choose exactly one of --decompose, --ghost, --poly");
            if (do_decompose) {
                if (witt_r < 1) throw std::invalid_argument("witt --decompose: need -r >= 1");
                return cmd_witt_decompose(cfg, witt_r);
            }
            if (do_ghost) {
                if (set_text.empty() || input_text.empty())
                    throw std::invalid_argument("witt --ghost: need -S and --input");
                return cmd_witt_ghost(cfg, set_text, input_text);
            }
            if (set_text.empty()) throw std::invalid_argument("witt --poly: need -S");
            return cmd_witt_poly(cfg, set_text, poly_op);
        }
        if (hom_cmd->parsed()) return cmd_homology(cfg, hom_m, dump_dir);
        if (ktable_cmd->parsed()) {
            cfg.prime = kt_p;
            if (kt_r < 0) throw std::invalid_argument("ktable: need -r >= 0");
            return cmd_ktable(cfg, kt_r);
        }
        if (verify_cmd->parsed()) return cmd_verify(cfg, suite, quick, verify_p, verify_m);
        return kExitUsage;
    } catch (const bar::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "invariant failure: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
}
