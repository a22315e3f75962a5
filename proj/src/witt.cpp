#include "cyclobar/witt.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace cyclobar::witt {

namespace {
using json = nlohmann::json;

Int mod_reduce(const Int& x, long long p) {
    Int r = x % p;
    if (r < 0) r += p;
    return r;
}

bool is_prime(long long p) {
    if (p < 2) return false;
    for (long long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

}  // namespace

TruncationSet::TruncationSet(std::vector<long long> elements) : elems_(std::move(elements)) {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
    if (elems_.empty()) throw InvalidSubset("TruncationSet: empty set");
    for (long long d : elems_) {
        if (d < 1) throw InvalidSubset("TruncationSet: elements must be positive");
        for (long long e = 1; e * e <= d; ++e) {
            if (d % e != 0) continue;
            if (!std::binary_search(elems_.begin(), elems_.end(), e) ||
                !std::binary_search(elems_.begin(), elems_.end(), d / e))
                throw InvalidSubset("TruncationSet: not divisor-closed at " + std::to_string(d));
        }
    }
}

TruncationSet TruncationSet::big(long long r) {
    if (r < 1) throw InvalidSubset("TruncationSet::big: r must be >= 1");
    std::vector<long long> v(r);
    for (long long i = 0; i < r; ++i) v[i] = i + 1;
    return TruncationSet(std::move(v));
}

TruncationSet TruncationSet::p_typical(long long p, int n) {
    if (!is_prime(p)) throw InvalidSubset("TruncationSet::p_typical: p must be prime");
    if (n < 1) throw InvalidSubset("TruncationSet::p_typical: n must be >= 1");
    std::vector<long long> v;
    long long q = 1;
    for (int i = 0; i < n; ++i) {
        v.push_back(q);
        q *= p;
    }
    return TruncationSet(std::move(v));
}

bool TruncationSet::contains(long long d) const {
    return std::binary_search(elems_.begin(), elems_.end(), d);
}

std::size_t TruncationSet::index_of(long long d) const {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), d);
    if (it == elems_.end() || *it != d) throw InvalidSubset("TruncationSet: " + std::to_string(d) + " not in set");
    return static_cast<std::size_t>(it - elems_.begin());
}

TruncationSet TruncationSet::quotient(long long n) const {
    if (n < 1) throw InvalidSubset("TruncationSet::quotient: n must be positive");
    std::vector<long long> v;
    for (long long d : elems_)
        if (d % n == 0) v.push_back(d / n);
    // d in S and e | d implies e in S, so S/n is divisor-closed and nonempty
    // only when n divides something; callers treat the empty case as an error.
    if (v.empty()) throw InvalidSubset("TruncationSet::quotient: no multiples of " + std::to_string(n));
    return TruncationSet(std::move(v));
}

bool TruncationSet::is_subset_of(const TruncationSet& other) const {
    for (long long d : elems_)
        if (!other.contains(d)) return false;
    return true;
}

std::string TruncationSet::label() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) os << "-";
        os << elems_[i];
    }
    return os.str();
}

WittMonomial WittMonomial::var(int side, long long d, unsigned e) {
    WittMonomial m;
    if (e > 0) m.exponents[{side, d}] = e;
    return m;
}

WittMonomial WittMonomial::operator*(const WittMonomial& rhs) const {
    WittMonomial out = *this;
    for (const auto& [v, e] : rhs.exponents) out.exponents[v] += e;
    return out;
}

namespace {

void poly_add_term(RationalPoly& p, const WittMonomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = p.find(m);
    if (it == p.end()) {
        p.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

RationalPoly poly_mul(const RationalPoly& a, const RationalPoly& b) {
    RationalPoly out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) poly_add_term(out, ma * mb, ca * cb);
    return out;
}

RationalPoly poly_pow(const RationalPoly& a, long long e) {
    RationalPoly out{{WittMonomial::one(), Rational(1)}};
    for (long long i = 0; i < e; ++i) out = poly_mul(out, a);
    return out;
}

void poly_axpy(RationalPoly& dst, const Rational& c, const RationalPoly& src) {
    for (const auto& [m, v] : src) poly_add_term(dst, m, c * v);
}

RationalPoly to_rational(const IntPoly& p) {
    RationalPoly out;
    for (const auto& [m, c] : p) out.emplace(m, Rational(c));
    return out;
}

Int eval_int(const IntPoly& p, const TruncationSet& s, const std::vector<Int>& a, const std::vector<Int>& b) {
    Int acc = 0;
    for (const auto& [m, c] : p) {
        Int term = c;
        for (const auto& [var, e] : m.exponents) {
            const Int& base = (var.first == 0 ? a : b)[s.index_of(var.second)];
            for (unsigned k = 0; k < e; ++k) term *= base;
        }
        acc += term;
    }
    return acc;
}

}  // namespace

RationalPoly ghost_polynomial(const TruncationSet& s, long long d, int side) {
    RationalPoly out;
    for (long long e : s.elements()) {
        if (d % e != 0) continue;
        poly_add_term(out, WittMonomial::var(side, e, static_cast<unsigned>(d / e)), Rational(e));
    }
    return out;
}

std::map<long long, IntPoly> structure_polynomials(const TruncationSet& s, WittOp op) {
    std::map<long long, IntPoly> result;
    for (long long d : s.elements()) {
        RationalPoly ga = ghost_polynomial(s, d, 0);
        RationalPoly gb = ghost_polynomial(s, d, 1);
        RationalPoly target = (op == WittOp::add) ? ga : poly_mul(ga, gb);
        if (op == WittOp::add) poly_axpy(target, Rational(1), gb);
        // subtract e * s_e^{d/e} for proper divisors e of d inside S
        for (const auto& [e, poly_e] : result) {
            if (d % e != 0 || e == d) continue;
            poly_axpy(target, Rational(-e), poly_pow(to_rational(poly_e), d / e));
        }
        IntPoly component;
        for (const auto& [m, c] : target) {
            Rational q = c / d;
            if (boost::multiprecision::denominator(q) != 1)
                throw NonIntegralCoefficient("structure polynomial for d=" + std::to_string(d) +
                                             " has a non-integral coefficient");
            component.emplace(m, Int(boost::multiprecision::numerator(q)));
        }
        result.emplace(d, std::move(component));
    }
    return result;
}

WittPolynomialCache& WittPolynomialCache::instance() {
    static WittPolynomialCache cache;
    return cache;
}

void WittPolynomialCache::set_directory(std::optional<std::filesystem::path> dir) {
    std::lock_guard lock(mu_);
    dir_ = std::move(dir);
}

std::optional<std::filesystem::path> WittPolynomialCache::directory() const {
    std::lock_guard lock(mu_);
    return dir_;
}

std::string WittPolynomialCache::file_name(const TruncationSet& s, WittOp op) {
    return "witt_S" + s.label() + (op == WittOp::add ? "_add" : "_mul") + ".json";
}

namespace {

json poly_to_json(const IntPoly& p) {
    json terms = json::array();
    for (const auto& [m, c] : p) {
        json mono = json::object();
        for (const auto& [var, e] : m.exponents)
            mono[(var.first == 0 ? "a" : "b") + std::to_string(var.second)] = e;
        terms.push_back(json{{"monomial", mono}, {"coefficient", c.str()}});
    }
    return terms;
}

IntPoly poly_from_json(const json& terms) {
    IntPoly p;
    for (const auto& t : terms) {
        WittMonomial m;
        for (const auto& [key, e] : t.at("monomial").items()) {
            int side = key.at(0) == 'a' ? 0 : 1;
            long long d = std::stoll(key.substr(1));
            m.exponents[{side, d}] = e.get<unsigned>();
        }
        p.emplace(std::move(m), Int(t.at("coefficient").get<std::string>()));
    }
    return p;
}

// Spot check: evaluating the polynomials on fixed integer inputs must agree
// ghost-wise with the operation.
bool verify_components(const TruncationSet& s, WittOp op, const std::map<long long, IntPoly>& comps) {
    if (comps.size() != s.size()) return false;
    std::mt19937 rng(20240917);
    std::uniform_int_distribution<int> dist(-5, 5);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<Int> a(s.size()), b(s.size());
        for (auto& x : a) x = dist(rng);
        for (auto& x : b) x = dist(rng);
        std::vector<Int> c(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto it = comps.find(s.elements()[i]);
            if (it == comps.end()) return false;
            c[i] = eval_int(it->second, s, a, b);
        }
        auto ghost_of = [&](const std::vector<Int>& v) {
            std::vector<Int> w(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) {
                long long n = s.elements()[i];
                Int acc = 0;
                for (std::size_t k = 0; k < s.size(); ++k) {
                    long long d = s.elements()[k];
                    if (n % d != 0) continue;
                    Int t = d;
                    for (long long j = 0; j < n / d; ++j) t *= v[k];
                    acc += t;
                }
                w[i] = acc;
            }
            return w;
        };
        auto wa = ghost_of(a), wb = ghost_of(b), wc = ghost_of(c);
        for (std::size_t i = 0; i < s.size(); ++i) {
            Int expect = (op == WittOp::add) ? Int(wa[i] + wb[i]) : Int(wa[i] * wb[i]);
            if (wc[i] != expect) return false;
        }
    }
    return true;
}

}  // namespace

const std::map<long long, IntPoly>& WittPolynomialCache::get(const TruncationSet& s, WittOp op) {
    std::lock_guard lock(mu_);
    auto key = std::make_pair(s.label(), op);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;

    if (dir_) {
        std::filesystem::path file = *dir_ / file_name(s, op);
        std::ifstream in(file);
        if (in) {
            try {
                json doc = json::parse(in);
                std::map<long long, IntPoly> comps;
                for (const auto& [d, terms] : doc.at("components").items())
                    comps.emplace(std::stoll(d), poly_from_json(terms));
                if (verify_components(s, op, comps))
                    return entries_.emplace(key, std::move(comps)).first->second;
            } catch (const std::exception&) {
                // fall through to recompute; corrupt cache files are replaced
            }
        }
    }

    std::map<long long, IntPoly> comps = structure_polynomials(s, op);
    if (!verify_components(s, op, comps))
        throw NonIntegralCoefficient("structure polynomials failed the ghost verification");

    if (dir_) {
        std::error_code ec;
        std::filesystem::create_directories(*dir_, ec);
        json doc;
        doc["truncation_set"] = s.elements();
        doc["op"] = (op == WittOp::add) ? "add" : "mul";
        json jcomp = json::object();
        for (const auto& [d, p] : comps) jcomp[std::to_string(d)] = poly_to_json(p);
        doc["components"] = jcomp;
        std::filesystem::path file = *dir_ / file_name(s, op);
        std::filesystem::path tmp = file;
        tmp += ".tmp" + std::to_string(::getpid());
        {
            std::ofstream out(tmp);
            out << doc.dump(1) << "\n";
        }
        std::filesystem::rename(tmp, file, ec);  // atomic replace; losers overwrite equal bytes
    }
    return entries_.emplace(key, std::move(comps)).first->second;
}

WittVector WittVector::over_integers(TruncationSet s, std::vector<Int> coefficients) {
    if (coefficients.size() != s.size())
        throw MismatchedTruncation("WittVector: coefficient count does not match truncation set");
    return WittVector(std::move(s), Ring::integers, 0, std::move(coefficients));
}

WittVector WittVector::over_prime_field(TruncationSet s, long long p, std::vector<Int> coefficients) {
    if (!is_prime(p)) throw std::invalid_argument("WittVector: characteristic must be prime");
    if (coefficients.size() != s.size())
        throw MismatchedTruncation("WittVector: coefficient count does not match truncation set");
    for (Int& c : coefficients) c = mod_reduce(c, p);
    return WittVector(std::move(s), Ring::prime_field, p, std::move(coefficients));
}

WittVector WittVector::zero(TruncationSet s, Ring ring, long long p) {
    std::vector<Int> c(s.size(), Int(0));
    return ring == Ring::integers ? over_integers(std::move(s), std::move(c))
                                  : over_prime_field(std::move(s), p, std::move(c));
}

WittVector WittVector::unit(TruncationSet s, Ring ring, long long p, const Int& c) {
    std::vector<Int> v(s.size(), Int(0));
    v[s.index_of(1)] = c;
    return ring == Ring::integers ? over_integers(std::move(s), std::move(v))
                                  : over_prime_field(std::move(s), p, std::move(v));
}

std::vector<Int> ghost(const WittVector& a) {
    if (a.ring() != Ring::integers)
        throw NonIntegralRing("ghost: defined here over integer coefficients only");
    const auto& s = a.truncation_set();
    std::vector<Int> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        long long n = s.elements()[i];
        Int acc = 0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            long long d = s.elements()[k];
            if (n % d != 0) continue;
            Int t = d;
            for (long long j = 0; j < n / d; ++j) t *= a.coefficients()[k];
            acc += t;
        }
        w[i] = acc;
    }
    return w;
}

namespace {

WittVector witt_binop(const WittVector& a, const WittVector& b, WittOp op) {
    if (a.truncation_set() != b.truncation_set())
        throw MismatchedTruncation("witt arithmetic: truncation sets differ");
    if (a.ring() != b.ring() || a.characteristic() != b.characteristic())
        throw MismatchedTruncation("witt arithmetic: coefficient rings differ");
    const auto& s = a.truncation_set();
    const auto& comps = WittPolynomialCache::instance().get(s, op);
    std::vector<Int> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const IntPoly& p = comps.at(s.elements()[i]);
        out[i] = eval_int(p, s, a.coefficients(), b.coefficients());
        if (a.ring() == Ring::prime_field) out[i] = mod_reduce(out[i], a.characteristic());
    }
    return a.ring() == Ring::integers ? WittVector::over_integers(s, std::move(out))
                                      : WittVector::over_prime_field(s, a.characteristic(), std::move(out));
}

// Solve the ghost equations for the coefficients, ascending through S.
// Valid over Z only when the target really is a Witt vector; divisions assert.
WittVector unghost(const TruncationSet& s, const std::vector<Int>& w) {
    std::vector<Int> c(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        long long n = s.elements()[i];
        Int acc = w[i];
        for (std::size_t k = 0; k < i; ++k) {
            long long d = s.elements()[k];
            if (n % d != 0) continue;
            Int t = d;
            for (long long j = 0; j < n / d; ++j) t *= c[k];
            acc -= t;
        }
        if (acc % n != 0) throw NonIntegralCoefficient("unghost: ghost vector is not integral at " + std::to_string(n));
        c[i] = acc / n;
    }
    return WittVector::over_integers(s, std::move(c));
}

}  // namespace

WittVector witt_add(const WittVector& a, const WittVector& b) { return witt_binop(a, b, WittOp::add); }
WittVector witt_mul(const WittVector& a, const WittVector& b) { return witt_binop(a, b, WittOp::mul); }

WittVector frobenius(const WittVector& a, long long n) {
    if (n < 1) throw InvalidSubset("frobenius: n must be positive");
    TruncationSet target = a.truncation_set().quotient(n);
    if (a.ring() == Ring::integers) {
        std::vector<Int> w = ghost(a);
        std::vector<Int> wt(target.size());
        for (std::size_t i = 0; i < target.size(); ++i)
            wt[i] = w[a.truncation_set().index_of(target.elements()[i] * n)];
        return unghost(target, wt);
    }
    // F is given by universal integral polynomials, so computing on any
    // integer lift and reducing mod p is well defined.
    WittVector lift = WittVector::over_integers(a.truncation_set(), a.coefficients());
    WittVector fl = frobenius(lift, n);
    return WittVector::over_prime_field(target, a.characteristic(), fl.coefficients());
}

WittVector verschiebung(const WittVector& a, long long n, const TruncationSet& target) {
    if (n < 1) throw InvalidSubset("verschiebung: n must be positive");
    if (!(target.quotient(n) == a.truncation_set()))
        throw MismatchedTruncation("verschiebung: target/n does not match the source truncation set");
    std::vector<Int> out(target.size(), Int(0));
    for (std::size_t i = 0; i < target.size(); ++i) {
        long long d = target.elements()[i];
        if (d % n == 0) out[i] = a.coefficient(d / n);
    }
    return a.ring() == Ring::integers ? WittVector::over_integers(target, std::move(out))
                                      : WittVector::over_prime_field(target, a.characteristic(), std::move(out));
}

WittVector restriction(const WittVector& a, const TruncationSet& t) {
    if (!t.is_subset_of(a.truncation_set())) throw InvalidSubset("restriction: target is not a subset");
    std::vector<Int> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = a.coefficient(t.elements()[i]);
    return a.ring() == Ring::integers ? WittVector::over_integers(t, std::move(out))
                                      : WittVector::over_prime_field(t, a.characteristic(), std::move(out));
}

std::vector<std::pair<long long, int>> big_witt_decomposition(long long r, long long p) {
    if (r < 1) throw std::invalid_argument("big_witt_decomposition: r must be >= 1");
    if (!is_prime(p)) throw std::invalid_argument("big_witt_decomposition: p must be prime");
    std::vector<std::pair<long long, int>> out;
    long long total = 0;
    for (long long m = 1; m <= r; ++m) {
        if (m % p == 0) continue;
        int s = 0;
        for (long long q = m; q <= r; q *= p) ++s;
        out.emplace_back(m, s);
        total += s;
    }
    if (total != r) throw std::logic_error("big_witt_decomposition: lengths do not sum to r");
    return out;
}

}  // namespace cyclobar::witt
