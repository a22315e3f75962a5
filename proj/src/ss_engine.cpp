#include "cyclobar/ss_engine.hpp"

#include <algorithm>

namespace cyclobar::ss {

namespace {

bool is_prime(long long p) {
    if (p < 2) return false;
    for (long long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

int valuation_of(long long m, long long p) {
    int v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

}  // namespace

Page::Page(long long m, long long p, Mode mode) : m_(m), p_(p), mode_(mode) {
    if (m == 0) throw WeightZero("e2_page: weight 0 is the absolute part, not a relative summand");
    if (m < 0) throw std::invalid_argument("e2_page: weight must be positive");
    if (!is_prime(p)) throw std::invalid_argument("e2_page: p must be prime");
    v_ = valuation_of(m, p);
}

Page e2_page(long long m, long long p, Mode mode) { return Page(m, p, mode); }

bool Page::contains(const Monomial& mon) const {
    if (mon.weight != m_ || mon.x_exp < 0) return false;
    if (mode_ == Mode::hfp && mon.t_exp < 0) return false;
    return true;
}

std::vector<Monomial> Page::basis_in_degree(long long degree, long long t_min, long long t_max) const {
    std::vector<Monomial> out;
    for (long long j = t_min; j <= t_max; ++j) {
        // -2j + 2i + 2m (+1 for z) = degree
        for (Gen g : {Gen::y, Gen::z}) {
            long long rem = degree + 2 * j - 2 * m_ - (g == Gen::z ? 1 : 0);
            if (rem % 2 != 0) continue;
            Monomial mon{j, rem / 2, g, m_};
            if (contains(mon)) out.push_back(mon);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Monomial> Page::differential(const Monomial& mon) const {
    if (!contains(mon)) throw std::invalid_argument("differential: monomial is not on the page");
    if (mon.gen != Gen::y) return std::nullopt;  // z_m is an infinite cycle
    Monomial target{mon.t_exp + v_ + 1, mon.x_exp + v_, Gen::z, m_};
    if (!contains(target)) return std::nullopt;
    // d^{2v+2} shifts (column, row) by (-2v-2, 2v+1)
    if (target.column() - mon.column() != -2 * (v_ + 1) || target.row() - mon.row() != 2 * v_ + 1)
        throw std::logic_error("differential: bidegree shift is off");
    return target;
}

std::optional<Monomial> Page::differential_preimage(const Monomial& mon) const {
    if (!contains(mon)) throw std::invalid_argument("differential_preimage: monomial is not on the page");
    if (mon.gen != Gen::z) return std::nullopt;
    Monomial source{mon.t_exp - v_ - 1, mon.x_exp - v_, Gen::y, m_};
    if (!contains(source)) return std::nullopt;
    return source;
}

std::vector<Monomial> Page::survivors_in_degree(long long degree) const {
    std::vector<Monomial> out;
    if (degree % 2 == 0) {
        // even degrees carry only y-monomials, all of which support a
        // differential into the page
        long long delta = degree / 2 - m_;  // i - j for y-monomials
        long long i_min = std::max<long long>(0, mode_ == Mode::hfp ? delta : 0);
        for (long long i = i_min; i <= i_min + std::abs(delta) + v_ + 4; ++i) {
            Monomial y{i - delta, i, Gen::y, m_};
            if (!contains(y)) continue;
            if (!differential(y).has_value()) throw std::logic_error("survivors: y-monomial without a differential");
        }
        return out;
    }
    // odd degree 2r+1: z-monomials have i - j = r - m
    long long r = (degree - 1) / 2;
    long long delta = r - m_;  // i - j
    long long i_min = std::max<long long>(0, mode_ == Mode::hfp ? delta : 0);
    // a z-monomial is hit unless i < v, or (hfp) its preimage falls off the
    // truncation, i.e. j < v+1 <=> i < v+1+delta
    long long bound = v_;
    if (mode_ == Mode::hfp) bound = std::max(bound, v_ + 1 + delta);
    for (long long i = i_min; i < bound; ++i) {
        Monomial z{i - delta, i, Gen::z, m_};
        if (!contains(z)) continue;
        if (!differential_preimage(z).has_value()) out.push_back(z);
    }
    // mechanical tail check: past the bound everything is hit
    for (long long i = std::max(i_min, bound); i < std::max(i_min, bound) + 3; ++i) {
        Monomial z{i - delta, i, Gen::z, m_};
        if (contains(z) && !differential_preimage(z).has_value())
            throw std::logic_error("survivors: survivor past the derived bound");
    }
    return out;
}

SurvivorTable run_to_e_infinity(const Page& page, long long min_degree, long long max_degree) {
    SurvivorTable table;
    for (long long d = min_degree; d <= max_degree; ++d) {
        auto surv = page.survivors_in_degree(d);
        for (const Monomial& mon : surv)
            if (mon.gen == Gen::y) throw std::logic_error("run_to_e_infinity: a y-class survived");
        if (!surv.empty()) table.counts[d] = surv.size();
    }
    return table;
}

bool can_comparison(long long m, long long p, long long r) {
    Page hfp(m, p, Mode::hfp), tate(m, p, Mode::tate);
    auto a = hfp.survivors_in_degree(2 * r + 1);
    auto b = tate.survivors_in_degree(2 * r + 1);
    return a == b;
}

std::map<long long, linalg::FiniteAbelianGroup> assemble_cyclic(const SurvivorTable& counts, long long p) {
    std::map<long long, linalg::FiniteAbelianGroup> out;
    for (const auto& [degree, count] : counts.counts) {
        if (degree % 2 == 0 && count > 0)
            throw std::logic_error("assemble_cyclic: nonzero count in an even degree");
        Int order = 1;
        for (std::size_t k = 0; k < count; ++k) order *= p;
        out.emplace(degree, linalg::FiniteAbelianGroup::cyclic(order));
    }
    return out;
}

}  // namespace cyclobar::ss
