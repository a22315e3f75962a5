#include "cyclobar/tc_assembly.hpp"

#include "cyclobar/ss_engine.hpp"
#include "cyclobar/witt.hpp"

#include <algorithm>
#include <random>

namespace cyclobar::tc {

using linalg::FiniteAbelianGroup;
using linalg::IntMatrix;

namespace {

bool is_prime(long long p) {
    if (p < 2) return false;
    for (long long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

Int pow_int(long long p, int e) {
    Int x = 1;
    for (int i = 0; i < e; ++i) x *= p;
    return x;
}

Int mod_reduce(const Int& x, const Int& n) {
    Int r = x % n;
    if (r < 0) r += n;
    return r;
}

Int mod_inverse(const Int& u, const Int& n) {
    // extended euclid; u must be a unit mod n
    Int a = mod_reduce(u, n), b = n, x0 = 1, x1 = 0;
    while (b != 0) {
        Int q = a / b;
        Int t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
    }
    if (a != 1) throw std::invalid_argument("mod_inverse: not a unit");
    return mod_reduce(x0, n);
}

}  // namespace

int s_parameter(long long mprime, long long r, long long p) {
    if (mprime < 1) throw std::invalid_argument("s_parameter: m' must be >= 1");
    if (r < 0) throw std::invalid_argument("s_parameter: r must be >= 0");
    if (!is_prime(p)) throw std::invalid_argument("s_parameter: p must be prime");
    if (mprime % p == 0) throw DivisibleWeight("s_parameter: p divides m'");
    int smallest = 0;
    {
        long long q = mprime;
        while (q <= r) {
            q *= p;
            ++smallest;
        }
    }
    int count = 0;
    for (long long q = mprime; q <= r; q *= p) ++count;
    if (smallest != count) throw std::logic_error("s_parameter: characterizations disagree");
    return smallest;
}

KTableRow tc_groups(long long r, long long p) {
    if (r < 0) throw std::invalid_argument("tc_groups: r must be >= 0");
    if (!is_prime(p)) throw std::invalid_argument("tc_groups: p must be prime");
    KTableRow row;
    row.r = r;
    row.degree = 2 * r + 1;
    std::vector<Int> orders;
    for (long long m = 1; m <= r; ++m) {
        if (m % p == 0) continue;
        int s = s_parameter(m, r, p);
        row.entries.emplace_back(m, s);
        orders.push_back(pow_int(p, s));
    }
    row.group = FiniteAbelianGroup::from_orders(orders);
    return row;
}

linalg::FiniteAbelianGroup k_relative(long long r, long long p) {
    KTableRow row = tc_groups(r, p);
    // the trace-methods route and the Witt-decomposition route must agree
    if (r >= 1) {
        auto witt_side = witt::big_witt_decomposition(r, p);
        std::vector<std::pair<long long, int>> ws(witt_side.begin(), witt_side.end());
        if (ws != row.entries) throw std::logic_error("k_relative: entries disagree with the Witt decomposition");
    } else if (!row.entries.empty()) {
        throw std::logic_error("k_relative: nonempty table in degree 1");
    }
    return row.group;
}

linalg::FiniteAbelianGroup k_relative_in_degree(long long degree, long long p) {
    if (degree % 2 == 0) return FiniteAbelianGroup::trivial();
    if (degree < 1) throw std::invalid_argument("k_relative_in_degree: negative degree");
    return k_relative((degree - 1) / 2, p);
}

WeightTower build_weight_tower(long long mprime, long long r, long long p, int extra_levels) {
    int s = s_parameter(mprime, r, p);
    WeightTower tower;
    tower.mprime = mprime;
    tower.r = r;
    tower.p = p;
    tower.s = s;
    tower.vmax = s + 1 + extra_levels;
    if (tower.vmax < 0) throw TruncationTooSmall("build_weight_tower: no levels");
    // the truncation must reach past the can-isomorphism threshold
    Int top_weight = pow_int(p, tower.vmax) * mprime;
    if (top_weight <= r) throw TruncationTooSmall("build_weight_tower: p^vmax m' must exceed r");
    long long weight = mprime;
    for (int v = 0; v <= tower.vmax; ++v) {
        // odd-degree cyclic lengths in degree 2r+1, read off the E-infinity pages
        ss::Page hfp(weight, p, ss::Mode::hfp), tate(weight, p, ss::Mode::tate);
        tower.tc_minus_lengths.push_back(static_cast<int>(hfp.survivors_in_degree(2 * r + 1).size()));
        tower.tp_lengths.push_back(static_cast<int>(tate.survivors_in_degree(2 * r + 1).size()));
        if (tower.tp_lengths.back() != v) throw std::logic_error("build_weight_tower: Tate length drifted");
        int expect = (weight <= r) ? v + 1 : v;
        if (tower.tc_minus_lengths.back() != expect)
            throw std::logic_error("build_weight_tower: hfp length drifted");
        weight *= p;
    }
    return tower;
}

UnitChoices UnitChoices::ones(std::size_t levels) {
    UnitChoices u;
    u.phi_units.assign(levels, 1);
    u.can_units.assign(levels, 1);
    return u;
}

UnitChoices UnitChoices::random(std::size_t levels, long long p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    UnitChoices u;
    auto draw = [&]() {
        long long x = 1 + static_cast<long long>(rng() % (8 * static_cast<unsigned long long>(p)));
        while (x % p == 0) ++x;
        return x;
    };
    for (std::size_t v = 0; v < levels; ++v) {
        u.phi_units.push_back(draw());
        u.can_units.push_back(draw());
    }
    return u;
}

std::vector<Int> tower_source_orders(const WeightTower& tower) {
    std::vector<Int> orders;
    for (int v = 0; v <= tower.vmax; ++v) orders.push_back(pow_int(tower.p, tower.tc_minus_lengths[v]));
    return orders;
}

std::vector<Int> tower_target_orders(const WeightTower& tower) {
    std::vector<Int> orders;
    for (int v = 0; v <= tower.vmax; ++v) orders.push_back(pow_int(tower.p, tower.tp_lengths[v]));
    return orders;
}

IntMatrix phi_can_matrix(const WeightTower& tower, const UnitChoices& units) {
    const std::size_t levels = static_cast<std::size_t>(tower.vmax) + 1;
    if (units.phi_units.size() < levels || units.can_units.size() < levels)
        throw std::invalid_argument("phi_can_matrix: need one unit per level");
    IntMatrix f(levels, levels);
    long long weight = tower.mprime;
    for (int v = 0; v <= tower.vmax; ++v) {
        // can: level v -> v.  An isomorphism above the threshold, the
        // canonical length-reducing surjection below it; both send the tower
        // generator to a unit multiple of the target generator.
        f(v, v) = -units.can_units[v];
        // phi: level v -> v + 1, an isomorphism exactly while p^v m' <= r.
        if (weight <= tower.r && v + 1 <= tower.vmax) f(v + 1, v) = units.phi_units[v];
        weight *= tower.p;
    }
    return f;
}

namespace {

std::pair<FiniteAbelianGroup, FiniteAbelianGroup> phi_can_pair(long long mprime, long long r, long long p,
                                                               const UnitChoices& units, int extra_levels) {
    WeightTower tower = build_weight_tower(mprime, r, p, extra_levels);
    UnitChoices u = units;
    if (u.phi_units.empty()) u = UnitChoices::ones(static_cast<std::size_t>(tower.vmax) + 1);
    IntMatrix f = phi_can_matrix(tower, u);
    return linalg::kernel_cokernel(f, tower_source_orders(tower), tower_target_orders(tower));
}

}  // namespace

FiniteAbelianGroup phi_can_kernel(long long mprime, long long r, long long p, const UnitChoices& units,
                                  int extra_levels) {
    return phi_can_pair(mprime, r, p, units, extra_levels).first;
}

FiniteAbelianGroup phi_can_kernel(long long mprime, long long r, long long p) {
    return phi_can_kernel(mprime, r, p, UnitChoices{}, 0);
}

FiniteAbelianGroup phi_can_cokernel(long long mprime, long long r, long long p, const UnitChoices& units,
                                    int extra_levels) {
    return phi_can_pair(mprime, r, p, units, extra_levels).second;
}

std::vector<Int> apply_phi_can(const WeightTower& tower, const UnitChoices& units, const std::vector<Int>& x) {
    IntMatrix f = phi_can_matrix(tower, units);
    auto targets = tower_target_orders(tower);
    std::vector<Int> y(targets.size(), Int(0));
    for (std::size_t j = 0; j < targets.size(); ++j) {
        Int acc = 0;
        for (std::size_t i = 0; i < x.size(); ++i) acc += f(j, i) * x[i];
        y[j] = mod_reduce(acc, targets[j]);
    }
    return y;
}

std::vector<Int> kernel_section(const WeightTower& tower, const UnitChoices& units, const Int& value) {
    const int s = tower.s;
    std::vector<Int> x(static_cast<std::size_t>(tower.vmax) + 1, Int(0));
    if (s == 0) return x;  // trivial kernel
    auto sources = tower_source_orders(tower);
    // identity into the W_s slot at level s (a_s = s above the threshold)
    x[s] = mod_reduce(value, sources[s]);
    // descent: the kernel condition at target v reads
    //   phi_units[v-1] * x_{v-1} = can_units[v] * (x_v mod p^v)  (mod p^v)
    for (int v = s; v >= 1; --v) {
        Int modulus = pow_int(tower.p, v);
        Int rhs = mod_reduce(Int(units.can_units[v]) * mod_reduce(x[v], modulus), modulus);
        x[v - 1] = mod_reduce(mod_inverse(Int(units.phi_units[v - 1]), modulus) * rhs, modulus);
    }
    return x;
}

SeriesReport iterated_thh_series(int max_degree) {
    if (max_degree < 1) throw std::invalid_argument("iterated_thh_series: max_degree must be >= 1");
    const int n = max_degree;
    auto mul = [&](const std::vector<Int>& a, const std::vector<Int>& b) {
        std::vector<Int> out(n + 1, Int(0));
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) out[i + j] += a[i] * b[j];
        return out;
    };
    auto inverse = [&](const std::vector<Int>& a) {
        // power series inverse; requires a unit constant term
        if (a[0] != 1 && a[0] != -1) throw std::invalid_argument("series inverse: constant term not a unit");
        std::vector<Int> b(n + 1, Int(0));
        b[0] = a[0];  // 1/1 or -1/-1
        for (int k = 1; k <= n; ++k) {
            Int acc = 0;
            for (int i = 1; i <= k; ++i) acc += a[i] * b[k - i];
            b[k] = -a[0] * acc;
        }
        return b;
    };

    std::vector<Int> one_minus_q2(n + 1, Int(0)), weights(n + 1, Int(0)), one_plus_q3(n + 1, Int(0));
    one_minus_q2[0] = 1;
    if (n >= 2) one_minus_q2[2] = -1;
    one_plus_q3[0] = 1;
    if (n >= 3) one_plus_q3[3] = 1;
    weights[0] = 1;  // 1 + sum_{m >= 1} (q^{2m} + q^{2m+1})
    for (int m = 1; 2 * m <= n; ++m) {
        weights[2 * m] += 1;
        if (2 * m + 1 <= n) weights[2 * m + 1] += 1;
    }

    auto geom = inverse(one_minus_q2);  // 1/(1-q^2)
    SeriesReport report;
    report.max_degree = n;
    report.decomposition_side = mul(geom, weights);
    report.ring_side = mul(one_plus_q3, mul(geom, geom));
    report.equal = report.decomposition_side == report.ring_side;
    return report;
}

}  // namespace cyclobar::tc
