#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cyclobar/exact_linalg.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>
#include <functional>

using namespace cyclobar;
using namespace cyclobar::linalg;

namespace {

Int gcd_all(const IntMatrix& a) {
    Int g = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) g = boost::multiprecision::gcd(g, a(i, j));
    return g;
}

bool divisibility_chain_ok(const std::vector<Int>& d) {
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i] < 0) return false;
        if (d[i] == 0 && d[i + 1] != 0) return false;
        if (d[i] != 0 && d[i + 1] % d[i] != 0) return false;
    }
    return true;
}

IntMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = dist(rng);
    return m;
}

// Rank over Q by fraction-free elimination; independent of the Smith code path.
std::size_t rational_rank(IntMatrix m) {
    std::size_t rank = 0;
    std::size_t rows = m.rows(), cols = m.cols();
    std::size_t pr = 0;
    for (std::size_t pc = 0; pc < cols && pr < rows; ++pc) {
        std::size_t piv = rows;
        for (std::size_t i = pr; i < rows; ++i)
            if (m(i, pc) != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        for (std::size_t j = 0; j < cols; ++j) std::swap(m(pr, j), m(piv, j));
        for (std::size_t i = pr + 1; i < rows; ++i) {
            if (m(i, pc) == 0) continue;
            Int a = m(pr, pc), b = m(i, pc);
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = m(i, j) * a - m(pr, j) * b;
        }
        ++pr;
        ++rank;
    }
    return rank;
}

// All elements of prod Z/orders as exponent vectors.
std::vector<std::vector<long long>> enumerate_group(const std::vector<long long>& orders) {
    std::vector<std::vector<long long>> out{{}};
    for (long long n : orders) {
        std::vector<std::vector<long long>> next;
        for (const auto& v : out)
            for (long long x = 0; x < n; ++x) {
                auto w = v;
                w.push_back(x);
                next.push_back(std::move(w));
            }
        out = std::move(next);
    }
    return out;
}

// Structure of a finite abelian group given by generators-with-orders and a
// brute-force membership set: returns sorted elementary divisor multiset of
// the subgroup {x : f(x) = 0}.
std::vector<long long> brute_force_kernel_orders(const IntMatrix& f, const std::vector<long long>& src,
                                                 const std::vector<long long>& tgt) {
    auto elements = enumerate_group(src);
    std::vector<std::vector<long long>> kernel;
    for (const auto& x : elements) {
        bool zero = true;
        for (std::size_t j = 0; j < tgt.size() && zero; ++j) {
            Int acc = 0;
            for (std::size_t i = 0; i < src.size(); ++i) acc += f(j, i) * x[i];
            if (acc % tgt[j] != 0) zero = false;
        }
        if (zero) kernel.push_back(x);
    }
    // element order = lcm over coordinates of src_i / gcd(src_i, x_i)
    std::vector<long long> orders;
    for (const auto& x : kernel) {
        long long ord = 1;
        for (std::size_t i = 0; i < src.size(); ++i) {
            long long oi = src[i] / std::gcd(src[i], x[i]);
            ord = std::lcm(ord, oi);
        }
        orders.push_back(ord);
    }
    std::sort(orders.begin(), orders.end());
    return orders;
}

std::vector<long long> group_element_orders(const FiniteAbelianGroup& g) {
    REQUIRE(g.is_finite());
    std::vector<long long> factors;
    for (const Int& d : g.invariant_factors()) factors.push_back(static_cast<long long>(d));
    auto elements = enumerate_group(factors);
    std::vector<long long> orders;
    for (const auto& x : elements) {
        long long ord = 1;
        for (std::size_t i = 0; i < factors.size(); ++i) ord = std::lcm(ord, factors[i] / std::gcd(factors[i], x[i]));
        orders.push_back(ord);
    }
    std::sort(orders.begin(), orders.end());
    return orders;
}

}  // namespace

TEST_CASE("smith normal form: determinant-divisor oracle on [[2,4],[4,4]]") {
    IntMatrix a(2, 2, {2, 4, 4, 4});
    auto snf = smith_normal_form(a);
    // d1 = gcd of all entries, d1*d2 = |det|
    CHECK(gcd_all(a) == 2);
    CHECK(a.determinant() == -8);
    CHECK(snf.d(0, 0) == 2);
    CHECK(snf.d(1, 1) == 4);
    CHECK(snf.u * a * snf.v == snf.d);
}

TEST_CASE("smith normal form: identity and zero") {
    auto id = smith_normal_form(IntMatrix::identity(4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(id.d(i, i) == 1);
    auto zero = smith_normal_form(IntMatrix(3, 5));
    CHECK(zero.d.is_zero());
    CHECK(zero.rank() == 0);
}

TEST_CASE("smith normal form: random reconstruction and divisibility chain") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
        IntMatrix a = random_matrix(rng, r, c, -9, 9);
        auto snf = smith_normal_form(a);
        CHECK(snf.u * a * snf.v == snf.d);
        CHECK(divisibility_chain_ok(snf.diagonal()));
        Int du = snf.u.determinant(), dv = snf.v.determinant();
        CHECK((du == 1 || du == -1));
        CHECK((dv == 1 || dv == -1));
        // off-diagonal clean
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (i != j) CHECK(snf.d(i, j) == 0);
        // invariants-only path agrees
        CHECK(smith_invariants(a) == snf.diagonal());
        // deterministic
        auto again = smith_normal_form(a);
        CHECK(again.u == snf.u);
        CHECK(again.v == snf.v);
        CHECK(again.d == snf.d);
    }
}

namespace {

// Independent oracle: the k-th determinantal divisor D_k (gcd of all k x k
// minors) satisfies d_k = D_k / D_{k-1}.
std::vector<Int> determinantal_divisor_invariants(const IntMatrix& a) {
    std::size_t n = std::min(a.rows(), a.cols());
    std::vector<Int> dd(n + 1);
    dd[0] = 1;
    std::vector<std::size_t> rows_idx(a.rows()), cols_idx(a.cols());
    for (std::size_t k = 1; k <= n; ++k) {
        Int g = 0;
        // all k-subsets of rows and columns
        std::vector<std::size_t> rsel(k), csel(k);
        std::function<void(std::size_t, std::size_t)> rows_rec = [&](std::size_t start, std::size_t depth) {
            if (depth == k) {
                std::function<void(std::size_t, std::size_t)> cols_rec = [&](std::size_t cstart, std::size_t cdepth) {
                    if (cdepth == k) {
                        IntMatrix minor(k, k);
                        for (std::size_t i = 0; i < k; ++i)
                            for (std::size_t j = 0; j < k; ++j) minor(i, j) = a(rsel[i], csel[j]);
                        g = boost::multiprecision::gcd(g, minor.determinant());
                        return;
                    }
                    for (std::size_t c = cstart; c < a.cols(); ++c) {
                        csel[cdepth] = c;
                        cols_rec(c + 1, cdepth + 1);
                    }
                };
                cols_rec(0, 0);
                return;
            }
            for (std::size_t r = start; r < a.rows(); ++r) {
                rsel[depth] = r;
                rows_rec(r + 1, depth + 1);
            }
        };
        rows_rec(0, 0);
        dd[k] = g;
    }
    std::vector<Int> out(n);
    for (std::size_t k = 1; k <= n; ++k) {
        if (dd[k] == 0) {
            out[k - 1] = 0;  // rank < k; all later divisors vanish too
        } else {
            out[k - 1] = dd[k] / dd[k - 1];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("smith invariants match the determinantal-divisor oracle") {
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
        IntMatrix a = random_matrix(rng, r, c, -3, 3);
        CHECK(smith_invariants(a) == determinantal_divisor_invariants(a));
    }
}

TEST_CASE("sparse smith invariants agree with dense") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
        IntMatrix a = random_matrix(rng, r, c, -4, 4);
        auto dense = smith_invariants(a);
        std::vector<Int> dense_nontrivial;
        std::size_t dense_rank = 0;
        for (const Int& d : dense)
            if (d != 0) {
                ++dense_rank;
                if (d > 1) dense_nontrivial.push_back(d);
            }
        auto [rank, nontrivial] = sparse_smith_invariants(SparseIntMatrix(a));
        CHECK(rank == dense_rank);
        CHECK(nontrivial == dense_nontrivial);
    }
}

TEST_CASE("homology: circle") {
    // Z ->0-> Z in degrees 1 -> 0
    IntMatrix d1(1, 1, {0});
    IntegerChainComplex c({d1});
    auto h = homology(c);
    REQUIRE(h.size() == 2);
    CHECK(h[0] == FiniteAbelianGroup::free(1));
    CHECK(h[1] == FiniteAbelianGroup::free(1));
}

TEST_CASE("homology: normalized chains of Delta^2/boundary") {
    // One 0-cell, no 1-cells, one 2-cell; both boundaries are zero maps.
    std::vector<std::size_t> dims{1, 0, 1};
    std::vector<SparseIntMatrix> bnd{SparseIntMatrix(1, 0), SparseIntMatrix(0, 1)};
    IntegerChainComplex c(dims, bnd);
    auto h = homology(c);
    REQUIRE(h.size() == 3);
    CHECK(h[0] == FiniteAbelianGroup::free(1));
    CHECK(h[1] == FiniteAbelianGroup::trivial());
    CHECK(h[2] == FiniteAbelianGroup::free(1));
}

TEST_CASE("homology: multiplication by 2") {
    IntMatrix d1(1, 1, {2});
    IntegerChainComplex c({d1});
    auto h = homology(c);
    CHECK(h[0] == FiniteAbelianGroup::cyclic(2));
    CHECK(h[1] == FiniteAbelianGroup::trivial());
}

TEST_CASE("homology rejects dd != 0") {
    IntMatrix d1(1, 1, {1}), d2(1, 1, {1});
    CHECK_THROWS_AS(IntegerChainComplex({d1, d2}), ComplexInvalid);
}

TEST_CASE("homology agrees with rational rank + torsion enumeration") {
    // Random small complexes C_2 -> C_1 -> C_0 built as d1 = A*B, d2 = ...
    // constructing valid complexes by zero composition: take d2 arbitrary and
    // d1 a matrix with d1*d2 = 0 found by using d1 = kernel relations of d2^T.
    // Simpler: build d2 arbitrary and d1 = 0, plus complexes with d2 = 0.
    std::mt19937 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n0 = 1 + rng() % 4, n1 = 1 + rng() % 4;
        IntMatrix d1 = random_matrix(rng, n0, n1, -3, 3);
        IntegerChainComplex c({d1});
        auto h = homology(c);
        std::size_t r = rational_rank(d1);
        CHECK(h[1].free_rank() == n1 - r);
        CHECK(h[1].invariant_factors().empty());
        CHECK(h[0].free_rank() == n0 - r);
        Int torsion_order = 1;
        for (const Int& d : h[0].invariant_factors()) torsion_order *= d;
        // torsion order via the independent determinantal-divisor route
        Int expected = 1;
        for (const Int& d : determinantal_divisor_invariants(d1))
            if (d != 0) expected *= d;
        CHECK(torsion_order == expected);
    }
}

TEST_CASE("kernel_cokernel: identity and zero maps on Z/4") {
    std::vector<Int> four{4};
    auto [k1, c1] = kernel_cokernel(IntMatrix(1, 1, {1}), four, four);
    CHECK(k1.is_trivial());
    CHECK(c1.is_trivial());
    auto [k2, c2] = kernel_cokernel(IntMatrix(1, 1, {0}), four, four);
    CHECK(k2 == FiniteAbelianGroup::cyclic(4));
    CHECK(c2 == FiniteAbelianGroup::cyclic(4));
}

TEST_CASE("kernel_cokernel: Z/4 + Z/2 -> Z/2, (x,y) -> x+y") {
    IntMatrix f(1, 2, {1, 1});
    auto [k, c] = kernel_cokernel(f, {Int(4), Int(2)}, {Int(2)});
    CHECK(k == FiniteAbelianGroup::cyclic(4));
    CHECK(c.is_trivial());
}

TEST_CASE("kernel_cokernel: empty source") {
    auto [k, c] = kernel_cokernel(IntMatrix(2, 0), {}, {Int(4), Int(2)});
    CHECK(k.is_trivial());
    CHECK(c == FiniteAbelianGroup::from_orders({Int(4), Int(2)}));
}

TEST_CASE("kernel_cokernel: shape mismatch raises") {
    CHECK_THROWS_AS(kernel_cokernel(IntMatrix(1, 1, {1}), {Int(2), Int(2)}, {Int(2)}), IncompatibleShapes);
}

TEST_CASE("kernel_cokernel agrees with exhaustive enumeration, orders <= 256") {
    std::mt19937 rng(4242);
    std::vector<std::vector<long long>> source_shapes{{2, 2, 2}, {4, 2}, {8, 4}, {3, 3}, {9, 3}, {4, 4, 2}, {16},
                                                      {2, 2, 2, 2}, {27, 3}, {5, 5}, {8, 8, 2}};
    std::vector<std::vector<long long>> target_shapes{{2}, {4, 2}, {8}, {3, 9}, {2, 2}, {4}, {16, 2}, {5}, {25}};
    for (const auto& src : source_shapes) {
        for (const auto& tgt : target_shapes) {
            long long order = 1;
            for (long long x : src) order *= x;
            if (order > 256) continue;
            // only p-groups mapping to matching prime targets make sense here;
            // mixed primes are still legal inputs, enumeration covers them.
            for (int trial = 0; trial < 3; ++trial) {
                IntMatrix f(tgt.size(), src.size());
                for (std::size_t j = 0; j < tgt.size(); ++j)
                    for (std::size_t i = 0; i < src.size(); ++i) {
                        // entry must give a homomorphism: b_j | a_i * f_ji
                        long long step = tgt[j] / std::gcd<long long>(tgt[j], src[i]);
                        long long max_mult = tgt[j] / step;
                        f(j, i) = step * (rng() % max_mult);
                    }
                auto [k, c] = kernel_cokernel(f, std::vector<Int>(src.begin(), src.end()),
                                              std::vector<Int>(tgt.begin(), tgt.end()));
                auto brute = brute_force_kernel_orders(f, src, tgt);
                CHECK(k.order() == Int(brute.size()));
                CHECK(group_element_orders(k) == brute);
                // |coker| = |target| * |ker| / |source|
                Int tgt_order = 1, src_order = 1;
                for (long long x : tgt) tgt_order *= x;
                for (long long x : src) src_order *= x;
                CHECK(c.order() * src_order == tgt_order * k.order());
            }
        }
    }
}

TEST_CASE("finite abelian group canonicalization") {
    auto g = FiniteAbelianGroup::from_orders({Int(4), Int(2), Int(3)});
    // Z/4 + Z/2 + Z/3 = Z/2 + Z/12
    REQUIRE(g.invariant_factors().size() == 2);
    CHECK(g.invariant_factors()[0] == 2);
    CHECK(g.invariant_factors()[1] == 12);
    CHECK(g.order() == 24);
    CHECK(g.to_string() == "Z/2 + Z/12");
    CHECK(FiniteAbelianGroup::from_orders({Int(1), Int(1)}).is_trivial());
    CHECK(FiniteAbelianGroup::cyclic(1).is_trivial());
    CHECK(FiniteAbelianGroup::free(2).to_string() == "Z^2");
}
