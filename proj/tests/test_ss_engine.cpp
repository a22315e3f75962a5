#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cyclobar/cyclic_bar.hpp"
#include "cyclobar/ss_engine.hpp"

using namespace cyclobar;
using namespace cyclobar::ss;
using linalg::FiniteAbelianGroup;

TEST_CASE("e2 page basis solves the degree equation") {
    Page tate(1, 2, Mode::tate);
    // odd degree 3: z-monomials t^j x^j z; the killing y-monomials sit in degree 4
    auto deg3 = tate.basis_in_degree(3, -3, 3);
    REQUIRE(deg3.size() == 4);  // x-exponent = t-exponent >= 0 cuts the window
    for (const auto& mon : deg3) {
        CHECK(mon.gen == Gen::z);
        CHECK(mon.x_exp == mon.t_exp);
        CHECK(mon.total_degree() == 3);
    }
    auto deg4 = tate.basis_in_degree(4, -3, 3);
    for (const auto& mon : deg4) {
        CHECK(mon.gen == Gen::y);
        CHECK(mon.x_exp == mon.t_exp + 1);
    }

    // hfp truncation: degree 2 basis is t^j x^j y for all j >= 0
    Page hfp(1, 2, Mode::hfp);
    auto deg2 = hfp.basis_in_degree(2, -5, 5);
    REQUIRE(deg2.size() == 6);  // j = 0..5
    for (const auto& mon : deg2) {
        CHECK(mon.gen == Gen::y);
        CHECK(mon.t_exp >= 0);
        CHECK(mon.x_exp == mon.t_exp);
    }

    // parity split: y-monomials have even total degree, z-monomials odd
    for (long long d = -4; d <= 8; ++d)
        for (const auto& mon : tate.basis_in_degree(d, -4, 4))
            CHECK((mon.total_degree() % 2 != 0) == (mon.gen == Gen::z));
}

TEST_CASE("weight zero is rejected") { CHECK_THROWS_AS(e2_page(0, 2, Mode::tate), WeightZero); }

TEST_CASE("differential family and bidegree shift") {
    for (long long p : {2ll, 3ll}) {
        for (long long m : {1ll, 2ll, 4ll, 6ll, 9ll, 12ll}) {
            Page page(m, p, Mode::tate);
            int v = page.valuation();
            Monomial y{3, 2, Gen::y, m};
            auto target = page.differential(y);
            REQUIRE(target.has_value());
            CHECK(target->t_exp == 3 + v + 1);
            CHECK(target->x_exp == 2 + v);
            CHECK(target->gen == Gen::z);
            CHECK(target->total_degree() == y.total_degree() - 1);
            // z-generators are infinite cycles
            CHECK(!page.differential(*target).has_value());
            CHECK(page.differential_preimage(*target) == y);
        }
    }
}

TEST_CASE("E-infinity: weight prime to p gives an empty Tate page") {
    // m = 1: v = 0, the Tate spectral sequence converges to zero
    Page tate(1, 2, Mode::tate);
    auto table = run_to_e_infinity(tate, -20, 40);
    CHECK(table.counts.empty());

    // hfp: E-infinity = k[x]{z}, one class in each degree 2r+1, r >= 1
    Page hfp(1, 2, Mode::hfp);
    auto ht = run_to_e_infinity(hfp, -20, 40);
    for (long long d = -20; d <= 40; ++d) {
        std::size_t expect = 0;
        if (d % 2 != 0 && d >= 3) expect = 1;  // degree 2r+1 with r >= m = 1
        CHECK(ht.count(d) == expect);
    }
}

TEST_CASE("E-infinity closed forms for m = 2, p = 2") {
    // v = 1: Tate count 1 in every odd degree; hfp 2 for r >= 2, 1 for r < 2
    Page tate(2, 2, Mode::tate);
    auto tt = run_to_e_infinity(tate, -11, 41);
    for (long long d = -11; d <= 41; ++d) CHECK(tt.count(d) == (d % 2 != 0 ? 1u : 0u));
    Page hfp(2, 2, Mode::hfp);
    auto ht = run_to_e_infinity(hfp, -11, 41);
    for (long long r = -5; 2 * r + 1 <= 41; ++r) {
        std::size_t expect = r >= 2 ? 2 : 1;
        if (r < 0) expect = 1;  // r < m keeps the v survivors
        CHECK(ht.count(2 * r + 1) == expect);
    }
}

TEST_CASE("survivor counts match the closed forms over a parameter grid") {
    for (long long p : {2ll, 3ll}) {
        for (long long mp : {1ll, 2ll, 3ll}) {
            if (mp % p == 0) continue;
            long long m = mp;
            for (int v = 0; v <= 3; ++v, m *= p) {
                long long weight = m;
                Page tate(weight, p, Mode::tate), hfp(weight, p, Mode::hfp);
                CHECK(tate.valuation() == v);
                auto tt = run_to_e_infinity(tate, 1, 81);
                auto ht = run_to_e_infinity(hfp, 1, 81);
                for (long long r = 0; 2 * r + 1 <= 81; ++r) {
                    CHECK(tt.count(2 * r + 1) == static_cast<std::size_t>(v));
                    std::size_t expect = (weight <= r) ? v + 1 : v;
                    CHECK(ht.count(2 * r + 1) == expect);
                    CHECK(tt.count(2 * r) == 0);
                    CHECK(ht.count(2 * r) == 0);
                }
            }
        }
    }
}

TEST_CASE("canonical map comparison: bijection iff r < m") {
    CHECK(can_comparison(2, 2, 1));
    CHECK(!can_comparison(2, 2, 3));
    for (long long r = 1; r <= 6; ++r) CHECK(!can_comparison(1, 2, r));
    for (long long p : {2ll, 3ll})
        for (long long m : {1ll, 2ll, 3ll, 4ll, 6ll, 9ll})
            for (long long r = 0; r <= 12; ++r) CHECK(can_comparison(m, p, r) == (r < m));
}

TEST_CASE("page generators sit in the degrees computed by the bar homology") {
    // y_m and z_m have total degrees 2m and 2m+1; these are exactly the
    // degrees where the weight-m summand has reduced homology
    for (long long m : {1ll, 2ll}) {
        auto h = bar::homology_B(m);
        std::vector<long long> nonzero;
        for (std::size_t n = 0; n < h.size(); ++n)
            if (!h[n].is_trivial()) nonzero.push_back(static_cast<long long>(n));
        Monomial y{0, 0, Gen::y, m}, z{0, 0, Gen::z, m};
        CHECK(nonzero == std::vector<long long>{y.total_degree(), z.total_degree()});
    }
}

TEST_CASE("assemble cyclic groups from survivor counts") {
    SurvivorTable t;
    t.counts[7] = 2;
    t.counts[5] = 0;
    t.counts[3] = 1;
    auto g2 = assemble_cyclic(t, 2);
    CHECK(g2.at(7) == FiniteAbelianGroup::cyclic(4));
    CHECK(g2.at(5).is_trivial());
    auto g3 = assemble_cyclic(t, 3);
    CHECK(g3.at(3) == FiniteAbelianGroup::cyclic(3));
}
