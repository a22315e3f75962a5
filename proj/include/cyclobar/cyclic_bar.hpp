#pragma once

#include "cyclobar/exact_linalg.hpp"
#include "cyclobar/simplicial.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cyclobar::bar {

using simplicial::FinitePointedSimplicialSet;
using simplicial::Simplex;

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded(long long weight, const std::string& what) : std::runtime_error(what), weight(weight) {}
    long long weight;
};

/// Weight cap for the combinatorially explosive constructions.  Operations
/// fail loudly instead of truncating.
struct Budget {
    long long max_weight = 3;
};

// Delta^2 / boundary: one nondegenerate basepoint, one nondegenerate 2-cell.
FinitePointedSimplicialSet sphere_model();
// The two-point pointed set S^0 (basepoint and the monoid unit).
FinitePointedSimplicialSet zero_sphere();
// Just the basepoint.
FinitePointedSimplicialSet point();

struct SmashResult {
    FinitePointedSimplicialSet space;
    // factors[degree][cell] = the (x, y) pair of factor simplices; entry 0 of
    // degree 0 is the basepoint and carries no pair.
    std::vector<std::vector<std::pair<Simplex, Simplex>>> factors;
};

// Levelwise smash product (X_n x Y_n) / (X_n v Y_n), nondegenerate cells
// recovered by Eilenberg-Zilber normal form.
SmashResult smash(const FinitePointedSimplicialSet& x, const FinitePointedSimplicialSet& y);

/// Bisimplex of the weight-graded cyclic bar construction b'(m) on the free
/// monoid on the sphere model.  `composition` lists the weight in each of the
/// s+1 bar slots; `words` holds one degeneracy mask (repeat set of the
/// surjection [q] ->> [2]) per sphere factor, in slot order.
struct BarSimplex {
    bool basepoint = false;
    std::uint32_t internal_degree = 0;
    std::vector<std::uint8_t> composition;
    std::vector<std::uint32_t> words;

    std::uint32_t cyclic_degree() const { return static_cast<std::uint32_t>(composition.size()) - 1; }
    long long weight() const;
    bool operator==(const BarSimplex& rhs) const = default;
};

/// Structure maps of b'(m): Hochschild faces multiply adjacent monoid factors
/// (the last one rotates), degeneracies insert units, t is the cyclic
/// rotation; internal maps act on the sphere coordinates and may collapse to
/// the basepoint.
class CyclicBarComplex {
  public:
    explicit CyclicBarComplex(long long m);

    long long weight() const { return m_; }

    // Wedge summands of cyclic degree s: weak compositions of m into s+1 parts.
    std::vector<std::vector<std::uint8_t>> level_summands(std::uint32_t s) const;

    BarSimplex cyc_face(const BarSimplex& z, std::uint32_t i) const;
    BarSimplex cyc_degeneracy(const BarSimplex& z, std::uint32_t i) const;
    BarSimplex rotate(const BarSimplex& z) const;
    BarSimplex int_face(const BarSimplex& z, std::uint32_t i) const;
    BarSimplex int_degeneracy(const BarSimplex& z, std::uint32_t i) const;

    // Diagonal structure maps: both directions at the same index.
    BarSimplex diag_face(const BarSimplex& z, std::uint32_t i) const;
    BarSimplex diag_degeneracy(const BarSimplex& z, std::uint32_t i) const;
    bool diag_degenerate_at(const BarSimplex& z, std::uint32_t i) const;
    bool diag_nondegenerate(const BarSimplex& z) const;

    // Nondegenerate non-basepoint diagonal cells at level n, canonically ordered.
    std::vector<BarSimplex> diagonal_cells(std::uint32_t n) const;

  private:
    long long m_;
};

// Diagonal of the bisimplicial set b'(m) as a finite pointed simplicial set.
FinitePointedSimplicialSet diagonal_realization(long long m, const Budget& budget = {});

// Reduced homology of the diagonal; the weight-m summand has Z in degrees 2m
// and 2m+1 for m >= 1, and B(0) is the sphere summand with Z in degree 0.
std::vector<linalg::FiniteAbelianGroup> homology_B(long long m, const Budget& budget = {});

/// p-fold edgewise subdivision of b'(m): sd level l is cyclic level p(l+1)-1,
/// with the C_p-action rotating blocks of l+1 bar slots.
class SubdividedComplex {
  public:
    SubdividedComplex(long long m, long long p, const Budget& budget = {});

    long long weight() const { return m_; }
    long long prime() const { return p_; }

    std::uint32_t sd_level(const BarSimplex& z) const;

    BarSimplex sd_face(const BarSimplex& z, std::uint32_t i) const;
    BarSimplex sd_degeneracy(const BarSimplex& z, std::uint32_t i) const;
    // C_p generator: cyclic rotation by l+1 slots at sd level l.
    BarSimplex action(const BarSimplex& z) const;

    BarSimplex diag_face(const BarSimplex& z, std::uint32_t i) const;
    BarSimplex diag_degeneracy(const BarSimplex& z, std::uint32_t i) const;
    bool diag_nondegenerate(const BarSimplex& z) const;

    std::vector<BarSimplex> diagonal_cells(std::uint32_t n) const;
    linalg::IntegerChainComplex diagonal_chain_complex() const;  // reduced
    std::vector<linalg::FiniteAbelianGroup> diagonal_homology() const;

    const CyclicBarComplex& bar() const { return bar_; }

  private:
    long long m_, p_;
    CyclicBarComplex bar_;
};

SubdividedComplex subdivide(long long m, long long p, const Budget& budget = {});

// True iff the C_p-action on non-basepoint simplices of every level of the
// subdivision is free; holds exactly when p does not divide m.
bool check_free_action(long long m, long long p);

enum class Coeff { integers, prime_field };

// Tor over the polynomial ring on one degree-2 generator, of the ground ring
// with itself, via the two-term Koszul complex.  Keys are (homological
// degree, internal degree); only nonzero groups are listed.
std::map<std::pair<int, int>, linalg::FiniteAbelianGroup> koszul_tor(Coeff ring, long long p = 0,
                                                                     int max_internal_degree = 12);

}  // namespace cyclobar::bar
