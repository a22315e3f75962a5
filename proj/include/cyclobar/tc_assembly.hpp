#pragma once

#include "cyclobar/exact_linalg.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cyclobar::tc {

struct DivisibleWeight : std::runtime_error {
    explicit DivisibleWeight(const std::string& what) : std::runtime_error(what) {}
};
struct TruncationTooSmall : std::runtime_error {
    explicit TruncationTooSmall(const std::string& what) : std::runtime_error(what) {}
};

// Smallest v >= 0 with r < p^v m'; equivalently #{v >= 0 : p^v m' <= r}.
// Both characterizations are computed and compared.
int s_parameter(long long mprime, long long r, long long p);

/// One odd degree 2r+1 of the relative theory: the (m', s) entries and the
/// assembled group over F_p.
struct KTableRow {
    long long r = 0;
    long long degree = 1;  // 2r+1
    std::vector<std::pair<long long, int>> entries;
    linalg::FiniteAbelianGroup group;
};

KTableRow tc_groups(long long r, long long p);

// Relative K-theory in degree 2r+1; identical to tc_groups and cross-checked
// against the big Witt decomposition entry-by-entry.
linalg::FiniteAbelianGroup k_relative(long long r, long long p);

// Any-degree accessor: odd degrees defer to k_relative, even degrees are trivial.
linalg::FiniteAbelianGroup k_relative_in_degree(long long degree, long long p);

/// Truncated tower of one weight class m': levels v = 0..vmax with the
/// odd-degree cyclic lengths of TC^-(p^v m') and TP(p^v m') in degree 2r+1,
/// read off the spectral sequence engine.
struct WeightTower {
    long long mprime = 1, r = 0, p = 2;
    int s = 0;     // kernel length parameter
    int vmax = 1;  // levels 0..vmax
    std::vector<int> tc_minus_lengths;  // a_v
    std::vector<int> tp_lengths;        // b_v
};

// extra_levels raises the truncation above the default guard level.
WeightTower build_weight_tower(long long mprime, long long r, long long p, int extra_levels = 0);

/// Unit scalars for the phi and can components; the maps are pinned only up
/// to units, and the kernel must not depend on the choice.
struct UnitChoices {
    std::vector<long long> phi_units;  // one per level v (used where phi is an iso)
    std::vector<long long> can_units;  // one per level v

    static UnitChoices ones(std::size_t levels);
    static UnitChoices random(std::size_t levels, long long p, std::uint64_t seed);
};

// The phi - can matrix on tower generators: can on the diagonal, phi one level
// up where p^v m' <= r, zero elsewhere.
linalg::IntMatrix phi_can_matrix(const WeightTower& tower, const UnitChoices& units);

std::vector<Int> tower_source_orders(const WeightTower& tower);
std::vector<Int> tower_target_orders(const WeightTower& tower);

// Kernel of the truncated phi - can map, computed by Smith normal form on the
// presentation; the contract is Z/p^{s(m')} independent of the unit choices.
linalg::FiniteAbelianGroup phi_can_kernel(long long mprime, long long r, long long p, const UnitChoices& units,
                                          int extra_levels = 0);
linalg::FiniteAbelianGroup phi_can_kernel(long long mprime, long long r, long long p);

// Cokernel of the same map; the surjectivity of phi - can makes it vanish.
linalg::FiniteAbelianGroup phi_can_cokernel(long long mprime, long long r, long long p, const UnitChoices& units,
                                            int extra_levels = 0);

// The explicit section of the kernel: the identity into level s, then
// descent by can followed by the inverse of phi.  Returns the tower element
// representing the image of `value` in Z/p^s.
std::vector<Int> kernel_section(const WeightTower& tower, const UnitChoices& units, const Int& value);

// Image of a tower element under phi - can, componentwise mod the target orders.
std::vector<Int> apply_phi_can(const WeightTower& tower, const UnitChoices& units, const std::vector<Int>& x);

/// Coefficientwise comparison of the weight-decomposition Poincare series
/// with the closed ring-structure answer, through degree max_degree.
struct SeriesReport {
    int max_degree = 0;
    std::vector<Int> decomposition_side;
    std::vector<Int> ring_side;
    bool equal = false;
};

SeriesReport iterated_thh_series(int max_degree);

}  // namespace cyclobar::tc
