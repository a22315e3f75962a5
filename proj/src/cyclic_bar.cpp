#include "cyclobar/cyclic_bar.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_map>

namespace cyclobar::bar {

using linalg::FiniteAbelianGroup;
using cyclobar::Int;
using linalg::IntegerChainComplex;
using linalg::IntMatrix;
using linalg::SparseIntMatrix;
namespace ez = simplicial::ez;

namespace {

bool is_prime(long long p) {
    if (p < 2) return false;
    for (long long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

// Subsets of {0..n-1} with the given popcount, ascending as integers.
std::vector<std::uint32_t> masks_with_popcount(std::uint32_t n, std::uint32_t k) {
    std::vector<std::uint32_t> out;
    if (k > n) return out;
    if (k == 0) {
        out.push_back(0);
        return out;
    }
    std::uint32_t mask = (1u << k) - 1;
    std::uint32_t limit = 1u << n;
    while (mask < limit) {
        out.push_back(mask);
        std::uint32_t c = mask & -mask, r = mask + c;  // Gosper's hack
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    return out;
}

void compositions_rec(long long rem, std::size_t slot, std::vector<std::uint8_t>& cur,
                      std::vector<std::vector<std::uint8_t>>& out) {
    if (slot + 1 == cur.size()) {
        cur[slot] = static_cast<std::uint8_t>(rem);
        out.push_back(cur);
        return;
    }
    for (long long v = 0; v <= rem; ++v) {
        cur[slot] = static_cast<std::uint8_t>(v);
        compositions_rec(rem - v, slot + 1, cur, out);
    }
}

std::vector<std::vector<std::uint8_t>> weak_compositions(long long m, std::size_t slots) {
    std::vector<std::vector<std::uint8_t>> out;
    if (slots == 0) return out;
    std::vector<std::uint8_t> cur(slots, 0);
    compositions_rec(m, 0, cur, out);
    return out;
}

std::string cell_key(const BarSimplex& z) {
    std::string key;
    key.reserve(z.composition.size() + 1 + 4 * z.words.size());
    for (std::uint8_t c : z.composition) key.push_back(static_cast<char>(c));
    key.push_back('\xff');
    for (std::uint32_t w : z.words)
        for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((w >> (8 * b)) & 0xff));
    return key;
}

}  // namespace

FinitePointedSimplicialSet sphere_model() {
    FinitePointedSimplicialSet::Builder b(2);
    std::uint32_t sigma = b.add_cell(2, "sigma");
    for (std::uint32_t i = 0; i <= 2; ++i) b.set_face(2, sigma, i, Simplex{0, 0, 1});  // collapsed boundary
    return std::move(b).build();
}

FinitePointedSimplicialSet zero_sphere() {
    FinitePointedSimplicialSet::Builder b(0);
    b.add_cell(0, "e");
    return std::move(b).build();
}

FinitePointedSimplicialSet point() {
    FinitePointedSimplicialSet::Builder b(0);
    return std::move(b).build();
}

SmashResult smash(const FinitePointedSimplicialSet& x, const FinitePointedSimplicialSet& y) {
    const std::uint32_t top = x.max_degree() + y.max_degree();
    FinitePointedSimplicialSet::Builder builder(top);

    struct PairCell {
        Simplex x, y;
    };
    // per degree: ordered cells and a lookup from encoded pairs
    std::vector<std::vector<PairCell>> cells(top + 1);
    std::vector<std::unordered_map<std::string, std::uint32_t>> index(top + 1);

    auto pair_key = [](const Simplex& a, const Simplex& b) {
        std::string k(32, '\0');
        auto put = [&k](std::size_t at, std::uint64_t v) {
            for (int i = 0; i < 8; ++i) k[at + i] = static_cast<char>((v >> (8 * i)) & 0xff);
        };
        put(0, (static_cast<std::uint64_t>(a.cell) << 32) | a.cell_degree);
        put(8, a.repeats);
        put(16, (static_cast<std::uint64_t>(b.cell) << 32) | b.cell_degree);
        put(24, b.repeats);
        return k;
    };

    for (std::uint32_t n = 0; n <= top; ++n) {
        for (std::uint32_t dx = 0; dx <= std::min(n, x.max_degree()); ++dx) {
            std::uint32_t kx = n - dx;
            auto rx_masks = masks_with_popcount(n, kx);
            for (std::uint32_t cx = (dx == 0 ? 1 : 0); cx < x.cell_count(dx); ++cx) {
                for (std::uint32_t dy = 0; dy <= std::min(n, y.max_degree()); ++dy) {
                    std::uint32_t ky = n - dy;
                    if (kx + ky > n) continue;  // repeat sets cannot be disjoint
                    for (std::uint32_t cy = (dy == 0 ? 1 : 0); cy < y.cell_count(dy); ++cy) {
                        for (std::uint32_t rx : rx_masks) {
                            // choose the y-repeats inside the complement of rx
                            std::vector<std::uint32_t> free_pos;
                            for (std::uint32_t j = 0; j < n; ++j)
                                if (((rx >> j) & 1) == 0) free_pos.push_back(j);
                            for (std::uint32_t sub : masks_with_popcount(static_cast<std::uint32_t>(free_pos.size()), ky)) {
                                std::uint64_t ry = 0;
                                for (std::uint32_t t = 0; t < free_pos.size(); ++t)
                                    if ((sub >> t) & 1) ry |= (1ull << free_pos[t]);
                                Simplex sx{cx, dx, rx}, sy{cy, dy, ry};
                                PairCell cell{sx, sy};
                                std::uint32_t id = builder.add_cell(n, "");
                                index[n].emplace(pair_key(sx, sy), id);
                                cells[n].push_back(cell);
                                (void)id;
                            }
                        }
                    }
                }
            }
        }
    }

    // Face tables.  The basepoint pair collapses; a common degeneracy factors
    // out as the repeat set of the smash face.
    for (std::uint32_t n = 1; n <= top; ++n) {
        for (std::uint32_t c = 0; c < cells[n].size(); ++c) {
            std::uint32_t cell_id = c + (n == 0 ? 1 : 0);
            for (std::uint32_t i = 0; i <= n; ++i) {
                Simplex fx = x.face(cells[n][c].x, i);
                Simplex fy = y.face(cells[n][c].y, i);
                Simplex value;
                if (x.is_basepoint(fx) || y.is_basepoint(fy)) {
                    value = Simplex{0, 0, n - 1 == 0 ? 0 : ((1ull << (n - 1)) - 1)};
                } else {
                    std::uint64_t common = fx.repeats & fy.repeats;
                    Simplex qx{fx.cell, fx.cell_degree, ez::quotient_repeats(fx.repeats, common, n - 1)};
                    Simplex qy{fy.cell, fy.cell_degree, ez::quotient_repeats(fy.repeats, common, n - 1)};
                    if ((qx.repeats & qy.repeats) != 0)
                        throw std::logic_error("smash: residual pair is still jointly degenerate");
                    std::uint32_t qdeg = n - 1 - static_cast<std::uint32_t>(std::popcount(common));
                    auto it = index[qdeg].find(pair_key(qx, qy));
                    if (it == index[qdeg].end()) throw std::logic_error("smash: face cell missing");
                    value = Simplex{it->second, qdeg, common};
                }
                builder.set_face(n, cell_id, i, value);
            }
        }
    }

    SmashResult out{std::move(builder).build(), {}};
    out.factors.resize(top + 1);
    for (std::uint32_t n = 0; n <= top; ++n) {
        if (n == 0) out.factors[0].emplace_back();  // basepoint slot
        for (const auto& cell : cells[n]) out.factors[n].emplace_back(cell.x, cell.y);
    }
    return out;
}

long long BarSimplex::weight() const {
    return std::accumulate(composition.begin(), composition.end(), 0ll);
}

CyclicBarComplex::CyclicBarComplex(long long m) : m_(m) {
    if (m < 0) throw std::invalid_argument("CyclicBarComplex: weight must be non-negative");
}

std::vector<std::vector<std::uint8_t>> CyclicBarComplex::level_summands(std::uint32_t s) const {
    return weak_compositions(m_, s + 1);
}

BarSimplex CyclicBarComplex::cyc_face(const BarSimplex& z, std::uint32_t i) const {
    if (z.basepoint) return z;
    std::uint32_t s = z.cyclic_degree();
    if (i > s || s == 0) throw std::out_of_range("cyc_face: index out of range");
    BarSimplex out = z;
    if (i < s) {
        out.composition[i] = static_cast<std::uint8_t>(out.composition[i] + out.composition[i + 1]);
        out.composition.erase(out.composition.begin() + i + 1);
        return out;
    }
    // last face: rotate the final factor to the front and multiply
    std::uint8_t last = out.composition[s];
    out.composition.pop_back();
    out.composition[0] = static_cast<std::uint8_t>(out.composition[0] + last);
    std::rotate(out.words.begin(), out.words.end() - last, out.words.end());
    return out;
}

BarSimplex CyclicBarComplex::cyc_degeneracy(const BarSimplex& z, std::uint32_t i) const {
    if (z.basepoint) return z;
    std::uint32_t s = z.cyclic_degree();
    if (i > s) throw std::out_of_range("cyc_degeneracy: index out of range");
    BarSimplex out = z;
    out.composition.insert(out.composition.begin() + i + 1, 0);
    return out;
}

BarSimplex CyclicBarComplex::rotate(const BarSimplex& z) const {
    if (z.basepoint) return z;
    BarSimplex out = z;
    std::uint8_t last = out.composition.back();
    std::rotate(out.composition.begin(), out.composition.end() - 1, out.composition.end());
    std::rotate(out.words.begin(), out.words.end() - last, out.words.end());
    return out;
}

BarSimplex CyclicBarComplex::int_face(const BarSimplex& z, std::uint32_t i) const {
    BarSimplex out = z;
    out.internal_degree = z.internal_degree - 1;
    if (z.basepoint) return out;
    if (z.internal_degree == 0 || i > z.internal_degree) throw std::out_of_range("int_face: index out of range");
    for (auto& w : out.words) {
        ez::FaceResult fr = ez::face_surjection(w, z.internal_degree, i);
        if (!fr.surjective) {
            // the face of the sphere 2-cell is the collapsed boundary
            BarSimplex base;
            base.basepoint = true;
            base.internal_degree = z.internal_degree - 1;
            return base;
        }
        w = static_cast<std::uint32_t>(fr.repeats);
    }
    return out;
}

BarSimplex CyclicBarComplex::int_degeneracy(const BarSimplex& z, std::uint32_t i) const {
    BarSimplex out = z;
    out.internal_degree = z.internal_degree + 1;
    if (z.basepoint) return out;
    if (i > z.internal_degree) throw std::out_of_range("int_degeneracy: index out of range");
    for (auto& w : out.words) w = static_cast<std::uint32_t>(ez::degeneracy_surjection(w, z.internal_degree, i));
    return out;
}

BarSimplex CyclicBarComplex::diag_face(const BarSimplex& z, std::uint32_t i) const {
    BarSimplex f = int_face(z, i);
    if (f.basepoint) return f;
    return cyc_face(f, i);
}

BarSimplex CyclicBarComplex::diag_degeneracy(const BarSimplex& z, std::uint32_t i) const {
    BarSimplex d = int_degeneracy(z, i);
    if (d.basepoint) return d;
    return cyc_degeneracy(d, i);
}

bool CyclicBarComplex::diag_degenerate_at(const BarSimplex& z, std::uint32_t i) const {
    if (z.basepoint) return true;
    // in the image of s_i in both directions: a unit in slot i+1 and a common
    // repeat position i in every sphere word
    if (z.composition[i + 1] != 0) return false;
    for (std::uint32_t w : z.words)
        if (((w >> i) & 1) == 0) return false;
    return true;
}

bool CyclicBarComplex::diag_nondegenerate(const BarSimplex& z) const {
    if (z.basepoint) return false;
    if (z.cyclic_degree() != z.internal_degree)
        throw std::invalid_argument("diag_nondegenerate: not a diagonal simplex");
    for (std::uint32_t i = 0; i < z.internal_degree; ++i)
        if (diag_degenerate_at(z, i)) return false;
    return true;
}

std::vector<BarSimplex> CyclicBarComplex::diagonal_cells(std::uint32_t n) const {
    std::vector<BarSimplex> out;
    if (m_ == 0) {
        if (n == 0) {
            BarSimplex unit;
            unit.internal_degree = 0;
            unit.composition = {0};
            out.push_back(std::move(unit));
        }
        return out;
    }
    if (n < 2) return out;

    const std::size_t factors = static_cast<std::size_t>(m_);
    auto masks = masks_with_popcount(n, n - 2);
    std::vector<std::size_t> odo(factors, 0);
    std::vector<std::uint32_t> words(factors);
    for (;;) {
        std::uint32_t t_mask = 0xffffffffu >> (32 - n);
        for (std::size_t f = 0; f < factors; ++f) {
            words[f] = masks[odo[f]];
            t_mask &= words[f];
        }
        long long forced = std::popcount(t_mask);
        if (forced <= m_) {
            for (auto& base : weak_compositions(m_ - forced, n + 1)) {
                BarSimplex z;
                z.internal_degree = n;
                z.composition = base;
                for (std::uint32_t i = 0; i < n; ++i)
                    if ((t_mask >> i) & 1) ++z.composition[i + 1];
                z.words = words;
                out.push_back(std::move(z));
            }
        }
        std::size_t f = 0;
        while (f < factors && ++odo[f] == masks.size()) odo[f++] = 0;
        if (f == factors) break;
    }
    std::sort(out.begin(), out.end(), [](const BarSimplex& a, const BarSimplex& b) {
        if (a.composition != b.composition) return a.composition < b.composition;
        return a.words < b.words;
    });
    return out;
}

namespace {

// EZ normal form of a diagonal bar simplex: strips degeneracies, returning the
// accumulated surjection and the nondegenerate representative.
template <typename Complex>
std::pair<std::uint64_t, BarSimplex> diag_normal_form(const Complex& cx, BarSimplex z) {
    std::uint32_t n = z.internal_degree;
    std::vector<std::uint32_t> gamma(n + 1);
    for (std::uint32_t j = 0; j <= n; ++j) gamma[j] = j;
    for (;;) {
        std::uint32_t q = z.internal_degree;
        std::uint32_t strip_at = q;
        for (std::uint32_t i = 0; i < q; ++i) {
            BarSimplex f = cx.diag_face(z, i);
            if (!f.basepoint && cx.diag_degeneracy(f, i) == z) {
                strip_at = i;
                break;
            }
        }
        if (strip_at == q) break;
        z = cx.diag_face(z, strip_at);
        for (auto& v : gamma)
            if (v > strip_at) --v;
    }
    return {ez::repeats_from_values(gamma), std::move(z)};
}

}  // namespace

FinitePointedSimplicialSet diagonal_realization(long long m, const Budget& budget) {
    if (m < 0) throw std::invalid_argument("diagonal_realization: weight must be non-negative");
    if (m > budget.max_weight)
        throw BudgetExceeded(m, "diagonal_realization: weight " + std::to_string(m) + " exceeds budget " +
                                    std::to_string(budget.max_weight));
    CyclicBarComplex bar(m);
    const std::uint32_t top = m == 0 ? 0 : static_cast<std::uint32_t>(3 * m + 1);

    std::vector<std::vector<BarSimplex>> cells(top + 1);
    std::vector<std::unordered_map<std::string, std::uint32_t>> index(top + 1);
    for (std::uint32_t n = 0; n <= top; ++n) {
        cells[n] = bar.diagonal_cells(n);
        for (std::uint32_t c = 0; c < cells[n].size(); ++c) index[n].emplace(cell_key(cells[n][c]), c);
    }
    if (m >= 1 && !cells[top].empty())
        throw std::logic_error("diagonal_realization: nondegenerate cells above the expected top degree");

    FinitePointedSimplicialSet::Builder builder(top);
    for (std::uint32_t n = 0; n <= top; ++n)
        for (std::uint32_t c = 0; c < cells[n].size(); ++c) builder.add_cell(n, "");

    for (std::uint32_t n = 1; n <= top; ++n) {
        for (std::uint32_t c = 0; c < cells[n].size(); ++c) {
            // cells at degree 0 sit after the basepoint in builder numbering
            std::uint32_t cell_id = c + (n == 0 ? 1 : 0);
            for (std::uint32_t i = 0; i <= n; ++i) {
                BarSimplex f = bar.diag_face(cells[n][c], i);
                Simplex value;
                if (f.basepoint) {
                    value = Simplex{0, 0, (n - 1) == 0 ? 0 : ((1ull << (n - 1)) - 1)};
                } else {
                    auto [repeats, rep] = diag_normal_form(bar, std::move(f));
                    auto it = index[rep.internal_degree].find(cell_key(rep));
                    if (it == index[rep.internal_degree].end())
                        throw std::logic_error("diagonal_realization: face representative missing");
                    std::uint32_t shift = rep.internal_degree == 0 ? 1 : 0;  // basepoint precedes degree-0 cells
                    value = Simplex{it->second + shift, rep.internal_degree, repeats};
                }
                builder.set_face(n, cell_id, i, value);
            }
        }
    }
    return std::move(builder).build();
}

std::vector<FiniteAbelianGroup> homology_B(long long m, const Budget& budget) {
    return diagonal_realization(m, budget).reduced_homology();
}

SubdividedComplex::SubdividedComplex(long long m, long long p, const Budget& budget) : m_(m), p_(p), bar_(m) {
    if (!is_prime(p)) throw std::invalid_argument("SubdividedComplex: p must be prime");
    if (m < 0) throw std::invalid_argument("SubdividedComplex: weight must be non-negative");
    if (m > budget.max_weight)
        throw BudgetExceeded(m, "subdivide: weight " + std::to_string(m) + " exceeds budget " +
                                    std::to_string(budget.max_weight));
}

std::uint32_t SubdividedComplex::sd_level(const BarSimplex& z) const {
    std::size_t slots = z.composition.size();
    if (slots % p_ != 0) throw std::invalid_argument("sd_level: slot count is not a multiple of p");
    return static_cast<std::uint32_t>(slots / p_) - 1;
}

BarSimplex SubdividedComplex::sd_face(const BarSimplex& z, std::uint32_t i) const {
    if (z.basepoint) return z;
    std::uint32_t l = sd_level(z);
    if (l == 0 || i > l) throw std::out_of_range("sd_face: index out of range");
    BarSimplex out = z;
    for (long long a = p_ - 1; a >= 0; --a) out = bar_.cyc_face(out, static_cast<std::uint32_t>(a * (l + 1) + i));
    return out;
}

BarSimplex SubdividedComplex::sd_degeneracy(const BarSimplex& z, std::uint32_t i) const {
    if (z.basepoint) return z;
    std::uint32_t l = sd_level(z);
    if (i > l) throw std::out_of_range("sd_degeneracy: index out of range");
    BarSimplex out = z;
    for (long long a = p_ - 1; a >= 0; --a) out = bar_.cyc_degeneracy(out, static_cast<std::uint32_t>(a * (l + 1) + i));
    return out;
}

BarSimplex SubdividedComplex::action(const BarSimplex& z) const {
    if (z.basepoint) return z;
    std::uint32_t l = sd_level(z);
    BarSimplex out = z;
    for (std::uint32_t k = 0; k <= l; ++k) out = bar_.rotate(out);
    return out;
}

BarSimplex SubdividedComplex::diag_face(const BarSimplex& z, std::uint32_t i) const {
    BarSimplex f = bar_.int_face(z, i);
    if (f.basepoint) return f;
    return sd_face(f, i);
}

BarSimplex SubdividedComplex::diag_degeneracy(const BarSimplex& z, std::uint32_t i) const {
    BarSimplex d = bar_.int_degeneracy(z, i);
    if (d.basepoint) return d;
    return sd_degeneracy(d, i);
}

bool SubdividedComplex::diag_nondegenerate(const BarSimplex& z) const {
    if (z.basepoint) return false;
    for (std::uint32_t i = 0; i < z.internal_degree; ++i) {
        BarSimplex f = diag_face(z, i);
        if (f.basepoint) continue;
        if (diag_degeneracy(f, i) == z) return false;
    }
    return true;
}

std::vector<BarSimplex> SubdividedComplex::diagonal_cells(std::uint32_t n) const {
    std::vector<BarSimplex> out;
    std::size_t slots = static_cast<std::size_t>(p_) * (n + 1);
    if (m_ == 0) {
        BarSimplex unit;
        unit.internal_degree = n;
        unit.composition.assign(slots, 0);
        if (diag_nondegenerate(unit)) out.push_back(std::move(unit));
        return out;
    }
    if (n < 2) return out;
    const std::size_t factors = static_cast<std::size_t>(m_);
    auto masks = masks_with_popcount(n, n - 2);
    auto comps = weak_compositions(m_, slots);
    std::vector<std::size_t> odo(factors, 0);
    for (;;) {
        std::vector<std::uint32_t> words(factors);
        for (std::size_t f = 0; f < factors; ++f) words[f] = masks[odo[f]];
        for (const auto& comp : comps) {
            BarSimplex z;
            z.internal_degree = n;
            z.composition = comp;
            z.words = words;
            if (diag_nondegenerate(z)) out.push_back(std::move(z));
        }
        std::size_t f = 0;
        while (f < factors && ++odo[f] == masks.size()) odo[f++] = 0;
        if (f == factors) break;
    }
    std::sort(out.begin(), out.end(), [](const BarSimplex& a, const BarSimplex& b) {
        if (a.composition != b.composition) return a.composition < b.composition;
        return a.words < b.words;
    });
    return out;
}

linalg::IntegerChainComplex SubdividedComplex::diagonal_chain_complex() const {
    const std::uint32_t top = m_ == 0 ? 0 : static_cast<std::uint32_t>(3 * m_ + 1);
    std::vector<std::vector<BarSimplex>> cells(top + 1);
    std::vector<std::unordered_map<std::string, std::uint32_t>> index(top + 1);
    std::vector<std::size_t> dims(top + 1);
    for (std::uint32_t n = 0; n <= top; ++n) {
        cells[n] = diagonal_cells(n);
        dims[n] = cells[n].size();
        for (std::uint32_t c = 0; c < cells[n].size(); ++c) index[n].emplace(cell_key(cells[n][c]), c);
    }
    if (m_ >= 1 && !cells[top].empty())
        throw std::logic_error("subdivide: nondegenerate cells above the expected top degree");

    std::vector<SparseIntMatrix> bnd;
    for (std::uint32_t n = 1; n <= top; ++n) {
        SparseIntMatrix mat(dims[n - 1], dims[n]);
        for (std::uint32_t c = 0; c < cells[n].size(); ++c) {
            for (std::uint32_t i = 0; i <= n; ++i) {
                BarSimplex f = diag_face(cells[n][c], i);
                if (f.basepoint) continue;
                auto it = index[n - 1].find(cell_key(f));
                if (it == index[n - 1].end()) {
                    if (diag_nondegenerate(f))
                        throw std::logic_error("subdivide: nondegenerate face missing from the level");
                    continue;  // degenerate faces vanish in normalized chains
                }
                mat.add(it->second, c, (i % 2 == 0) ? Int(1) : Int(-1));
            }
        }
        bnd.push_back(std::move(mat));
    }
    return linalg::IntegerChainComplex(std::move(dims), std::move(bnd));
}

std::vector<FiniteAbelianGroup> SubdividedComplex::diagonal_homology() const {
    return linalg::homology(diagonal_chain_complex());
}

SubdividedComplex subdivide(long long m, long long p, const Budget& budget) {
    return SubdividedComplex(m, p, budget);
}

bool check_free_action(long long m, long long p) {
    if (m < 1) throw std::invalid_argument("check_free_action: weight must be >= 1");
    if (!is_prime(p)) throw std::invalid_argument("check_free_action: p must be prime");
    SubdividedComplex sd(m, p, Budget{.max_weight = m});
    for (long long s = 1; s <= m + 2; ++s) {
        std::size_t slots = static_cast<std::size_t>(p * s);
        for (const auto& comp : weak_compositions(m, slots)) {
            bool invariant = true;
            for (std::size_t k = 0; k < slots && invariant; ++k)
                if (comp[k] != comp[(k + static_cast<std::size_t>(s)) % slots]) invariant = false;
            if (!invariant) continue;
            // exhibit an explicit fixed non-basepoint simplex at internal degree 2
            BarSimplex z;
            z.internal_degree = 2;
            z.composition = comp;
            z.words.assign(static_cast<std::size_t>(m), 0);
            if (!(sd.action(z) == z)) throw std::logic_error("check_free_action: invariant composition not fixed");
            return false;
        }
    }
    return true;
}

std::map<std::pair<int, int>, FiniteAbelianGroup> koszul_tor(Coeff ring, long long p, int max_internal_degree) {
    if (ring == Coeff::prime_field && !is_prime(p)) throw std::invalid_argument("koszul_tor: p must be prime");
    // Koszul resolution of the ground ring over R = k[x], |x| = 2:
    //   0 -> R.e --(e -> x)--> R -> k -> 0
    // Tensoring with k kills multiplication by x; per internal degree t the
    // graded pieces and induced map are computed from the x-action matrices.
    auto rank_k1 = [](int t) { return (t >= 2 && t % 2 == 0) ? 1 : 0; };  // basis x^{(t-2)/2} e
    auto rank_k0 = [](int t) { return (t >= 0 && t % 2 == 0) ? 1 : 0; };  // basis x^{t/2}

    std::map<std::pair<int, int>, FiniteAbelianGroup> out;
    for (int t = 0; t <= max_internal_degree; ++t) {
        // cokernel of x: M_{t-2} -> M_t has rank r(t) - rank(x-matrix)
        int x1 = (rank_k1(t) == 1 && t - 2 >= 0 && rank_k1(t - 2) == 1) ? 1 : 0;
        int x0 = (rank_k0(t) == 1 && t - 2 >= 0 && rank_k0(t - 2) == 1) ? 1 : 0;
        int c1 = rank_k1(t) - x1;
        int c0 = rank_k0(t) - x0;
        // induced differential: x^a e -> x^{a+1}, reduced modulo im(x)
        int d_entry = 0;
        if (c1 == 1 && c0 == 1) {
            // the coefficient of x^{t/2} is 1; it survives iff x0 misses it
            d_entry = (x0 == 1) ? 0 : 1;
        }
        if (c0 == 0 && c1 == 0) continue;
        // entries lie in {0, 1}, so the rank over Z and over F_p coincide
        IntMatrix d(static_cast<std::size_t>(c0), static_cast<std::size_t>(c1));
        if (c0 == 1 && c1 == 1) d(0, 0) = d_entry;
        std::size_t rank_d = 0;
        for (const Int& v : linalg::smith_invariants(d))
            if (v != 0) ++rank_d;
        std::size_t h1 = static_cast<std::size_t>(c1) - rank_d;
        std::size_t h0 = static_cast<std::size_t>(c0) - rank_d;
        auto group = [&](std::size_t dim) {
            if (ring == Coeff::integers) return FiniteAbelianGroup::free(dim);
            std::vector<Int> orders(dim, Int(p));
            return FiniteAbelianGroup::from_orders(orders);
        };
        if (h0 > 0) out.emplace(std::make_pair(0, t), group(h0));
        if (h1 > 0) out.emplace(std::make_pair(1, t), group(h1));
    }
    return out;
}

}  // namespace cyclobar::bar
