#include "cyclobar/exact_linalg.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cassert>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace cyclobar::linalg {

namespace {

Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

}  // namespace

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::initializer_list<long long> entries)
    : rows_(rows), cols_(cols), a_(rows * cols) {
    if (entries.size() != rows * cols)
        throw IncompatibleShapes("IntMatrix: initializer size does not match rows*cols");
    std::size_t k = 0;
    for (long long e : entries) a_[k++] = e;
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::diagonal(const std::vector<Int>& d) {
    IntMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw IncompatibleShapes("IntMatrix: product shape mismatch");
    IntMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Int& v = (*this)(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += v * rhs(k, j);
        }
    return out;
}

bool IntMatrix::is_zero() const {
    for (const Int& v : a_)
        if (v != 0) return false;
    return true;
}

Int IntMatrix::determinant() const {
    if (rows_ != cols_) throw IncompatibleShapes("determinant: matrix not square");
    const std::size_t n = rows_;
    if (n == 0) return 1;
    IntMatrix m = *this;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t swap_row = n;
            for (std::size_t i = k + 1; i < n; ++i)
                if (m(i, k) != 0) {
                    swap_row = i;
                    break;
                }
            if (swap_row == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(swap_row, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                m(i, j) = num / prev;  // exact by Bareiss
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

std::vector<Int> SmithDecomposition::diagonal() const {
    std::size_t n = std::min(d.rows(), d.cols());
    std::vector<Int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = d(i, i);
    return out;
}

std::size_t SmithDecomposition::rank() const {
    std::size_t r = 0;
    for (const Int& x : diagonal())
        if (x != 0) ++r;
    return r;
}

namespace {

// Shared dense Smith elimination.  Transforms are tracked when u/v are
// non-null.  Pivoting: smallest nonzero absolute value, earliest (row, col).
void smith_eliminate(IntMatrix& d, IntMatrix* u, IntMatrix* v) {
    const std::size_t rows = d.rows(), cols = d.cols();

    auto row_op = [&](std::size_t dst, std::size_t src, const Int& q) {
        for (std::size_t j = 0; j < cols; ++j) d(dst, j) -= q * d(src, j);
        if (u)
            for (std::size_t j = 0; j < rows; ++j) (*u)(dst, j) -= q * (*u)(src, j);
    };
    auto col_op = [&](std::size_t dst, std::size_t src, const Int& q) {
        for (std::size_t i = 0; i < rows; ++i) d(i, dst) -= q * d(i, src);
        if (v)
            for (std::size_t i = 0; i < d.cols(); ++i) (*v)(i, dst) -= q * (*v)(i, src);
    };
    auto row_swap = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols; ++j) std::swap(d(a, j), d(b, j));
        if (u)
            for (std::size_t j = 0; j < rows; ++j) std::swap((*u)(a, j), (*u)(b, j));
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows; ++i) std::swap(d(i, a), d(i, b));
        if (v)
            for (std::size_t i = 0; i < d.cols(); ++i) std::swap((*v)(i, a), (*v)(i, b));
    };
    auto row_negate = [&](std::size_t r) {
        for (std::size_t j = 0; j < cols; ++j) d(r, j) = -d(r, j);
        if (u)
            for (std::size_t j = 0; j < rows; ++j) (*u)(r, j) = -(*u)(r, j);
    };

    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        // Locate pivot candidate.
        std::size_t pr = rows, pc = cols;
        Int best;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                if (d(i, j) == 0) continue;
                Int a = abs_int(d(i, j));
                if (pr == rows || a < best) {
                    best = a;
                    pr = i;
                    pc = j;
                }
            }
        if (pr == rows) break;  // submatrix is zero
        row_swap(t, pr);
        col_swap(t, pc);

        for (;;) {
            bool clean = true;
            // Clear column t.
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (d(i, t) == 0) continue;
                Int q = d(i, t) / d(t, t);
                if (q != 0) row_op(i, t, q);
                if (d(i, t) != 0) {
                    // Remainder is smaller than the pivot; promote it.
                    row_swap(t, i);
                    clean = false;
                }
            }
            if (!clean) continue;
            // Clear row t.
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (d(t, j) == 0) continue;
                Int q = d(t, j) / d(t, t);
                if (q != 0) col_op(j, t, q);
                if (d(t, j) != 0) {
                    col_swap(t, j);
                    clean = false;
                }
            }
            if (!clean) continue;
            // Divisibility sweep: pivot must divide the rest of the submatrix.
            std::size_t bad = rows;
            for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (d(i, j) % d(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad == rows) break;
            row_op(t, bad, Int(-1));  // mix the offending row in and restart
        }
        if (d(t, t) < 0) row_negate(t);
    }
}

}  // namespace

SmithDecomposition smith_normal_form(const IntMatrix& a) {
    SmithDecomposition out{IntMatrix::identity(a.rows()), a, IntMatrix::identity(a.cols())};
    smith_eliminate(out.d, &out.u, &out.v);
    return out;
}

std::vector<Int> smith_invariants(const IntMatrix& a) {
    IntMatrix d = a;
    smith_eliminate(d, nullptr, nullptr);
    std::size_t n = std::min(d.rows(), d.cols());
    std::vector<Int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = d(i, i);
    return out;
}

FiniteAbelianGroup FiniteAbelianGroup::cyclic(const Int& n) {
    if (n < 1) throw std::invalid_argument("FiniteAbelianGroup::cyclic: order must be >= 1");
    FiniteAbelianGroup g;
    if (n > 1) g.factors_.push_back(n);
    return g;
}

FiniteAbelianGroup FiniteAbelianGroup::free(std::size_t rank) {
    FiniteAbelianGroup g;
    g.free_rank_ = rank;
    return g;
}

FiniteAbelianGroup FiniteAbelianGroup::from_orders(const std::vector<Int>& orders) {
    // prime -> exponents, one per cyclic factor containing that prime
    std::map<Int, std::vector<unsigned>> primes;
    for (const Int& n0 : orders) {
        if (n0 < 1) throw std::invalid_argument("from_orders: orders must be >= 1");
        Int n = n0;
        for (Int p = 2; p * p <= n; ++p) {
            if (n % p != 0) continue;
            unsigned e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            primes[p].push_back(e);
        }
        if (n > 1) primes[n].push_back(1);
    }
    std::size_t count = 0;
    for (auto& [p, exps] : primes) {
        std::sort(exps.begin(), exps.end(), std::greater<>());
        count = std::max(count, exps.size());
    }
    // factors descending, then reversed into an ascending divisibility chain
    std::vector<Int> factors(count, Int(1));
    for (auto& [p, exps] : primes)
        for (std::size_t k = 0; k < exps.size(); ++k)
            for (unsigned e = 0; e < exps[k]; ++e) factors[k] *= p;
    std::reverse(factors.begin(), factors.end());
    FiniteAbelianGroup g;
    g.factors_ = std::move(factors);
    return g;
}

FiniteAbelianGroup FiniteAbelianGroup::from_invariant_chain(const std::vector<Int>& chain) {
    FiniteAbelianGroup g;
    std::vector<Int> torsion;
    for (const Int& d : chain) {
        if (d < 0) throw std::invalid_argument("from_invariant_chain: negative entry");
        if (d == 0)
            ++g.free_rank_;
        else if (d > 1)
            torsion.push_back(d);
    }
    g.factors_ = from_orders(torsion).factors_;
    return g;
}

Int FiniteAbelianGroup::order() const {
    if (free_rank_ != 0) throw std::logic_error("FiniteAbelianGroup::order: group is infinite");
    Int n = 1;
    for (const Int& d : factors_) n *= d;
    return n;
}

std::string FiniteAbelianGroup::to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank_ > 0) {
        os << "Z";
        if (free_rank_ > 1) os << "^" << free_rank_;
        first = false;
    }
    for (const Int& d : factors_) {
        if (!first) os << " + ";
        os << "Z/" << d;
        first = false;
    }
    return os.str();
}

SparseIntMatrix::SparseIntMatrix(const IntMatrix& dense)
    : rows_(dense.rows()), cols_(dense.cols()), row_(dense.rows()) {
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (dense(i, j) != 0) row_[i][static_cast<std::uint32_t>(j)] = dense(i, j);
}

void SparseIntMatrix::add(std::size_t r, std::size_t c, const Int& value) {
    if (r >= rows_ || c >= cols_) throw IncompatibleShapes("SparseIntMatrix::add: index out of range");
    if (value == 0) return;
    auto& m = row_[r];
    auto it = m.find(static_cast<std::uint32_t>(c));
    if (it == m.end()) {
        m.emplace(static_cast<std::uint32_t>(c), value);
    } else {
        it->second += value;
        if (it->second == 0) m.erase(it);
    }
}

std::size_t SparseIntMatrix::nonzero_count() const {
    std::size_t n = 0;
    for (const auto& r : row_) n += r.size();
    return n;
}

bool SparseIntMatrix::is_zero() const { return nonzero_count() == 0; }

IntMatrix SparseIntMatrix::to_dense() const {
    IntMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (const auto& [j, v] : row_[i]) m(i, j) = v;
    return m;
}

SparseIntMatrix SparseIntMatrix::operator*(const SparseIntMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw IncompatibleShapes("SparseIntMatrix: product shape mismatch");
    SparseIntMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (const auto& [k, v] : row_[i])
            for (const auto& [j, w] : rhs.row_[k]) out.add(i, j, v * w);
    return out;
}

std::pair<std::size_t, std::vector<Int>> sparse_smith_invariants(const SparseIntMatrix& m) {
    const std::size_t rows = m.rows();
    std::vector<std::map<std::uint32_t, Int>> row(rows);
    for (std::size_t i = 0; i < rows; ++i) row[i] = m.row(i);

    std::vector<std::set<std::uint32_t>> col_rows(m.cols());
    for (std::size_t i = 0; i < rows; ++i)
        for (const auto& [j, v] : row[i]) col_rows[j].insert(static_cast<std::uint32_t>(i));

    std::vector<bool> alive(rows, true);
    // min-heap on (row nnz, row index); entries go stale when rows change
    using Key = std::pair<std::size_t, std::uint32_t>;
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap;
    for (std::size_t i = 0; i < rows; ++i)
        if (!row[i].empty()) heap.emplace(row[i].size(), static_cast<std::uint32_t>(i));

    std::size_t unit_rank = 0;

    auto subtract_rows = [&](std::uint32_t dst, std::uint32_t src, const Int& q) {
        // row[dst] -= q * row[src]
        for (const auto& [j, v] : row[src]) {
            auto it = row[dst].find(j);
            if (it == row[dst].end()) {
                Int nv = -q * v;
                if (nv != 0) {
                    row[dst].emplace(j, std::move(nv));
                    col_rows[j].insert(dst);
                }
            } else {
                it->second -= q * v;
                if (it->second == 0) {
                    row[dst].erase(it);
                    col_rows[j].erase(dst);
                }
            }
        }
    };

    while (!heap.empty()) {
        auto [nnz, r] = heap.top();
        heap.pop();
        if (!alive[r] || row[r].size() != nnz || nnz == 0) continue;  // stale
        // Unit pivot in this row with the fewest occupied column slots.
        std::uint32_t pivot_col = 0;
        std::size_t best_count = 0;
        bool found = false;
        for (const auto& [j, v] : row[r]) {
            if (v != 1 && v != -1) continue;
            std::size_t cnt = col_rows[j].size();
            if (!found || cnt < best_count) {
                best_count = cnt;
                pivot_col = j;
                found = true;
            }
        }
        if (!found) continue;  // parked; becomes part of the dense residual
        const Int pivot = row[r].at(pivot_col);

        // Clear the pivot column with row operations (exact: pivot is a unit).
        std::vector<std::uint32_t> targets(col_rows[pivot_col].begin(), col_rows[pivot_col].end());
        for (std::uint32_t r2 : targets) {
            if (r2 == r || !alive[r2]) continue;
            Int q = row[r2].at(pivot_col) / pivot;
            subtract_rows(r2, r, q);
            if (!row[r2].empty()) heap.emplace(row[r2].size(), r2);
        }
        // Column ops clearing the rest of the pivot row touch no other row
        // now that the pivot column is a singleton; drop row and column.
        for (const auto& [j, v] : row[r]) col_rows[j].erase(r);
        row[r].clear();
        alive[r] = false;
        ++unit_rank;
    }

    // Dense residual: alive rows without unit entries.
    std::vector<std::uint32_t> res_rows;
    std::set<std::uint32_t> res_cols_set;
    for (std::size_t i = 0; i < rows; ++i)
        if (alive[i] && !row[i].empty()) {
            res_rows.push_back(static_cast<std::uint32_t>(i));
            for (const auto& [j, v] : row[i]) res_cols_set.insert(j);
        }
    std::vector<std::uint32_t> res_cols(res_cols_set.begin(), res_cols_set.end());
    std::map<std::uint32_t, std::size_t> col_index;
    for (std::size_t k = 0; k < res_cols.size(); ++k) col_index[res_cols[k]] = k;

    IntMatrix residual(res_rows.size(), res_cols.size());
    for (std::size_t i = 0; i < res_rows.size(); ++i)
        for (const auto& [j, v] : row[res_rows[i]]) residual(i, col_index[j]) = v;

    std::vector<Int> res_inv = smith_invariants(residual);
    std::size_t rank = unit_rank;
    std::vector<Int> nontrivial;
    for (const Int& d : res_inv) {
        if (d == 0) continue;
        ++rank;
        if (d > 1) nontrivial.push_back(d);
    }
    return {rank, nontrivial};
}

IntegerChainComplex::IntegerChainComplex(std::vector<std::size_t> dims, std::vector<SparseIntMatrix> boundaries)
    : dims_(std::move(dims)), boundaries_(std::move(boundaries)) {
    if (dims_.empty()) dims_.push_back(0);
    if (boundaries_.size() + 1 != dims_.size())
        throw IncompatibleShapes("IntegerChainComplex: need one boundary per adjacent pair of degrees");
    validate();
}

IntegerChainComplex::IntegerChainComplex(const std::vector<IntMatrix>& boundaries) {
    if (boundaries.empty()) {
        dims_ = {0};
        return;
    }
    dims_.push_back(boundaries.front().rows());
    for (const IntMatrix& b : boundaries) {
        dims_.push_back(b.cols());
        boundaries_.emplace_back(b);
    }
    validate();
}

void IntegerChainComplex::validate() const {
    for (std::size_t k = 0; k < boundaries_.size(); ++k) {
        if (boundaries_[k].rows() != dims_[k] || boundaries_[k].cols() != dims_[k + 1])
            throw IncompatibleShapes("IntegerChainComplex: boundary shape mismatch at degree " + std::to_string(k + 1));
    }
    for (std::size_t k = 0; k + 1 < boundaries_.size(); ++k) {
        if (!(boundaries_[k] * boundaries_[k + 1]).is_zero())
            throw ComplexInvalid("IntegerChainComplex: dd != 0 between degrees " + std::to_string(k + 2) + " and " +
                                 std::to_string(k));
    }
}

const SparseIntMatrix& IntegerChainComplex::boundary(std::size_t n) const {
    if (n == 0 || n > boundaries_.size())
        throw IncompatibleShapes("IntegerChainComplex::boundary: degree out of range");
    return boundaries_[n - 1];
}

std::vector<FiniteAbelianGroup> homology(const IntegerChainComplex& complex) {
    const std::size_t top = complex.top_degree();
    std::vector<std::size_t> rank(top + 2, 0);
    std::vector<std::vector<Int>> torsion(top + 2);
    for (std::size_t n = 1; n <= top; ++n) {
        auto [r, t] = sparse_smith_invariants(complex.boundary(n));
        rank[n] = r;
        torsion[n] = std::move(t);
    }
    std::vector<FiniteAbelianGroup> h(top + 1);
    for (std::size_t n = 0; n <= top; ++n) {
        std::size_t free_rank = complex.dim(n) - rank[n] - rank[n + 1];
        std::vector<Int> chain = torsion[n + 1];
        for (std::size_t k = 0; k < free_rank; ++k) chain.push_back(0);
        h[n] = FiniteAbelianGroup::from_invariant_chain(chain);
    }
    return h;
}

std::pair<FiniteAbelianGroup, FiniteAbelianGroup> kernel_cokernel(const IntMatrix& f,
                                                                  const std::vector<Int>& source_orders,
                                                                  const std::vector<Int>& target_orders) {
    const std::size_t g = source_orders.size(), h = target_orders.size();
    if (f.rows() != h || f.cols() != g)
        throw IncompatibleShapes("kernel_cokernel: matrix shape does not match group ranks");
    for (const Int& a : source_orders)
        if (a < 1) throw std::invalid_argument("kernel_cokernel: source orders must be >= 1");
    for (const Int& b : target_orders)
        if (b < 1) throw std::invalid_argument("kernel_cokernel: target orders must be >= 1");
    for (std::size_t j = 0; j < h; ++j)
        for (std::size_t i = 0; i < g; ++i)
            if ((source_orders[i] * f(j, i)) % target_orders[j] != 0)
                throw std::invalid_argument("kernel_cokernel: matrix does not define a homomorphism");

    // P = [F | diag(b)]; coker = Z^h / colspan(P), kernel from the null lattice.
    IntMatrix p(h, g + h);
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < g; ++i) p(j, i) = f(j, i);
        p(j, g + j) = target_orders[j];
    }
    SmithDecomposition snf = smith_normal_form(p);
    std::size_t rank = snf.rank();

    std::vector<Int> coker_chain;
    for (const Int& d : snf.diagonal())
        if (d != 0) coker_chain.push_back(d);
    if (rank < h)
        throw std::logic_error("kernel_cokernel: target presentation lost rank");  // diag(b) is nonsingular
    FiniteAbelianGroup coker = FiniteAbelianGroup::from_invariant_chain(coker_chain);

    if (g == 0) return {FiniteAbelianGroup::trivial(), coker};

    // Null lattice of P: columns rank.. of V; its projection X to the source
    // coordinates spans L = f^{-1}(im diag(b)), and ker = L / diag(a) Z^g.
    const std::size_t null_dim = g + h - rank;  // = g
    IntMatrix x(g, null_dim);
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t k = 0; k < null_dim; ++k) x(i, k) = snf.v(i, rank + k);

    // C solves X * C = diag(a); integral because diag(a) Z^g is a sublattice of L.
    using Rat = boost::multiprecision::cpp_rational;
    std::vector<std::vector<Rat>> aug(g, std::vector<Rat>(null_dim + g));
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t k = 0; k < null_dim; ++k) aug[i][k] = Rat(x(i, k));
        aug[i][null_dim + i] = Rat(source_orders[i]);
    }
    for (std::size_t col = 0, prow = 0; col < null_dim && prow < g; ++col) {
        std::size_t piv = g;
        for (std::size_t i = prow; i < g; ++i)
            if (aug[i][col] != Rat(0)) {
                piv = i;
                break;
            }
        if (piv == g) throw std::logic_error("kernel_cokernel: projected null lattice lost rank");
        std::swap(aug[prow], aug[piv]);
        Rat inv = Rat(1) / aug[prow][col];
        for (auto& v : aug[prow]) v *= inv;
        for (std::size_t i = 0; i < g; ++i) {
            if (i == prow || aug[i][col] == Rat(0)) continue;
            Rat q = aug[i][col];
            for (std::size_t k = col; k < null_dim + g; ++k) aug[i][k] -= q * aug[prow][k];
        }
        ++prow;
    }
    IntMatrix c(null_dim, g);
    for (std::size_t i = 0; i < null_dim; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            const Rat& v = aug[i][null_dim + j];
            if (boost::multiprecision::denominator(v) != 1)
                throw std::logic_error("kernel_cokernel: kernel presentation is not integral");
            c(i, j) = boost::multiprecision::numerator(v);
        }

    FiniteAbelianGroup kernel = FiniteAbelianGroup::from_invariant_chain(smith_invariants(c));
    return {kernel, coker};
}

}  // namespace cyclobar::linalg
