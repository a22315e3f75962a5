#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cyclobar {

using Int = boost::multiprecision::cpp_int;

namespace linalg {

struct ComplexInvalid : std::runtime_error {
    explicit ComplexInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct IncompatibleShapes : std::runtime_error {
    explicit IncompatibleShapes(const std::string& what) : std::runtime_error(what) {}
};

/// Dense matrix of arbitrary-precision integers, row-major.
class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    IntMatrix(std::size_t rows, std::size_t cols, std::initializer_list<long long> entries);

    static IntMatrix identity(std::size_t n);
    static IntMatrix diagonal(const std::vector<Int>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const Int& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    IntMatrix operator*(const IntMatrix& rhs) const;
    bool operator==(const IntMatrix& rhs) const = default;

    bool is_zero() const;

    // Fraction-free (Bareiss) determinant; square matrices only.
    Int determinant() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

/// U*A*V = D with U, V unimodular and D diagonal, d_i | d_{i+1}, d_i >= 0.
struct SmithDecomposition {
    IntMatrix u, d, v;

    std::vector<Int> diagonal() const;
    // Count of nonzero diagonal entries.
    std::size_t rank() const;
};

SmithDecomposition smith_normal_form(const IntMatrix& a);

// Diagonal of the Smith form only (no transforms), as the full list of
// min(rows, cols) entries in divisibility order, zeros trailing.
std::vector<Int> smith_invariants(const IntMatrix& a);

/// Finitely generated abelian group in invariant-factor form:
/// Z^free_rank + Z/d_1 + ... + Z/d_k with 2 <= d_1 | d_2 | ... | d_k.
class FiniteAbelianGroup {
  public:
    FiniteAbelianGroup() = default;

    static FiniteAbelianGroup trivial() { return {}; }
    static FiniteAbelianGroup cyclic(const Int& n);
    static FiniteAbelianGroup free(std::size_t rank);
    // Canonicalize an arbitrary product of cyclic groups prod Z/n_i (n_i >= 1).
    static FiniteAbelianGroup from_orders(const std::vector<Int>& orders);
    // From a divisibility chain as produced by SNF (1s and 0s allowed; a zero
    // contributes a free summand).
    static FiniteAbelianGroup from_invariant_chain(const std::vector<Int>& chain);

    const std::vector<Int>& invariant_factors() const { return factors_; }
    std::size_t free_rank() const { return free_rank_; }
    bool is_trivial() const { return free_rank_ == 0 && factors_.empty(); }
    bool is_finite() const { return free_rank_ == 0; }

    // Order of the group; requires free_rank() == 0.
    Int order() const;

    bool operator==(const FiniteAbelianGroup& rhs) const = default;

    std::string to_string() const;

  private:
    std::vector<Int> factors_;
    std::size_t free_rank_ = 0;
};

/// Sparse integer matrix; rows hold ordered (col, value) maps.
class SparseIntMatrix {
  public:
    SparseIntMatrix() = default;
    SparseIntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_(rows) {}
    explicit SparseIntMatrix(const IntMatrix& dense);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    // Accumulates into the entry and drops it when it cancels to zero.
    void add(std::size_t r, std::size_t c, const Int& value);

    const std::map<std::uint32_t, Int>& row(std::size_t r) const { return row_[r]; }
    std::size_t nonzero_count() const;
    bool is_zero() const;

    IntMatrix to_dense() const;
    SparseIntMatrix operator*(const SparseIntMatrix& rhs) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::map<std::uint32_t, Int>> row_;
};

// Rank and nontrivial invariant factors (those > 1) of a sparse matrix.
// Unit-pivot elimination shrinks the matrix before the dense Smith kernel
// takes over; exact over Z throughout.
std::pair<std::size_t, std::vector<Int>> sparse_smith_invariants(const SparseIntMatrix& m);

/// Chain complex of free Z-modules: dims[n] generators in degree n and
/// boundary matrices d_n : C_n -> C_{n-1}.  dd = 0 is asserted on construction.
class IntegerChainComplex {
  public:
    // boundaries[k] is d_{k+1} : C_{k+1} -> C_k; shapes must match dims.
    IntegerChainComplex(std::vector<std::size_t> dims, std::vector<SparseIntMatrix> boundaries);
    explicit IntegerChainComplex(const std::vector<IntMatrix>& boundaries);

    std::size_t top_degree() const { return dims_.empty() ? 0 : dims_.size() - 1; }
    std::size_t dim(std::size_t n) const { return n < dims_.size() ? dims_[n] : 0; }
    const std::vector<std::size_t>& dims() const { return dims_; }

    // d_n : C_n -> C_{n-1}, for 1 <= n <= top_degree().
    const SparseIntMatrix& boundary(std::size_t n) const;

  private:
    void validate() const;

    std::vector<std::size_t> dims_;
    std::vector<SparseIntMatrix> boundaries_;
};

// H_n = ker d_n / im d_{n+1} for n = 0..top_degree, free rank and torsion
// reported separately inside each FiniteAbelianGroup.
std::vector<FiniteAbelianGroup> homology(const IntegerChainComplex& complex);

// Kernel and cokernel of the homomorphism prod Z/a_i -> prod Z/b_j whose
// matrix on generators is f (rows indexed by targets).  Entries of column i
// must define a homomorphism, i.e. b_j | a_i * f(j, i).
std::pair<FiniteAbelianGroup, FiniteAbelianGroup> kernel_cokernel(const IntMatrix& f,
                                                                  const std::vector<Int>& source_orders,
                                                                  const std::vector<Int>& target_orders);

}  // namespace linalg
}  // namespace cyclobar
