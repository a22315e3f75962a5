#pragma once

#include "cyclobar/exact_linalg.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cyclobar::witt {

using Rational = boost::multiprecision::cpp_rational;

struct NonIntegralRing : std::runtime_error {
    explicit NonIntegralRing(const std::string& what) : std::runtime_error(what) {}
};
struct MismatchedTruncation : std::runtime_error {
    explicit MismatchedTruncation(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidSubset : std::runtime_error {
    explicit InvalidSubset(const std::string& what) : std::runtime_error(what) {}
};
// By Witt's theorem the structure polynomials are integral; this firing means
// the implementation is wrong, not the input.
struct NonIntegralCoefficient : std::logic_error {
    explicit NonIntegralCoefficient(const std::string& what) : std::logic_error(what) {}
};

/// Finite divisor-closed set of positive integers.
class TruncationSet {
  public:
    explicit TruncationSet(std::vector<long long> elements);

    static TruncationSet big(long long r);                  // {1, ..., r}
    static TruncationSet p_typical(long long p, int n);     // {1, p, ..., p^{n-1}}

    const std::vector<long long>& elements() const { return elems_; }
    std::size_t size() const { return elems_.size(); }
    bool contains(long long d) const;
    std::size_t index_of(long long d) const;  // throws if absent

    // S/n = {d : d*n in S}; divisor-closed again.
    TruncationSet quotient(long long n) const;
    bool is_subset_of(const TruncationSet& other) const;

    bool operator==(const TruncationSet& rhs) const = default;

    // "1-2-4" style tag used in cache file names.
    std::string label() const;

  private:
    std::vector<long long> elems_;
};

enum class Ring { integers, prime_field };
enum class WittOp { add, mul };

/// Sparse monomial in the variables a_d, b_d (side 0 = a, side 1 = b).
struct WittMonomial {
    std::map<std::pair<int, long long>, unsigned> exponents;

    static WittMonomial one() { return {}; }
    static WittMonomial var(int side, long long d, unsigned e = 1);
    WittMonomial operator*(const WittMonomial& rhs) const;
    auto operator<=>(const WittMonomial& rhs) const = default;
};

using RationalPoly = std::map<WittMonomial, Rational>;
using IntPoly = std::map<WittMonomial, Int>;

// Ghost polynomial w_d on one side: sum over e | d, e in S of e * x_e^{d/e}.
RationalPoly ghost_polynomial(const TruncationSet& s, long long d, int side);

// Unique solutions of the ghost equations, one polynomial per component of S.
// Computed over the rationals; every coefficient is asserted integral.
std::map<long long, IntPoly> structure_polynomials(const TruncationSet& s, WittOp op);

/// Read-through cache for structure polynomials, optionally persisted to disk
/// (one JSON document per (S, op)).  Concurrent writers race benignly: entries
/// are deterministic and files are replaced atomically.
class WittPolynomialCache {
  public:
    WittPolynomialCache() = default;

    static WittPolynomialCache& instance();

    void set_directory(std::optional<std::filesystem::path> dir);
    std::optional<std::filesystem::path> directory() const;

    // Returned reference stays valid for the lifetime of the cache.
    const std::map<long long, IntPoly>& get(const TruncationSet& s, WittOp op);

    static std::string file_name(const TruncationSet& s, WittOp op);

  private:
    mutable std::mutex mu_;
    std::optional<std::filesystem::path> dir_;
    std::map<std::pair<std::string, WittOp>, std::map<long long, IntPoly>> entries_;
};

/// Coefficient vector indexed by a truncation set, over Z or F_p.
class WittVector {
  public:
    static WittVector over_integers(TruncationSet s, std::vector<Int> coefficients);
    static WittVector over_prime_field(TruncationSet s, long long p, std::vector<Int> coefficients);
    static WittVector zero(TruncationSet s, Ring ring, long long p = 0);
    // Teichmuller-style vector (c, 0, 0, ...).
    static WittVector unit(TruncationSet s, Ring ring, long long p, const Int& c);

    const TruncationSet& truncation_set() const { return s_; }
    Ring ring() const { return ring_; }
    long long characteristic() const { return p_; }
    const std::vector<Int>& coefficients() const { return coeff_; }
    const Int& coefficient(long long d) const { return coeff_[s_.index_of(d)]; }

    bool operator==(const WittVector& rhs) const = default;

  private:
    WittVector(TruncationSet s, Ring ring, long long p, std::vector<Int> coeff)
        : s_(std::move(s)), ring_(ring), p_(p), coeff_(std::move(coeff)) {}

    TruncationSet s_{std::vector<long long>{1}};
    Ring ring_ = Ring::integers;
    long long p_ = 0;
    std::vector<Int> coeff_;
};

// Ghost coordinates w_n(a) = sum_{d | n, d in S} d * a_d^{n/d}; requires
// integer coefficients (the ghost map is only faithful torsion-free).
std::vector<Int> ghost(const WittVector& a);

WittVector witt_add(const WittVector& a, const WittVector& b);
WittVector witt_mul(const WittVector& a, const WittVector& b);

// Ghost-characterized operators.  frobenius lands on S/n; verschiebung takes
// a vector on S/n to S; restriction forgets coefficients outside T.
WittVector frobenius(const WittVector& a, long long n);
WittVector verschiebung(const WittVector& a, long long n, const TruncationSet& target);
WittVector restriction(const WittVector& a, const TruncationSet& t);

// Pairs (m', s) with m' <= r prime to p and s = #{v >= 0 : p^v m' <= r};
// the lengths sum to r.
std::vector<std::pair<long long, int>> big_witt_decomposition(long long r, long long p);

}  // namespace cyclobar::witt
