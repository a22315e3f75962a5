#pragma once

#include "cyclobar/exact_linalg.hpp"

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cyclobar::ss {

struct WeightZero : std::runtime_error {
    explicit WeightZero(const std::string& what) : std::runtime_error(what) {}
};

enum class Mode { tate, hfp };
enum class Gen { y, z };

/// Basis monomial t^j x^i g of E^2 = k[t,t^{-1},x]{y_m, z_m}, with
/// deg t = (-2,0), deg x = (0,2), deg y_m = (0,2m), deg z_m = (0,2m+1).
struct Monomial {
    long long t_exp = 0;
    long long x_exp = 0;
    Gen gen = Gen::y;
    long long weight = 0;

    long long total_degree() const { return -2 * t_exp + 2 * x_exp + 2 * weight + (gen == Gen::z ? 1 : 0); }
    long long column() const { return -2 * t_exp; }
    long long row() const { return total_degree() - column(); }

    auto operator<=>(const Monomial& rhs) const = default;
};

/// Lazy E^2 page of the Tate (all t-exponents) or homotopy-fixed-point
/// (t-exponent >= 0) spectral sequence of the weight-m summand.
class Page {
  public:
    Page(long long m, long long p, Mode mode);

    long long weight() const { return m_; }
    long long prime() const { return p_; }
    Mode mode() const { return mode_; }
    // v = val_p(m); the single differential family is d^{2v+2}.
    int valuation() const { return v_; }
    int differential_page() const { return 2 * v_ + 2; }

    bool contains(const Monomial& mon) const;

    // E^2 basis in one total degree, t-exponent restricted to [t_min, t_max];
    // the page is infinite in the Tate mode, so enumeration is windowed.
    std::vector<Monomial> basis_in_degree(long long degree, long long t_min, long long t_max) const;

    // d^{2v+2}(t^j x^i y) = t^{j+v+1} x^{i+v} z, extended multiplicatively;
    // z-generators are infinite cycles.  The bidegree shift is asserted.
    std::optional<Monomial> differential(const Monomial& mon) const;
    std::optional<Monomial> differential_preimage(const Monomial& mon) const;

    // E^infinity basis in one total degree (always finite).
    std::vector<Monomial> survivors_in_degree(long long degree) const;

  private:
    long long m_, p_;
    Mode mode_;
    int v_;
};

Page e2_page(long long m, long long p, Mode mode);

/// Count of E^infinity basis classes per total degree.
struct SurvivorTable {
    std::map<long long, std::size_t> counts;

    std::size_t count(long long degree) const {
        auto it = counts.find(degree);
        return it == counts.end() ? 0 : it->second;
    }
};

// Runs the differential family over all total degrees in [min_degree, max_degree].
SurvivorTable run_to_e_infinity(const Page& page, long long min_degree, long long max_degree);

// True iff the hfp survivors map bijectively onto the Tate survivors in total
// degree 2r+1; by the canonical-map analysis this holds exactly when r < m.
bool can_comparison(long long m, long long p, long long r);

// Resolve the extension problem by cyclic length: count c in an odd degree
// gives Z/p^c, even degrees are trivial.
std::map<long long, linalg::FiniteAbelianGroup> assemble_cyclic(const SurvivorTable& counts, long long p);

}  // namespace cyclobar::ss
