#pragma once

#include "cyclobar/exact_linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cyclobar::simplicial {

/// A simplex in Eilenberg-Zilber normal form: the degeneracy surjection
/// [degree] ->> [cell_degree] encoded by its repeat set (bit j set means the
/// surjection takes the same value at j and j+1), applied to a nondegenerate
/// cell.  repeats == 0 is the nondegenerate case.
struct Simplex {
    std::uint32_t cell = 0;
    std::uint32_t cell_degree = 0;
    std::uint64_t repeats = 0;

    std::uint32_t degree() const;
    bool is_degenerate() const { return repeats != 0; }
    bool operator==(const Simplex& rhs) const = default;
};

/// Pointed simplicial set with finitely many nondegenerate simplices.
/// Cell 0 in degree 0 is the basepoint; its degeneracies are the basepoint
/// simplices in higher degrees.  Faces are stored on nondegenerate cells and
/// extended to all simplices by the simplicial identities.
class FinitePointedSimplicialSet {
  public:
    class Builder {
      public:
        explicit Builder(std::size_t max_degree);
        // Returns the cell index within its degree.  Degree-0 cell 0 (the
        // basepoint) exists from the start.
        std::uint32_t add_cell(std::uint32_t degree, std::string label = {});
        void set_face(std::uint32_t degree, std::uint32_t cell, std::uint32_t i, Simplex value);
        // Validates face assignments and the simplicial identities.
        FinitePointedSimplicialSet build() &&;

      private:
        friend class FinitePointedSimplicialSet;
        std::vector<std::vector<std::vector<Simplex>>> faces_;
        std::vector<std::vector<std::string>> labels_;
    };

    std::uint32_t max_degree() const { return static_cast<std::uint32_t>(faces_.size()) - 1; }
    std::size_t cell_count(std::uint32_t degree) const;
    const std::string& cell_label(std::uint32_t degree, std::uint32_t cell) const;

    Simplex basepoint(std::uint32_t degree) const;
    bool is_basepoint(const Simplex& x) const { return x.cell == 0 && x.cell_degree == 0; }

    // Face and degeneracy of an arbitrary simplex in normal form.
    Simplex face(const Simplex& x, std::uint32_t i) const;
    Simplex degeneracy(const Simplex& x, std::uint32_t i) const;

    // Normalized chain complex; `reduced` drops the basepoint generator.
    linalg::IntegerChainComplex chain_complex(bool reduced) const;

    std::vector<linalg::FiniteAbelianGroup> homology() const;          // of the underlying space
    std::vector<linalg::FiniteAbelianGroup> reduced_homology() const;  // basepoint collapsed

  private:
    void validate() const;

    // faces_[d][cell] holds d+1 face simplices for d >= 1.
    std::vector<std::vector<std::vector<Simplex>>> faces_;
    std::vector<std::vector<std::string>> labels_;
};

// Degeneracy-word helpers shared by the bar construction machinery.
namespace ez {

// Surjection [n] ->> [n - popcount(repeats)] as explicit values.
std::vector<std::uint32_t> surjection_values(std::uint64_t repeats, std::uint32_t n);
std::uint64_t repeats_from_values(const std::vector<std::uint32_t>& values);

// Repeat set of alpha o delta_i when that composite is surjective, or the pair
// (missing value, quotient repeat set) when it is not.
struct FaceResult {
    bool surjective;
    std::uint64_t repeats;        // when surjective
    std::uint32_t missing_value;  // when not: alpha o delta_i = delta_j o beta
    std::uint64_t beta_repeats;
};
FaceResult face_surjection(std::uint64_t repeats, std::uint32_t n, std::uint32_t i);

// Repeat set of alpha o sigma_i (insertion of a repeat at position i).
std::uint64_t degeneracy_surjection(std::uint64_t repeats, std::uint32_t n, std::uint32_t i);

// Composite of two surjections given by repeat sets: first gamma (on [n]),
// then alpha (on the quotient).  Returns the repeat set of alpha o gamma.
std::uint64_t compose_surjections(std::uint64_t alpha_repeats, std::uint64_t gamma_repeats, std::uint32_t n);

// Given alpha with repeat set alpha_repeats on [n] and a sub-repeat set
// common (common must be a subset of alpha_repeats), the repeat set of the
// unique alpha'' with alpha = alpha'' o gamma_common.
std::uint64_t quotient_repeats(std::uint64_t alpha_repeats, std::uint64_t common, std::uint32_t n);

}  // namespace ez

}  // namespace cyclobar::simplicial
