#include "cyclobar/simplicial.hpp"

#include <bit>
#include <stdexcept>

namespace cyclobar::simplicial {

std::uint32_t Simplex::degree() const { return cell_degree + static_cast<std::uint32_t>(std::popcount(repeats)); }

namespace ez {

std::vector<std::uint32_t> surjection_values(std::uint64_t repeats, std::uint32_t n) {
    std::vector<std::uint32_t> v(n + 1);
    for (std::uint32_t j = 0; j < n; ++j) v[j + 1] = v[j] + (((repeats >> j) & 1) ? 0 : 1);
    return v;
}

std::uint64_t repeats_from_values(const std::vector<std::uint32_t>& values) {
    std::uint64_t r = 0;
    for (std::size_t j = 0; j + 1 < values.size(); ++j)
        if (values[j] == values[j + 1]) r |= (1ull << j);
    return r;
}

FaceResult face_surjection(std::uint64_t repeats, std::uint32_t n, std::uint32_t i) {
    auto alpha = surjection_values(repeats, n);
    // alpha o delta_i skips position i; it stays surjective iff the value
    // alpha(i) is still attained, i.e. i or i-1 is a repeat position.
    bool surjective = (((repeats >> i) & 1) != 0) || (i > 0 && ((repeats >> (i - 1)) & 1) != 0);
    std::vector<std::uint32_t> beta;
    beta.reserve(n);
    for (std::uint32_t j = 0; j <= n; ++j)
        if (j != i) beta.push_back(alpha[j]);
    if (surjective) return {true, repeats_from_values(beta), 0, 0};
    std::uint32_t missing = alpha[i];
    for (auto& v : beta)
        if (v > missing) --v;
    return {false, 0, missing, repeats_from_values(beta)};
}

std::uint64_t degeneracy_surjection(std::uint64_t repeats, std::uint32_t n, std::uint32_t i) {
    (void)n;
    std::uint64_t low = repeats & ((1ull << i) - 1);
    std::uint64_t high = (repeats >> i) << (i + 1);
    return low | (1ull << i) | high;
}

std::uint64_t compose_surjections(std::uint64_t alpha_repeats, std::uint64_t gamma_repeats, std::uint32_t n) {
    auto gamma = surjection_values(gamma_repeats, n);
    std::uint32_t mid = gamma.empty() ? 0 : gamma.back();
    auto alpha = surjection_values(alpha_repeats, mid);
    std::vector<std::uint32_t> total(n + 1);
    for (std::uint32_t j = 0; j <= n; ++j) total[j] = alpha[gamma[j]];
    return repeats_from_values(total);
}

std::uint64_t quotient_repeats(std::uint64_t alpha_repeats, std::uint64_t common, std::uint32_t n) {
    if ((common & ~alpha_repeats) != 0) throw std::logic_error("quotient_repeats: common is not a sub-repeat set");
    auto alpha = surjection_values(alpha_repeats, n);
    auto gamma = surjection_values(common, n);
    std::vector<std::uint32_t> quotient(gamma.back() + 1);
    for (std::uint32_t j = 0; j <= n; ++j) quotient[gamma[j]] = alpha[j];
    return repeats_from_values(quotient);
}

}  // namespace ez

FinitePointedSimplicialSet::Builder::Builder(std::size_t max_degree) : faces_(max_degree + 1), labels_(max_degree + 1) {
    labels_[0].push_back("*");  // basepoint
}

std::uint32_t FinitePointedSimplicialSet::Builder::add_cell(std::uint32_t degree, std::string label) {
    if (degree >= faces_.size()) throw std::out_of_range("Builder::add_cell: degree above maximum");
    labels_[degree].push_back(std::move(label));
    if (degree > 0) faces_[degree].emplace_back(degree + 1);
    return static_cast<std::uint32_t>(labels_[degree].size() - 1);
}

void FinitePointedSimplicialSet::Builder::set_face(std::uint32_t degree, std::uint32_t cell, std::uint32_t i,
                                                   Simplex value) {
    if (degree == 0) throw std::out_of_range("Builder::set_face: 0-simplices have no faces");
    faces_[degree].at(cell).at(i) = value;
}

FinitePointedSimplicialSet FinitePointedSimplicialSet::Builder::build() && {
    FinitePointedSimplicialSet out;
    out.faces_ = std::move(faces_);
    out.labels_ = std::move(labels_);
    // degree-0 cells carry no face table rows; normalize shape
    if (!out.faces_.empty()) out.faces_[0].assign(out.labels_[0].size(), {});
    out.validate();
    return out;
}

std::size_t FinitePointedSimplicialSet::cell_count(std::uint32_t degree) const {
    return degree < labels_.size() ? labels_[degree].size() : 0;
}

const std::string& FinitePointedSimplicialSet::cell_label(std::uint32_t degree, std::uint32_t cell) const {
    return labels_.at(degree).at(cell);
}

Simplex FinitePointedSimplicialSet::basepoint(std::uint32_t degree) const {
    return Simplex{0, 0, degree == 0 ? 0 : ((1ull << degree) - 1)};
}

Simplex FinitePointedSimplicialSet::face(const Simplex& x, std::uint32_t i) const {
    std::uint32_t n = x.degree();
    if (n == 0 || i > n) throw std::out_of_range("face: index out of range");
    if (x.repeats == 0) {
        return faces_.at(x.cell_degree).at(x.cell).at(i);
    }
    ez::FaceResult fr = ez::face_surjection(x.repeats, n, i);
    if (fr.surjective) return Simplex{x.cell, x.cell_degree, fr.repeats};
    // alpha o delta_i = delta_j o beta: take the stored face d_j of the cell,
    // then pull back along beta.
    Simplex f = faces_.at(x.cell_degree).at(x.cell).at(fr.missing_value);
    std::uint64_t total = ez::compose_surjections(f.repeats, fr.beta_repeats, n - 1);
    return Simplex{f.cell, f.cell_degree, total};
}

Simplex FinitePointedSimplicialSet::degeneracy(const Simplex& x, std::uint32_t i) const {
    std::uint32_t n = x.degree();
    if (i > n) throw std::out_of_range("degeneracy: index out of range");
    return Simplex{x.cell, x.cell_degree, ez::degeneracy_surjection(x.repeats, n, i)};
}

void FinitePointedSimplicialSet::validate() const {
    for (std::uint32_t d = 1; d < faces_.size(); ++d) {
        if (faces_[d].size() != labels_[d].size())
            throw std::logic_error("simplicial set: face table size mismatch");
        for (std::uint32_t c = 0; c < faces_[d].size(); ++c) {
            for (std::uint32_t i = 0; i <= d; ++i)
                if (faces_[d][c][i].degree() != d - 1)
                    throw std::logic_error("simplicial set: face has wrong degree");
            if (d < 2) continue;
            Simplex x{c, d, 0};
            for (std::uint32_t j = 1; j <= d; ++j)
                for (std::uint32_t i = 0; i < j; ++i) {
                    Simplex a = face(face(x, j), i);
                    Simplex b = face(face(x, i), j - 1);
                    if (!(a == b)) throw std::logic_error("simplicial set: d_i d_j identity fails");
                }
        }
    }
}

linalg::IntegerChainComplex FinitePointedSimplicialSet::chain_complex(bool reduced) const {
    std::uint32_t top = max_degree();
    std::vector<std::size_t> dims(top + 1);
    for (std::uint32_t d = 0; d <= top; ++d) {
        dims[d] = cell_count(d);
        if (reduced && d == 0) dims[d] -= 1;  // drop the basepoint generator
    }
    std::vector<linalg::SparseIntMatrix> bnd;
    for (std::uint32_t d = 1; d <= top; ++d) {
        linalg::SparseIntMatrix mat(dims[d - 1], dims[d]);
        std::uint32_t row_shift = (reduced && d == 1) ? 1 : 0;
        std::uint32_t col_shift = 0;  // no cells above degree 0 are dropped
        for (std::uint32_t c = 0; c < cell_count(d); ++c) {
            for (std::uint32_t i = 0; i <= d; ++i) {
                const Simplex& f = faces_[d][c][i];
                if (f.is_degenerate()) continue;  // zero in normalized chains
                if (reduced && d == 1 && f.cell == 0) continue;
                mat.add(f.cell - row_shift, c - col_shift, (i % 2 == 0) ? Int(1) : Int(-1));
            }
        }
        bnd.push_back(std::move(mat));
    }
    return linalg::IntegerChainComplex(std::move(dims), std::move(bnd));
}

std::vector<linalg::FiniteAbelianGroup> FinitePointedSimplicialSet::homology() const {
    return linalg::homology(chain_complex(false));
}

std::vector<linalg::FiniteAbelianGroup> FinitePointedSimplicialSet::reduced_homology() const {
    return linalg::homology(chain_complex(true));
}

}  // namespace cyclobar::simplicial
