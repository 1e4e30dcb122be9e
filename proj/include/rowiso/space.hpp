// rowiso: truncated graded spaces and row isometries on them.
//
// The ambient space is H (+) a U-block for every word of length <= depth,
// laid out in length-lex word order:
//   coordinates [0, dim_h)                       -> H
//   coordinates [dim_h + u*r, dim_h + u*(r+1))   -> U_w, r = rank of w
// Because words are sorted by length, the "domain" (levels <= depth-1) is the
// leading slice of the coordinates, so a truncated row isometry is a matrix
// from the first domain_dim coordinates into all of them.
//
// Truncation discipline: applying V_k to a vector with numerically nonzero
// content at the top level has nowhere to shift it and raises
// TruncationOverflow instead of silently dropping mass.

#ifndef ROWISO_SPACE_HPP
#define ROWISO_SPACE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "rowiso/errors.hpp"
#include "rowiso/matrix.hpp"
#include "rowiso/system_matrix.hpp"
#include "rowiso/words.hpp"

namespace rowiso {

struct GradedSpace {
    int dim_h = 0;
    int dim_u = 0;
    int d = 1;
    int depth = 0;
    std::vector<Word> words;        // words_up_to(d, depth), length-lex
    std::vector<std::size_t> cum;   // cum[r] = #words of length <= r, r = 0..depth

    static GradedSpace make(int dim_h, int dim_u, int d, int depth) {
        if (dim_h < 0 || dim_u < 0) throw ValidationError("GradedSpace: negative dimension");
        if (d < 1) throw ValidationError("GradedSpace: d must be >= 1");
        if (depth < 0) throw DepthTooSmall("GradedSpace: depth must be >= 0");
        GradedSpace s;
        s.dim_h = dim_h;
        s.dim_u = dim_u;
        s.d = d;
        s.depth = depth;
        s.words = words_up_to(d, depth);
        s.cum.resize(static_cast<std::size_t>(depth) + 1);
        for (int r = 0; r <= depth; ++r) s.cum[static_cast<std::size_t>(r)] = word_count(d, r);
        return s;
    }

    Eigen::Index total_dim() const {
        return dim_h + static_cast<Eigen::Index>(words.size()) * dim_u;
    }

    // Levels <= depth-1: the domain of a truncated row isometry.
    Eigen::Index domain_dim() const {
        return dim_h + static_cast<Eigen::Index>(word_count(d, depth - 1)) * dim_u;
    }

    Eigen::Index block_offset(std::size_t rank) const {
        return dim_h + static_cast<Eigen::Index>(rank) * dim_u;
    }

    Eigen::Index block_offset(const Word& w) const { return block_offset(word_rank(d, w)); }

    // Word length of the block containing the rank-th word.
    int level_of_rank(std::size_t rank) const {
        for (int r = 0; r <= depth; ++r)
            if (rank < cum[static_cast<std::size_t>(r)]) return r;
        throw ValidationError("GradedSpace: rank out of range");
    }

    // 0 for H coordinates, block word length otherwise.
    int level_of_index(Eigen::Index i) const {
        if (i < 0 || i >= total_dim()) throw ValidationError("GradedSpace: index out of range");
        if (i < dim_h) return 0;
        return level_of_rank(static_cast<std::size_t>((i - dim_h) / dim_u));
    }

    bool same_shape(const GradedSpace& rhs) const {
        return dim_h == rhs.dim_h && dim_u == rhs.dim_u && d == rhs.d && depth == rhs.depth;
    }
};

// Canonical inclusion of H as the leading coordinates.
inline CMatrix h_inclusion(const GradedSpace& s) {
    CMatrix m = CMatrix::Zero(s.total_dim(), s.dim_h);
    m.topRows(s.dim_h) = CMatrix::Identity(s.dim_h, s.dim_h);
    return m;
}

// Canonical inclusion of the U_w block.
inline CMatrix block_inclusion(const GradedSpace& s, const Word& w) {
    CMatrix m = CMatrix::Zero(s.total_dim(), s.dim_u);
    m.block(s.block_offset(w), 0, s.dim_u, s.dim_u) = CMatrix::Identity(s.dim_u, s.dim_u);
    return m;
}

// Isometric column map into a graded space; construction validates that the
// columns are orthonormal.
class Embedding {
public:
    Embedding(GradedSpace space, CMatrix cols, Tolerance tol = {})
        : space_(std::move(space)), cols_(std::move(cols)) {
        if (cols_.rows() != space_.total_dim())
            throw ValidationError("Embedding: column length differs from total_dim");
        const CMatrix gram = cols_.adjoint() * cols_;
        if (max_abs(gram - identity_like(cols_.cols())) > tol.scaled(cols_.cols()))
            throw ValidationError("Embedding: columns are not orthonormal within tolerance");
    }

    static Embedding h_block(const GradedSpace& s) { return Embedding(s, h_inclusion(s)); }
    static Embedding block(const GradedSpace& s, const Word& w) {
        return Embedding(s, block_inclusion(s, w));
    }

    const GradedSpace& space() const { return space_; }
    const CMatrix& cols() const { return cols_; }
    Eigen::Index dim() const { return cols_.cols(); }

private:
    GradedSpace space_;
    CMatrix cols_;
};

// d matrices total_dim x domain_dim representing the generators of a
// truncated row isometry.
struct RowIsometryTrunc {
    GradedSpace space;
    std::vector<CMatrix> vk;

    int d() const { return static_cast<int>(vk.size()); }

    void validate_shapes() const {
        if (static_cast<int>(vk.size()) != space.d)
            throw ValidationError("RowIsometryTrunc: generator count differs from d");
        for (const CMatrix& v : vk)
            if (v.rows() != space.total_dim() || v.cols() != space.domain_dim())
                throw ValidationError("RowIsometryTrunc: generator has wrong shape");
    }
};

// Smallest L with all content at levels > L below `thresh` in modulus.
inline int support_level(const GradedSpace& s, const CMatrix& x, double thresh) {
    if (x.rows() != s.total_dim()) throw ValidationError("support_level: wrong vector length");
    int level = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double row_abs = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) row_abs = std::max(row_abs, std::abs(x(i, j)));
        if (row_abs > thresh) level = std::max(level, s.level_of_index(i));
    }
    return level;
}

namespace detail {

inline double overflow_thresh(const CMatrix& x, Tolerance tol) {
    return tol.atol * std::max(1.0, max_abs(x));
}

// One generator applied to columns; the part of x beyond the domain must be
// numerically zero or the shift has nowhere to go.
inline CMatrix apply_letter_cols(const RowIsometryTrunc& v, int letter, const CMatrix& x,
                                 double thresh) {
    if (letter < 1 || letter > v.d())
        throw ValidationError("apply_word: letter " + std::to_string(letter) + " out of range");
    const Eigen::Index dom = v.space.domain_dim();
    if (x.rows() != v.space.total_dim()) throw ValidationError("apply_word: wrong vector length");
    const double tail = max_abs(x.bottomRows(x.rows() - dom));
    if (tail > thresh)
        throw TruncationOverflow("apply_word: content of magnitude " + std::to_string(tail) +
                                 " at the top level cannot be shifted");
    return v.vk[static_cast<std::size_t>(letter - 1)] * x.topRows(dom);
}

}  // namespace detail

// V_alpha x for a word alpha = a_1 ... a_r, i.e. V_{a_1} ... V_{a_r} x:
// letters act right to left.
inline CMatrix apply_word_cols(const RowIsometryTrunc& v, const Word& alpha, const CMatrix& x,
                               Tolerance tol = {}) {
    const double thresh = detail::overflow_thresh(x, tol);
    CMatrix cur = x;
    for (std::size_t i = alpha.length(); i-- > 0;)
        cur = detail::apply_letter_cols(v, alpha.letter(i), cur, thresh);
    return cur;
}

inline CVector apply_word(const RowIsometryTrunc& v, const Word& alpha, const CVector& x,
                          Tolerance tol = {}) {
    return apply_word_cols(v, alpha, x, tol);
}

// V_alpha^* x = V_{a_r}^* ... V_{a_1}^* x; results are zero-padded back to the
// ambient dimension, and no truncation can occur.
inline CMatrix apply_word_adjoint_cols(const RowIsometryTrunc& v, const Word& alpha,
                                       const CMatrix& x) {
    if (x.rows() != v.space.total_dim())
        throw ValidationError("apply_word_adjoint: wrong vector length");
    const Eigen::Index total = v.space.total_dim();
    CMatrix cur = x;
    for (std::size_t i = 0; i < alpha.length(); ++i) {
        const int letter = alpha.letter(i);
        if (letter < 1 || letter > v.d())
            throw ValidationError("apply_word_adjoint: letter out of range");
        CMatrix next = CMatrix::Zero(total, cur.cols());
        next.topRows(v.space.domain_dim()) =
            v.vk[static_cast<std::size_t>(letter - 1)].adjoint() * cur;
        cur = std::move(next);
    }
    return cur;
}

// Max deviation of V_i^* V_j from delta_ij I over all generator pairs.
struct RowIsometryReport {
    double max_dev = 0.0;
    int worst_left = 1;   // 1-based generator indices
    int worst_right = 1;
};

inline RowIsometryReport check_row_isometry(const RowIsometryTrunc& v) {
    v.validate_shapes();
    const Eigen::Index dom = v.space.domain_dim();
    RowIsometryReport rep;
    for (int i = 0; i < v.d(); ++i)
        for (int j = 0; j < v.d(); ++j) {
            CMatrix g = v.vk[static_cast<std::size_t>(i)].adjoint() * v.vk[static_cast<std::size_t>(j)];
            if (i == j) g -= CMatrix::Identity(dom, dom);
            const double dev = max_abs(g);
            if (dev > rep.max_dev) { rep.max_dev = dev; rep.worst_left = i + 1; rep.worst_right = j + 1; }
        }
    return rep;
}

// Checks that the translates V_alpha W, |alpha| <= maxlen, are mutually
// orthogonal.  W itself has orthonormal columns and each V_alpha is isometric
// on its domain, so only cross-word pairs are tested.
struct WanderingReport {
    bool wandering = true;
    double max_dev = 0.0;
    Word witness_a, witness_b;  // worst pair (meaningful when max_dev > 0)
};

inline WanderingReport is_wandering(const RowIsometryTrunc& v, const Embedding& w, int maxlen,
                                    Tolerance tol = {}) {
    if (!v.space.same_shape(w.space()))
        throw ValidationError("is_wandering: embedding lives in a different space");
    if (maxlen < 0) throw ValidationError("is_wandering: maxlen must be >= 0");
    const int base = support_level(v.space, w.cols(), tol.atol);
    if (base + maxlen > v.space.depth)
        throw TruncationOverflow("is_wandering: need depth >= " + std::to_string(base + maxlen));
    const std::vector<Word> words = words_up_to(v.space.d, maxlen);
    std::vector<CMatrix> translates;
    translates.reserve(words.size());
    for (const Word& a : words) {
        // translate of a = (first letter) applied to the already computed suffix
        if (a.is_empty()) translates.push_back(w.cols());
        else {
            const std::size_t suffix = word_rank(v.space.d, a.suffix_from(1));
            translates.push_back(apply_word_cols(v, Word({a.letter(0)}), translates[suffix], tol));
        }
    }
    WanderingReport rep;
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j) {
            const double dev = max_abs(translates[i].adjoint() * translates[j]);
            if (dev > rep.max_dev) {
                rep.max_dev = dev;
                rep.witness_a = words[i];
                rep.witness_b = words[j];
            }
        }
    rep.wandering = rep.max_dev <= tol.atol;
    return rep;
}

// Minimal-dilation geometry built from a coisometric system matrix:
//   V_k h        = A_k^* h  (+)  i_0 (B_k^* h)        on H
//   V_k (U_w)    = U_{k w}                            (letter prepended)
// with i_0 the canonical U_0 block inclusion.
struct DilationResult {
    RowIsometryTrunc v;
    Embedding i0;
};

inline DilationResult dilation_row_isometry(const SystemMatrix& s, int depth, Tolerance tol = {}) {
    s.validate_shapes();
    if (depth < 1) throw DepthTooSmall("dilation_row_isometry: depth must be >= 1");
    const CMatrix sigma = s.assemble();
    const double codev = max_abs(sigma * sigma.adjoint() - identity_like(sigma.rows()));
    if (codev > tol.scaled(sigma.rows()))
        throw NotCoisometry("dilation_row_isometry: Sigma Sigma* deviates from I by " +
                            std::to_string(codev));
    const int n = static_cast<int>(s.dim_h());
    const int u = static_cast<int>(s.dim_u());
    GradedSpace space = GradedSpace::make(n, u, s.d, depth);
    const Eigen::Index total = space.total_dim(), dom = space.domain_dim();

    RowIsometryTrunc v;
    v.space = space;
    v.vk.reserve(static_cast<std::size_t>(s.d));
    const std::size_t dom_words = word_count(s.d, depth - 1);
    for (int k = 0; k < s.d; ++k) {
        CMatrix m = CMatrix::Zero(total, dom);
        m.block(0, 0, n, n) = s.A[static_cast<std::size_t>(k)].adjoint();
        m.block(n, 0, u, n) = s.B[static_cast<std::size_t>(k)].adjoint();
        for (std::size_t r = 0; r < dom_words; ++r) {
            const Word target = space.words[r].prepend(k + 1);
            m.block(space.block_offset(target), space.block_offset(r), u, u) =
                CMatrix::Identity(u, u);
        }
        v.vk.push_back(std::move(m));
    }
    return DilationResult{std::move(v), Embedding::block(space, Word::empty())};
}

// Output embedding of the same colligation: j_0 y = C^* y (+) i_0 (D^* y).
inline Embedding sigma_output_embedding(const GradedSpace& space, const SystemMatrix& s,
                                        Tolerance tol = {}) {
    s.validate_shapes();
    if (space.dim_h != s.dim_h() || space.dim_u != s.dim_u() || space.d != s.d)
        throw ValidationError("sigma_output_embedding: space does not match system matrix");
    CMatrix cols = CMatrix::Zero(space.total_dim(), s.dim_y());
    cols.topRows(space.dim_h) = s.C.adjoint();
    cols.block(space.dim_h, 0, space.dim_u, s.dim_y()) = s.D.adjoint();
    return Embedding(space, std::move(cols), tol);
}

}  // namespace rowiso

#endif  // ROWISO_SPACE_HPP
