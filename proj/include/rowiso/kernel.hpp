// rowiso: multi-Toeplitz kernels attached to a row isometry and a pair of
// isometric embeddings.
//
// Given generators V_k, an input embedding i_0 and an output embedding j_0,
// the kernel is K(sigma, omega) = (V_sigma j_0)^* (V_omega i_0).  On a
// truncated space the translates are exact as long as they stay inside the
// depth budget, so every table entry below the budget equals its
// untruncated value up to rounding.
//
// The analyticity battery checks six equivalent descriptions of "K is the
// kernel of a multi-analytic operator":
//   (1) K(0, alpha) = 0 for alpha != 0            (symbol supported on one side)
//   (2) i_0^* V_alpha^* j_0 = 0 for alpha != 0    (adjoint pairing vanishes)
//   (3) j_0 Y is contained in H (+) U_0
//   (4) V_k^* j_0 Y is contained in H for each generator
//   (5) V_alpha^* j_0 Y is contained in H for every word alpha != 0
//   (6) the projector onto Y-translates commutes with every V_alpha on
//       U-blocks, compared band-by-band so truncation cancels exactly:
//       P^(M) V_alpha x = V_alpha P^(M-|alpha|) x for x in U_beta,
//       |alpha| + |beta| <= M  (P^(m) projects onto translates of length <= m)

#ifndef ROWISO_KERNEL_HPP
#define ROWISO_KERNEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rowiso/errors.hpp"
#include "rowiso/matrix.hpp"
#include "rowiso/space.hpp"
#include "rowiso/words.hpp"

namespace rowiso {

class ToeplitzKernel {
public:
    ToeplitzKernel(RowIsometryTrunc v, Embedding i0, Embedding j0, Tolerance tol = {})
        : v_(std::move(v)), i0_(std::move(i0)), j0_(std::move(j0)), tol_(tol) {
        v_.validate_shapes();
        if (!v_.space.same_shape(i0_.space()) || !v_.space.same_shape(j0_.space()))
            throw ValidationError("ToeplitzKernel: embeddings live in a different space");
        budget_u_ = v_.space.depth - support_level(v_.space, i0_.cols(), tol_.atol);
        budget_y_ = v_.space.depth - support_level(v_.space, j0_.cols(), tol_.atol);
        u_tr_.resize(v_.space.words.size());
        y_tr_.resize(v_.space.words.size());
        adj_tr_.resize(v_.space.words.size());
    }

    const RowIsometryTrunc& isometry() const { return v_; }
    const Embedding& input() const { return i0_; }
    const Embedding& output() const { return j0_; }
    const Tolerance& tol() const { return tol_; }

    // Longest words whose translates stay inside the truncation.
    int budget_u() const { return budget_u_; }
    int budget_y() const { return budget_y_; }

    // V_w i_0, cached by word rank.
    const CMatrix& u_translate(const Word& w) {
        return translate(w, u_tr_, i0_.cols(), budget_u_, "input");
    }

    // V_w j_0, cached by word rank.
    const CMatrix& y_translate(const Word& w) {
        return translate(w, y_tr_, j0_.cols(), budget_y_, "output");
    }

    // V_w^* j_0, zero-padded to the ambient dimension; never truncates.
    const CMatrix& adjoint_translate(const Word& w) {
        const std::size_t rank = word_rank(v_.space.d, w);
        if (rank >= adj_tr_.size()) throw ValidationError("adjoint_translate: word too long");
        if (!adj_tr_[rank]) {
            if (w.is_empty()) adj_tr_[rank] = j0_.cols();
            else {
                const CMatrix& parent = adjoint_translate(w.drop_last());
                adj_tr_[rank] =
                    apply_word_adjoint_cols(v_, Word({w.letter(w.length() - 1)}), parent);
            }
        }
        return *adj_tr_[rank];
    }

    // K(sigma, omega) = (V_sigma j_0)^* (V_omega i_0), cached per pair.
    const CMatrix& entry(const Word& sigma, const Word& omega) {
        const std::uint64_t key = pair_key(sigma, omega);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
        CMatrix val = y_translate(sigma).adjoint() * u_translate(omega);
        return entries_.emplace(key, std::move(val)).first->second;
    }

    // All translates of length <= maxlen stacked in word order; used for the
    // single-GEMM table build and for the Y-translate projectors.
    CMatrix stacked_u(int maxlen) { return stack(maxlen, u_tr_, i0_.cols(), budget_u_, "input"); }
    CMatrix stacked_y(int maxlen) { return stack(maxlen, y_tr_, j0_.cols(), budget_y_, "output"); }

    // Fills the entry cache for all pairs up to maxlen with one product.
    void tabulate(int maxlen) {
        const CMatrix ys = stacked_y(maxlen);
        const CMatrix us = stacked_u(maxlen);
        const CMatrix table = ys.adjoint() * us;
        const std::vector<Word> words = words_up_to(v_.space.d, maxlen);
        const Eigen::Index uy = j0_.dim(), uu = i0_.dim();
        for (std::size_t i = 0; i < words.size(); ++i)
            for (std::size_t j = 0; j < words.size(); ++j) {
                const std::uint64_t key = pair_key(words[i], words[j]);
                if (!entries_.count(key))
                    entries_.emplace(key, table.block(static_cast<Eigen::Index>(i) * uy,
                                                      static_cast<Eigen::Index>(j) * uu, uy, uu));
            }
    }

private:
    std::uint64_t pair_key(const Word& sigma, const Word& omega) const {
        const std::uint64_t a = word_rank(v_.space.d, sigma);
        const std::uint64_t b = word_rank(v_.space.d, omega);
        return (a << 32) | b;
    }

    const CMatrix& translate(const Word& w, std::vector<std::optional<CMatrix>>& cache,
                             const CMatrix& base, int budget, const char* side) {
        if (static_cast<int>(w.length()) > budget)
            throw TruncationOverflow(std::string("ToeplitzKernel: ") + side + " translate of '" +
                                     w.str() + "' exceeds the depth budget " +
                                     std::to_string(budget));
        const std::size_t rank = word_rank(v_.space.d, w);
        if (!cache[rank]) {
            if (w.is_empty()) cache[rank] = base;
            else {
                const CMatrix& suffix = translate(w.suffix_from(1), cache, base, budget, side);
                cache[rank] = apply_word_cols(v_, Word({w.letter(0)}), suffix, tol_);
            }
        }
        return *cache[rank];
    }

    CMatrix stack(int maxlen, std::vector<std::optional<CMatrix>>& cache, const CMatrix& base,
                  int budget, const char* side) {
        const std::vector<Word> words = words_up_to(v_.space.d, maxlen);
        const Eigen::Index w = base.cols();
        CMatrix out(v_.space.total_dim(), static_cast<Eigen::Index>(words.size()) * w);
        for (std::size_t i = 0; i < words.size(); ++i)
            out.middleCols(static_cast<Eigen::Index>(i) * w, w) =
                translate(words[i], cache, base, budget, side);
        return out;
    }

    RowIsometryTrunc v_;
    Embedding i0_, j0_;
    Tolerance tol_;
    int budget_u_ = 0, budget_y_ = 0;
    std::vector<std::optional<CMatrix>> u_tr_, y_tr_, adj_tr_;
    std::unordered_map<std::uint64_t, CMatrix> entries_;
};

// Free-function form of the table lookup.
inline const CMatrix& kernel_entry(ToeplitzKernel& k, const Word& sigma, const Word& omega) {
    return k.entry(sigma, omega);
}

// Deviation of the kernel table from the three-case prefix law
//   K(sigma, omega) = K(alpha, 0)  when sigma = omega.alpha
//                   = K(0, alpha)  when omega = sigma.alpha
//                   = 0            when sigma, omega are incomparable.
struct StructureReport {
    bool pass = true;
    double max_dev = 0.0;
    Word worst_sigma, worst_omega;
};

inline StructureReport verify_toeplitz_structure(ToeplitzKernel& k, int maxlen,
                                                 Tolerance tol = {}) {
    if (maxlen < 0) throw ValidationError("verify_toeplitz_structure: maxlen must be >= 0");
    if (maxlen > k.budget_u() || maxlen > k.budget_y())
        throw TruncationOverflow("verify_toeplitz_structure: maxlen exceeds the depth budget");
    k.tabulate(maxlen);
    const std::vector<Word> words = words_up_to(k.isometry().space.d, maxlen);
    StructureReport rep;
    for (const Word& sigma : words)
        for (const Word& omega : words) {
            const PrefixRelation rel = prefix_relation(sigma, omega);
            CMatrix expected;
            switch (rel.kind) {
                case PrefixCase::Equal:
                case PrefixCase::SigmaExtends: expected = k.entry(rel.tail, Word::empty()); break;
                case PrefixCase::OmegaExtends: expected = k.entry(Word::empty(), rel.tail); break;
                case PrefixCase::Incomparable:
                    expected = CMatrix::Zero(k.output().dim(), k.input().dim());
                    break;
            }
            const double dev = max_abs(k.entry(sigma, omega) - expected);
            if (dev > rep.max_dev) { rep.max_dev = dev; rep.worst_sigma = sigma; rep.worst_omega = omega; }
        }
    rep.pass = rep.max_dev <= tol.atol;
    return rep;
}

struct ConditionReport {
    bool pass = true;
    double max_dev = 0.0;
    std::optional<Word> witness;
};

struct BatteryReport {
    // conditions (1)..(6) in the order documented in the header comment
    std::array<ConditionReport, 6> conditions;

    const ConditionReport& cond(int i) const { return conditions.at(static_cast<std::size_t>(i - 1)); }
    ConditionReport& cond(int i) { return conditions.at(static_cast<std::size_t>(i - 1)); }

    bool all_pass() const {
        for (const auto& c : conditions)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline void score(ConditionReport& rep, double dev, const std::optional<Word>& w, double atol) {
    if (dev > rep.max_dev) { rep.max_dev = dev; rep.witness = w; }
    if (dev > atol) rep.pass = false;
}

}  // namespace detail

inline BatteryReport analyticity_battery(ToeplitzKernel& k, int maxlen, Tolerance tol = {}) {
    if (maxlen < 1) throw ValidationError("analyticity_battery: maxlen must be >= 1");
    if (maxlen > k.budget_u())
        throw TruncationOverflow("analyticity_battery: maxlen exceeds the input depth budget");
    if (maxlen > k.budget_y())
        throw TruncationOverflow("analyticity_battery: maxlen exceeds the output depth budget");
    const RowIsometryTrunc& v = k.isometry();
    const GradedSpace& space = v.space;
    const std::vector<Word> words = words_up_to(space.d, maxlen);
    const CMatrix& j0 = k.output().cols();
    BatteryReport rep;

    // (1) and (2): pairings over all nonempty words.
    for (const Word& a : words) {
        if (a.is_empty()) continue;
        detail::score(rep.cond(1), max_abs(j0.adjoint() * k.u_translate(a)), a, tol.atol);
        detail::score(rep.cond(2), max_abs(k.input().cols().adjoint() * k.adjoint_translate(a)), a,
                      tol.atol);
    }

    // (3): j_0 Y inside H (+) U_0.
    {
        CMatrix span(space.total_dim(), space.dim_h + space.dim_u);
        span.leftCols(space.dim_h) = h_inclusion(space);
        span.rightCols(space.dim_u) = block_inclusion(space, Word::empty());
        const CMatrix q = orthonormal_range(span, tol);
        detail::score(rep.cond(3), max_abs(j0 - q * (q.adjoint() * j0)), std::nullopt, tol.atol);
    }

    // (4) single letters and (5) all nonempty words: V_alpha^* j_0 inside H.
    for (const Word& a : words) {
        if (a.is_empty()) continue;
        const CMatrix& back = k.adjoint_translate(a);
        const double dev = max_abs(back.bottomRows(back.rows() - space.dim_h));
        if (a.length() == 1) detail::score(rep.cond(4), dev, a, tol.atol);
        detail::score(rep.cond(5), dev, a, tol.atol);
    }

    // (6) band-matched commutation of the Y-translate projector with V_alpha.
    {
        // Projectors P^(m) onto translates of length <= m.  When the
        // translates are orthonormal (wandering Y_0) they are used directly;
        // otherwise project onto an orthonormal basis of their span.
        std::vector<CMatrix> proj_basis(static_cast<std::size_t>(maxlen) + 1);
        const CMatrix full = k.stacked_y(maxlen);
        const bool orthonormal =
            max_abs(full.adjoint() * full - identity_like(full.cols())) <= tol.scaled(full.cols());
        for (int m = 0; m <= maxlen; ++m) {
            const Eigen::Index cols = static_cast<Eigen::Index>(word_count(space.d, m)) * k.output().dim();
            proj_basis[static_cast<std::size_t>(m)] =
                orthonormal ? CMatrix(full.leftCols(cols))
                            : orthonormal_range(full.leftCols(cols), tol);
        }
        auto project = [&](int m, const CMatrix& x) {
            const CMatrix& q = proj_basis[static_cast<std::size_t>(m)];
            return CMatrix(q * (q.adjoint() * x));
        };
        for (const Word& alpha : words) {
            if (alpha.is_empty()) continue;
            for (const Word& beta : words) {
                if (static_cast<int>(alpha.length() + beta.length()) > maxlen) continue;
                const CMatrix x = block_inclusion(space, beta);
                const CMatrix lhs = project(maxlen, apply_word_cols(v, alpha, x, tol));
                const CMatrix rhs = apply_word_cols(
                    v, alpha, project(maxlen - static_cast<int>(alpha.length()), x), tol);
                detail::score(rep.cond(6), max_abs(lhs - rhs), alpha, tol.atol);
            }
        }
    }
    return rep;
}

// Matrix of the compression P_{Y+} restricted to U+ in the word-ordered
// translate bases; rows require the Y-translates to be orthonormal.
inline CMatrix toeplitz_matrix(ToeplitzKernel& k, int maxlen, Tolerance tol = {}) {
    if (maxlen < 0) throw ValidationError("toeplitz_matrix: maxlen must be >= 0");
    if (maxlen > k.budget_u() || maxlen > k.budget_y())
        throw TruncationOverflow("toeplitz_matrix: maxlen exceeds the depth budget");
    const CMatrix ys = k.stacked_y(maxlen);
    const double dev = max_abs(ys.adjoint() * ys - identity_like(ys.cols()));
    if (dev > tol.scaled(ys.cols()))
        throw YNotWandering("toeplitz_matrix: Y-translates deviate from orthonormal by " +
                            std::to_string(dev));
    return ys.adjoint() * k.stacked_u(maxlen);
}

// Largest spectral norm over all kernel entries up to maxlen.
inline double max_entry_norm(ToeplitzKernel& k, int maxlen) {
    k.tabulate(maxlen);
    const std::vector<Word> words = words_up_to(k.isometry().space.d, maxlen);
    double worst = 0.0;
    for (const Word& s : words)
        for (const Word& o : words) worst = std::max(worst, spectral_norm(k.entry(s, o)));
    return worst;
}

}  // namespace rowiso

#endif  // ROWISO_KERNEL_HPP
