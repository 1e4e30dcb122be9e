// rowiso: transfer functions of system matrices and their realization check.
//
// Coefficients follow the monomial convention z^alpha = z_{a_r} ... z_{a_1}
// for alpha = a_1 ... a_r, so a series is stored by the word alpha itself:
//   Theta_0 = D,   Theta_alpha = C A_{a_r} ... A_{a_2} B_{a_1}.
// The realization check compares these against the kernel column
// K(alpha, 0) of the geometry the system matrix was read from.

#ifndef ROWISO_TRANSFER_HPP
#define ROWISO_TRANSFER_HPP

#include <string>
#include <vector>

#include "rowiso/errors.hpp"
#include "rowiso/kernel.hpp"
#include "rowiso/matrix.hpp"
#include "rowiso/space.hpp"
#include "rowiso/system_matrix.hpp"
#include "rowiso/words.hpp"

namespace rowiso {

// Matrix coefficients indexed by words of length <= degree in length-lex
// order; all coefficients share one shape (dim_y x dim_u).
struct FormalSeries {
    int d = 1;
    int degree = 0;
    std::vector<CMatrix> coeffs;

    const CMatrix& coeff(const Word& w) const {
        if (static_cast<int>(w.length()) > degree)
            throw ValidationError("FormalSeries: word '" + w.str() + "' beyond degree " +
                                  std::to_string(degree));
        return coeffs.at(word_rank(d, w));
    }

    Eigen::Index rows() const { return coeffs.empty() ? 0 : coeffs[0].rows(); }
    Eigen::Index cols() const { return coeffs.empty() ? 0 : coeffs[0].cols(); }

    void validate_shapes() const {
        if (d < 1) throw ValidationError("FormalSeries: d must be >= 1");
        if (coeffs.size() != word_count(d, degree))
            throw ValidationError("FormalSeries: coefficient count does not match degree");
        for (const CMatrix& c : coeffs)
            if (c.rows() != rows() || c.cols() != cols())
                throw ValidationError("FormalSeries: ragged coefficient shapes");
    }
};

inline double series_max_dev(const FormalSeries& a, const FormalSeries& b) {
    if (a.d != b.d || a.degree != b.degree || a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError("series_max_dev: incompatible series");
    double dev = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        dev = std::max(dev, max_abs(a.coeffs[i] - b.coeffs[i]));
    return dev;
}

// Reads the colligation blocks off a row isometry with embeddings:
//   A_k = P_H V_k^*|_H,  B_k = P_H V_k^* i_0,  C = j_0^*|_H,  D = j_0^* i_0.
// Requires V_k^* i_0 to land in H (wandering-type input data) and H to be
// co-invariant; the graded constructions in this library satisfy both.
inline SystemMatrix system_matrix(const RowIsometryTrunc& v, const Embedding& i0,
                                  const Embedding& j0, Tolerance tol = {}) {
    v.validate_shapes();
    if (!v.space.same_shape(i0.space()) || !v.space.same_shape(j0.space()))
        throw ValidationError("system_matrix: embeddings live in a different space");
    const Eigen::Index n = v.space.dim_h;
    const Eigen::Index dom = v.space.domain_dim();
    SystemMatrix s;
    s.d = v.space.d;
    for (int k = 0; k < s.d; ++k) {
        const CMatrix& vk = v.vk[static_cast<std::size_t>(k)];
        const double coinv = max_abs(vk.block(0, n, n, dom - n));
        if (coinv > tol.scaled(dom))
            throw ValidationError("system_matrix: H is not co-invariant under V_" +
                                  std::to_string(k + 1) + " (dev " + std::to_string(coinv) + ")");
        s.A.push_back(vk.topLeftCorner(n, n).adjoint());
        const CMatrix full = vk.adjoint() * i0.cols();
        const double leak = max_abs(full.bottomRows(dom - n));
        if (leak > tol.atol)
            throw UNotWandering("system_matrix: V_" + std::to_string(k + 1) +
                                "^* i_0 leaks outside H by " + std::to_string(leak));
        s.B.push_back(full.topRows(n));
    }
    s.C = j0.cols().topRows(n).adjoint();
    s.D = j0.cols().adjoint() * i0.cols();
    return s;
}

inline CMatrix series_coefficient(const SystemMatrix& s, const Word& alpha) {
    s.validate_shapes();
    if (alpha.max_letter() > s.d)
        throw ValidationError("series_coefficient: letter exceeds d");
    if (alpha.is_empty()) return s.D;
    CMatrix chain = s.B[static_cast<std::size_t>(alpha.letter(0) - 1)];
    for (std::size_t i = 1; i < alpha.length(); ++i)
        chain = s.A[static_cast<std::size_t>(alpha.letter(i) - 1)] * chain;
    return s.C * chain;
}

inline FormalSeries formal_series(const SystemMatrix& s, int degree) {
    s.validate_shapes();
    if (degree < 0) throw ValidationError("formal_series: degree must be >= 0");
    FormalSeries out;
    out.d = s.d;
    out.degree = degree;
    const std::vector<Word> words = words_up_to(s.d, degree);
    // chains[r] = A_{a_r} ... A_{a_2} B_{a_1}; extending a word by a final
    // letter multiplies by that A on the left, so chains fill in rank order.
    std::vector<CMatrix> chains(words.size());
    out.coeffs.reserve(words.size());
    for (std::size_t r = 0; r < words.size(); ++r) {
        const Word& w = words[r];
        if (w.is_empty()) {
            out.coeffs.push_back(s.D);
            continue;
        }
        if (w.length() == 1) chains[r] = s.B[static_cast<std::size_t>(w.letter(0) - 1)];
        else {
            const std::size_t parent = word_rank(s.d, w.drop_last());
            chains[r] = s.A[static_cast<std::size_t>(w.letter(w.length() - 1) - 1)] * chains[parent];
        }
        out.coeffs.push_back(s.C * chains[r]);
    }
    return out;
}

// Single-variable evaluation Theta(z) = D + C (I - zA)^{-1} zB; the resolvent
// is gated on its condition number.
inline CMatrix eval_theta(const SystemMatrix& s, Complex z, Tolerance tol = {}) {
    s.validate_shapes();
    if (s.d != 1)
        throw ValidationError("eval_theta: pointwise evaluation is single-variable only (d = 1)");
    if (s.dim_h() == 0) return s.D;
    const CMatrix m = identity_like(s.dim_h()) - z * s.A[0];
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1), smax = sv(0);
    if (smin <= tol.atol * smax)
        throw SingularResolvent("eval_theta: I - zA has condition number beyond 1/atol at z = (" +
                                std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
    return s.D + s.C * svd.solve(z * s.B[0]);
}

// Polynomial evaluation of a stored single-variable series (test oracle).
inline CMatrix eval_series(const FormalSeries& f, Complex z) {
    if (f.d != 1) throw ValidationError("eval_series: single-variable only");
    CMatrix out = CMatrix::Zero(f.rows(), f.cols());
    Complex zk = 1.0;
    Word w;
    for (int k = 0; k <= f.degree; ++k) {
        out += zk * f.coeff(w);
        zk *= z;
        w = w.append(1);
    }
    return out;
}

// Transfer coefficients against the kernel column K(alpha, 0) of the same
// geometry; condition (1) of the battery is rechecked first because the
// comparison is only meaningful for analytic kernels.
struct RealizationReport {
    bool pass = true;
    double max_dev = 0.0;
    Word worst;
    ConditionReport analytic;  // condition (1) at maxlen = degree
};

inline RealizationReport verify_realization(const RowIsometryTrunc& v, const Embedding& i0,
                                            const Embedding& j0, int degree, Tolerance tol = {}) {
    if (degree < 0) throw ValidationError("verify_realization: degree must be >= 0");
    ToeplitzKernel kernel(v, i0, j0, tol);
    if (degree > kernel.budget_u() || degree > kernel.budget_y())
        throw TruncationOverflow("verify_realization: degree exceeds the depth budget");
    RealizationReport rep;
    const std::vector<Word> words = words_up_to(v.space.d, degree);
    for (const Word& a : words) {
        if (a.is_empty()) continue;
        detail::score(rep.analytic, max_abs(j0.cols().adjoint() * kernel.u_translate(a)), a,
                      tol.atol);
    }
    const SystemMatrix s = system_matrix(v, i0, j0, tol);
    for (const Word& a : words) {
        const double dev = max_abs(series_coefficient(s, a) - kernel.entry(a, Word::empty()));
        if (dev > rep.max_dev) { rep.max_dev = dev; rep.worst = a; }
    }
    rep.pass = rep.analytic.pass && rep.max_dev <= tol.atol;
    return rep;
}

}  // namespace rowiso

#endif  // ROWISO_TRANSFER_HPP
