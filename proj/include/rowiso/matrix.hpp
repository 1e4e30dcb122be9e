// rowiso: dense complex matrix core.
//
// Thin layer over Eigen that fixes the numeric conventions the rest of the
// library relies on:
//   * all comparisons are entrywise sup-norm against Tolerance::atol;
//     comparisons of assembled products scale atol by the matrix dimension
//   * numeric rank cuts keep values above atol * max(largest, 1); the
//     absolute floor makes pure rounding noise rank 0.  Column spans cut on
//     singular values, defect ranges on the gram eigenvalues (whose roots
//     would sit at sqrt(eps) for a numerically unitary input)
//   * eigen/singular bases are made deterministic by sorting eigenvalues in
//     descending order and fixing each vector's phase so that its largest
//     component is real and positive

#ifndef ROWISO_MATRIX_HPP
#define ROWISO_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rowiso/errors.hpp"

namespace rowiso {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Tolerance {
    double atol = 1.0e-10;

    double scaled(Eigen::Index dim) const {
        return atol * static_cast<double>(std::max<Eigen::Index>(dim, 1));
    }
};

// Sup-norm of the entries; 0 for an empty matrix.
inline double max_abs(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

inline bool entries_finite(const CMatrix& m) { return m.size() == 0 || m.allFinite(); }

// Largest singular value; 0 for an empty matrix.
inline double spectral_norm(const CMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

inline CMatrix identity_like(Eigen::Index n) { return CMatrix::Identity(n, n); }

// Kronecker product with the row-major (left factor slow) index convention
// used for tensor products throughout.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Multiplies each column by a unimodular scalar so its largest-modulus entry
// becomes real and positive (ties broken by the smallest index).  Columns
// that are numerically zero are left alone.
inline void phase_fix_columns(CMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index best = 0;
        double best_abs = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double a = std::abs(m(i, j));
            if (a > best_abs) { best_abs = a; best = i; }
        }
        if (best_abs > 0.0) m.col(j) *= std::conj(m(best, j)) / best_abs;
    }
}

struct OperatorClass {
    bool isometry = false;
    bool coisometry = false;
    bool unitary = false;
    bool contraction = false;
};

inline OperatorClass operator_class(const CMatrix& m, Tolerance tol = {}) {
    OperatorClass c;
    const CMatrix gram = m.adjoint() * m;
    const CMatrix cogram = m * m.adjoint();
    c.isometry = max_abs(gram - identity_like(m.cols())) <= tol.scaled(m.cols());
    c.coisometry = max_abs(cogram - identity_like(m.rows())) <= tol.scaled(m.rows());
    c.unitary = c.isometry && c.coisometry;
    c.contraction = spectral_norm(m) <= 1.0 + tol.atol;
    return c;
}

namespace detail {

// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
// descending order and phase-fixed eigenvectors.
struct HermEig {
    Eigen::VectorXd values;
    CMatrix vectors;
};

inline HermEig hermitian_eig(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    if (es.info() != Eigen::Success) throw Error("hermitian_eig: eigensolver failed");
    const Eigen::Index n = m.rows();
    // Stable descending reorder: repeated eigenvalues keep the solver's
    // order, so degenerate defects get a reproducible basis (the identity
    // gram yields the coordinate basis in coordinate order).
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return es.eigenvalues()(a) > es.eigenvalues()(b);
    });
    HermEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = es.eigenvalues()(order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    }
    phase_fix_columns(out.vectors);
    return out;
}

// Square root of a Hermitian PSD matrix; eigenvalues in [-neg_slack, 0) are
// clamped to 0, anything below raises NotPsd.
inline CMatrix hermitian_sqrt_clamped(const CMatrix& m, Tolerance tol, double neg_slack) {
    if (m.rows() != m.cols()) throw NotHermitian("hermitian_sqrt: matrix is not square");
    if (max_abs(m - m.adjoint()) > tol.scaled(m.rows()))
        throw NotHermitian("hermitian_sqrt: matrix is not Hermitian within tolerance");
    if (m.rows() == 0) return m;
    HermEig eig = hermitian_eig((m + m.adjoint()) / 2.0);
    Eigen::VectorXd roots(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        double v = eig.values(i);
        if (v < -neg_slack)
            throw NotPsd("hermitian_sqrt: eigenvalue " + std::to_string(v) + " below tolerance");
        roots(i) = std::sqrt(std::max(v, 0.0));
    }
    CMatrix r = eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
    return (r + r.adjoint()) / 2.0;  // symmetrize away rounding skew
}

}  // namespace detail

inline CMatrix hermitian_sqrt(const CMatrix& m, Tolerance tol = {}) {
    CMatrix r = detail::hermitian_sqrt_clamped(m, tol, tol.atol);
    if (max_abs(r * r - m) > tol.scaled(m.rows()) * 10.0)
        throw Error("hermitian_sqrt: square does not reproduce the input");
    return r;
}

// Defect operators and compressed defect-range bases of a contraction.
// T may be rectangular; defect acts on the domain, defect_star on the
// codomain.  range / range_star have orthonormal columns spanning the
// numerical ranges of defect / defect_star, ordered by descending defect
// singular value.
struct DefectPair {
    CMatrix defect;       // D_T = sqrt(I - T* T), cols(T) x cols(T)
    CMatrix defect_star;  // D_T* = sqrt(I - T T*), rows(T) x rows(T)
    CMatrix range;        // cols(T) x rank
    CMatrix range_star;   // rows(T) x rank_star
};

namespace detail {

// Shared square-root + range-basis extraction from one eigendecomposition.
inline void defect_from_gram(const CMatrix& gram, Tolerance tol, double neg_slack,
                             CMatrix& defect, CMatrix& range) {
    const Eigen::Index n = gram.rows();
    if (n == 0) { defect = gram; range = CMatrix(0, 0); return; }
    HermEig eig = hermitian_eig((gram + gram.adjoint()) / 2.0);
    Eigen::VectorXd roots(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = eig.values(i);
        if (v < -neg_slack)
            throw NotPsd("defect_pair: defect eigenvalue " + std::to_string(v) + " below tolerance");
        roots(i) = std::sqrt(std::max(v, 0.0));
    }
    defect = eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
    defect = (defect + defect.adjoint()) / 2.0;
    // Rank cut on the gram eigenvalues, not their roots: for a numerically
    // unitary T the gram is rounding noise at scale eps, but the roots sit
    // at sqrt(eps), which an atol cut relative to 1 would keep.
    const double cut = tol.atol * std::max(eig.values(0), 1.0);
    Eigen::Index rank = 0;
    while (rank < n && eig.values(rank) > cut) ++rank;  // eigenvalues are descending
    range = eig.vectors.leftCols(rank);
}

}  // namespace detail

inline DefectPair defect_pair(const CMatrix& t, Tolerance tol = {}) {
    if (spectral_norm(t) > 1.0 + tol.atol)
        throw NotContraction("defect_pair: spectral norm exceeds 1");
    // A contraction passing the gate at sigma = 1 + atol can push eigenvalues
    // of I - T*T down to -(2 atol + atol^2); widen the PSD clamp accordingly.
    const double slack = 2.0 * tol.atol + tol.atol * tol.atol;
    DefectPair out;
    detail::defect_from_gram(identity_like(t.cols()) - t.adjoint() * t, tol, slack,
                             out.defect, out.range);
    detail::defect_from_gram(identity_like(t.rows()) - t * t.adjoint(), tol, slack,
                             out.defect_star, out.range_star);
    return out;
}

// Moore-Penrose pseudoinverse with singular values cut at atol * sigma_max.
inline CMatrix pseudo_inverse(const CMatrix& m, Tolerance tol = {}) {
    if (m.rows() == 0 || m.cols() == 0) return CMatrix::Zero(m.cols(), m.rows());
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cut = tol.atol * sv(0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Orthonormal basis of the numerical column span (rank cut with the absolute
// floor, see header comment).
inline CMatrix orthonormal_range(const CMatrix& m, Tolerance tol = {}) {
    if (m.rows() == 0 || m.cols() == 0) return CMatrix(m.rows(), 0);
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cut = tol.atol * std::max(sv(0), 1.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    CMatrix basis = svd.matrixU().leftCols(rank);
    phase_fix_columns(basis);
    return basis;
}

// Least-squares solution X of L X R = Rhs via pseudoinverses, with the
// achieved sup-norm residual.  Exact when the data are consistent.
struct SandwichSolution {
    CMatrix x;
    double residual = 0.0;
};

inline SandwichSolution solve_sandwich(const CMatrix& l, const CMatrix& rhs, const CMatrix& r,
                                       Tolerance tol = {}) {
    if (l.rows() != rhs.rows() || r.cols() != rhs.cols())
        throw ValidationError("solve_sandwich: incompatible shapes");
    SandwichSolution out;
    out.x = pseudo_inverse(l, tol) * rhs * pseudo_inverse(r, tol);
    out.residual = max_abs(l * out.x * r - rhs);
    return out;
}

// Deterministic unitary completion: returns square Q with Q e_1 = w.
// Built from a single Householder reflection, so columns 2..n are an
// orthonormal basis of w-perp fixed by w alone.
inline CMatrix complete_to_unitary(const CVector& w, Tolerance tol = {}) {
    const Eigen::Index n = w.size();
    if (n == 0) throw ValidationError("complete_to_unitary: empty vector");
    if (std::abs(w.norm() - 1.0) > std::max(tol.atol, 1e-8))
        throw ValidationError("complete_to_unitary: vector is not unit");
    const double a0 = std::abs(w(0));
    const Complex phi = a0 > 0.0 ? Complex(w(0) / a0) : Complex(1.0, 0.0);
    CVector v = w;
    v(0) += phi;
    const double vn2 = v.squaredNorm();
    CMatrix q = identity_like(n);
    if (vn2 > 0.0) q -= (2.0 / vn2) * (v * v.adjoint());
    return -phi * q;
}

}  // namespace rowiso

#endif  // ROWISO_MATRIX_HPP
