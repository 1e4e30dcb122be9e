// rowiso: contractive liftings T = [[S, 0], [Q, R]] and their transfer data.
//
// A row contraction T on H = H_S (+) H_R that leaves H_R co-invariant in each
// slot splits into blocks S_k (top left), R_k (bottom right) and couplings
// Q_k (bottom left).  T is a contraction exactly when the coupling row factors
// as Q = D_{R*} gamma* D_S for a contraction gamma : ran D_{R*} -> ran D_S.
// This module recovers gamma from the blocks, builds the associated transfer
// colligation on the state space H_R, and realises the output geometry inside
// the dilation of T.

#ifndef ROWISO_LIFTING_HPP
#define ROWISO_LIFTING_HPP

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "rowiso/characteristic.hpp"
#include "rowiso/errors.hpp"
#include "rowiso/matrix.hpp"
#include "rowiso/space.hpp"
#include "rowiso/system_matrix.hpp"
#include "rowiso/transfer.hpp"

namespace rowiso {

struct LiftingSplit {
    int d = 1;
    Eigen::Index dim_s = 0;
    Eigen::Index dim_r = 0;
    std::vector<CMatrix> s;  // d blocks, dim_s x dim_s
    std::vector<CMatrix> q;  // d blocks, dim_r x dim_s
    std::vector<CMatrix> r;  // d blocks, dim_r x dim_r

    Eigen::Index dim() const { return dim_s + dim_r; }

    CMatrix t_block(int k) const {
        const auto ku = static_cast<std::size_t>(k);
        CMatrix m = CMatrix::Zero(dim(), dim());
        m.topLeftCorner(dim_s, dim_s) = s[ku];
        m.bottomLeftCorner(dim_r, dim_s) = q[ku];
        m.bottomRightCorner(dim_r, dim_r) = r[ku];
        return m;
    }

    RowContraction as_contraction() const {
        RowContraction t;
        t.d = d;
        for (int k = 0; k < d; ++k) t.t.push_back(t_block(k));
        return t;
    }

    CMatrix s_row() const { return stack_row(s, dim_s, dim_s); }
    CMatrix q_row() const { return stack_row(q, dim_r, dim_s); }
    CMatrix r_row() const { return stack_row(r, dim_r, dim_r); }

    void validate(Tolerance tol = {}) const {
        if (d < 1) throw ValidationError("LiftingSplit: d must be >= 1");
        if (dim_s < 0 || dim_r < 0) throw ValidationError("LiftingSplit: negative block size");
        if (static_cast<int>(s.size()) != d || static_cast<int>(q.size()) != d ||
            static_cast<int>(r.size()) != d)
            throw ValidationError("LiftingSplit: need exactly d blocks per slot");
        for (int k = 0; k < d; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            if (s[ku].rows() != dim_s || s[ku].cols() != dim_s ||
                q[ku].rows() != dim_r || q[ku].cols() != dim_s ||
                r[ku].rows() != dim_r || r[ku].cols() != dim_r)
                throw ValidationError("LiftingSplit: block shape mismatch in slot " + std::to_string(k + 1));
        }
        as_contraction().validate(tol);
    }

    // Splits assembled blocks T_k along a leading subspace of size dim_s.  The
    // upper-right corner of every slot must vanish.
    static LiftingSplit from_blocks(const std::vector<CMatrix>& t, Eigen::Index dim_s,
                                    Tolerance tol = {}) {
        if (t.empty()) throw ValidationError("LiftingSplit: need at least one block");
        const Eigen::Index n = t[0].rows();
        if (dim_s < 0 || dim_s > n)
            throw ValidationError("LiftingSplit: dim_s out of range");
        LiftingSplit out;
        out.d = static_cast<int>(t.size());
        out.dim_s = dim_s;
        out.dim_r = n - dim_s;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k].rows() != n || t[k].cols() != n)
                throw ValidationError("LiftingSplit: blocks must be square of equal size");
            const double leak = max_abs(t[k].topRightCorner(dim_s, out.dim_r));
            if (leak > tol.atol * std::max(1.0, max_abs(t[k])))
                throw ValidationError("LiftingSplit: slot " + std::to_string(k + 1) +
                                      " does not leave the lower subspace co-invariant");
            out.s.push_back(t[k].topLeftCorner(dim_s, dim_s));
            out.q.push_back(t[k].bottomLeftCorner(out.dim_r, dim_s));
            out.r.push_back(t[k].bottomRightCorner(out.dim_r, out.dim_r));
        }
        return out;
    }

  private:
    static CMatrix stack_row(const std::vector<CMatrix>& blocks, Eigen::Index rows, Eigen::Index cols) {
        CMatrix m(rows, static_cast<Eigen::Index>(blocks.size()) * cols);
        for (std::size_t k = 0; k < blocks.size(); ++k)
            m.middleCols(static_cast<Eigen::Index>(k) * cols, cols) = blocks[k];
        return m;
    }
};

// Defect data of the three rows plus the lifting parameter in range
// coordinates: gamma maps ran D_{R*} -> ran D_S, stored as a
// (dim ran D_S) x (dim ran D_{R*}) matrix against the range bases.
struct LiftingModel {
    LiftingSplit split;
    CMatrix gamma;
    DefectPair full;    // of the assembled row T
    DefectPair top;     // of the row S
    DefectPair bottom;  // of the row R
    SystemMatrix sys;   // colligation with state space H_R
};

// Recovers gamma from Q = D_{R*} gamma* D_S.  Throws InconsistentLifting when
// the coupling is not of that form or the recovered gamma is not contractive.
inline CMatrix extract_gamma(const LiftingSplit& split, Tolerance tol = {}) {
    split.validate(tol);
    const DefectPair top = defect_pair(split.s_row(), tol);
    const DefectPair bottom = defect_pair(split.r_row(), tol);
    const CMatrix lhs = bottom.defect_star * bottom.range_star;  // D_{R*} on ran-basis
    const CMatrix rhs = top.range.adjoint() * top.defect;        // ran-basis coords of D_S
    const SandwichSolution sol = solve_sandwich(lhs, split.q_row(), rhs, tol);
    const double scale = std::max(1.0, max_abs(split.q_row()));
    const double budget = tol.scaled(std::max(split.dim_r, rhs.cols())) * scale;
    if (sol.residual > budget)
        throw InconsistentLifting("extract_gamma: coupling row does not factor through the defects (residual " +
                                  std::to_string(sol.residual) + ")");
    CMatrix gamma = sol.x.adjoint();
    const double norm = spectral_norm(gamma);
    if (norm > 1.0 + tol.atol)
        throw InconsistentLifting("extract_gamma: recovered gamma has norm " + std::to_string(norm));
    return gamma;
}

namespace detail {

// Block-diagonal selector picking the S-rows (pick_top) or R-rows of every
// slot of (+)^d (H_S (+) H_R).
inline CMatrix slot_selector(const LiftingSplit& split, bool pick_top) {
    const Eigen::Index n = split.dim();
    const Eigen::Index rows = pick_top ? split.dim_s : split.dim_r;
    const Eigen::Index off = pick_top ? 0 : split.dim_s;
    CMatrix sel = CMatrix::Zero(static_cast<Eigen::Index>(split.d) * rows,
                                static_cast<Eigen::Index>(split.d) * n);
    for (int k = 0; k < split.d; ++k)
        sel.block(static_cast<Eigen::Index>(k) * rows, static_cast<Eigen::Index>(k) * n + off, rows, rows) =
            CMatrix::Identity(rows, rows);
    return sel;
}

}  // namespace detail

// Transfer colligation of the lifting: state space H_R with
//   A_k = R_k*,   B_k = P_{H_R} (slot k of D_T) on ran D_T,
//   C = gamma D_{R*} on H_R,   D fixed by
//   D (D_T h) = (D_S - gamma D_{R*} Q) h_S - gamma R D_R h_R.
// Input space is ran D_T, output space ran D_S, both in range coordinates.
inline LiftingModel lifting_system(const LiftingSplit& split, const CMatrix& gamma,
                                   Tolerance tol = {}) {
    split.validate(tol);
    LiftingModel m;
    m.split = split;
    m.full = defect_pair(split.as_contraction().row(), tol);
    m.top = defect_pair(split.s_row(), tol);
    m.bottom = defect_pair(split.r_row(), tol);
    if (gamma.rows() != m.top.range.cols() || gamma.cols() != m.bottom.range_star.cols())
        throw ValidationError("lifting_system: gamma shape does not match the defect ranks");
    if (spectral_norm(gamma) > 1.0 + tol.atol)
        throw NotContraction("lifting_system: gamma must be contractive");
    m.gamma = gamma;

    const Eigen::Index n = split.dim();
    const Eigen::Index nr = split.dim_r;
    const CMatrix dt_coords = m.full.range.adjoint() * m.full.defect;  // ran D_T coords of D_T
    m.sys.d = split.d;
    for (int k = 0; k < split.d; ++k) {
        m.sys.A.push_back(split.r[static_cast<std::size_t>(k)].adjoint());
        // Rows of slot k of D_T |ran-basis that land in H_R.
        m.sys.B.push_back(
            (m.full.defect * m.full.range).middleRows(static_cast<Eigen::Index>(k) * n + split.dim_s, nr));
    }
    m.sys.C = gamma * m.bottom.range_star.adjoint() * m.bottom.defect_star;

    const CMatrix sel_s = detail::slot_selector(split, true);
    const CMatrix sel_r = detail::slot_selector(split, false);
    const CMatrix gamma_amb = m.top.range * gamma * m.bottom.range_star.adjoint();  // H_R -> (+)^d H_S
    const CMatrix rhs_amb = m.top.defect * sel_s -
                            gamma_amb * (m.bottom.defect_star * split.q_row() * sel_s +
                                         split.r_row() * m.bottom.defect * sel_r);
    const CMatrix lhs = CMatrix::Identity(m.top.range.cols(), m.top.range.cols());
    const SandwichSolution sol = solve_sandwich(lhs, m.top.range.adjoint() * rhs_amb, dt_coords, tol);
    if (sol.residual > tol.scaled(static_cast<Eigen::Index>(split.d) * n) * std::max(1.0, max_abs(rhs_amb)))
        throw InconsistentLifting("lifting_system: feedthrough equation has no exact solution (residual " +
                                  std::to_string(sol.residual) + ")");
    m.sys.D = sol.x;
    m.sys.validate_shapes();
    return m;
}

// Theta(z) = D + gamma D_{R*} (I - z R*)^{-1} P_{H_R} z D_T in range
// coordinates; identical to the colligation transfer, single-variable only.
inline CMatrix lifting_eval(const LiftingModel& m, Complex z, Tolerance tol = {}) {
    return eval_theta(m.sys, z, tol);
}

struct RestrictionReport {
    bool pass = false;
    double max_dev_r = 0.0;
    double max_dev_s = 0.0;
    Complex worst_z{0.0, 0.0};
};

// Checks the two closed forms of Theta(z) on the defect vectors coming from
// each half of H (single-variable case):
//   Theta(z) D_T h_R = gamma (-R + D_{R*} (I - z R*)^{-1} z D_R) D_R h_R,
//   Theta(z) D_T h_S = (I - gamma D_{R*} (I - z R*)^{-1} D_{R*} gamma*) D_S h_S.
inline RestrictionReport verify_restrictions(const LiftingModel& m,
                                             const std::vector<Complex>& z_points,
                                             Tolerance tol = {}) {
    if (m.split.d != 1)
        throw ValidationError("verify_restrictions: single-variable liftings only");
    const Eigen::Index nr = m.split.dim_r;
    const CMatrix r = m.split.r_row();
    const CMatrix d_r = m.bottom.defect;
    const CMatrix d_rs = m.bottom.defect_star;
    const CMatrix iota_s = detail::slot_selector(m.split, true).adjoint();
    const CMatrix iota_r = detail::slot_selector(m.split, false).adjoint();
    const CMatrix dt_s = m.full.range.adjoint() * m.full.defect * iota_s;
    const CMatrix dt_r = m.full.range.adjoint() * m.full.defect * iota_r;
    const CMatrix ds_coords = m.top.range.adjoint() * m.top.defect;    // ran D_S coords of D_S
    const CMatrix gamma_rs = m.gamma * m.bottom.range_star.adjoint();  // H_R -> ran D_S coords
    const CMatrix eye = CMatrix::Identity(nr, nr);

    RestrictionReport rep;
    rep.pass = true;
    for (const Complex z : z_points) {
        const CMatrix theta = lifting_eval(m, z, tol);
        Eigen::JacobiSVD<CMatrix> svd(eye - z * r.adjoint(), Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (nr > 0) {
            const double smax = svd.singularValues()(0);
            const double smin = svd.singularValues()(svd.singularValues().size() - 1);
            if (smin <= tol.atol * smax)
                throw SingularResolvent("verify_restrictions: I - z R* is singular");
        }
        const CMatrix resolvent_dr = nr > 0 ? CMatrix(svd.solve(z * d_r)) : CMatrix::Zero(nr, nr);
        const CMatrix rhs_r = gamma_rs * ((-r + d_rs * resolvent_dr) * d_r);
        const CMatrix resolvent_rs = nr > 0 ? CMatrix(svd.solve(d_rs * m.bottom.range_star * m.gamma.adjoint()))
                                            : CMatrix::Zero(nr, m.gamma.rows());
        const CMatrix rhs_s = ds_coords - gamma_rs * d_rs * resolvent_rs * ds_coords;
        const double dev_r = max_abs(theta * dt_r - rhs_r);
        const double dev_s = max_abs(theta * dt_s - rhs_s);
        if (std::max(dev_r, dev_s) > std::max(rep.max_dev_r, rep.max_dev_s))
            rep.worst_z = z;
        rep.max_dev_r = std::max(rep.max_dev_r, dev_r);
        rep.max_dev_s = std::max(rep.max_dev_s, dev_s);
    }
    rep.pass = std::max(rep.max_dev_r, rep.max_dev_s) <= tol.atol;
    return rep;
}

// Dilation of the assembled T with the output embedding replaced by the
// lifting geometry: j0 sends the defect vector D_S h of h in H_S to
// (V - S) h, which lands in H_R (+) U_0 and spans the gap between H_S and
// span{H_S, V H_S}.
inline DilationTriple lifting_geometry(const LiftingSplit& split, const CMatrix& gamma,
                                       int depth, Tolerance tol = {}) {
    const LiftingModel m = lifting_system(split, gamma, tol);
    DilationTriple base = nagy_foias_dilation(split.as_contraction(), depth, tol);
    const GradedSpace& sp = base.v.space;
    const Eigen::Index n = split.dim();
    const Eigen::Index ys = m.top.range.cols();

    // h_S rows solving D_S h = (ran D_S basis column), slot by slot.
    const CMatrix hmat = pseudo_inverse(m.top.defect, tol) * m.top.range;
    const CMatrix iota_h = h_inclusion(sp);
    CMatrix cols = CMatrix::Zero(sp.total_dim(), ys);
    for (int k = 0; k < split.d; ++k) {
        CMatrix amb = CMatrix::Zero(n, ys);
        amb.topRows(split.dim_s) = hmat.middleRows(static_cast<Eigen::Index>(k) * split.dim_s, split.dim_s);
        cols += base.v.vk[static_cast<std::size_t>(k)].leftCols(n) * amb;
    }
    CMatrix amb0 = CMatrix::Zero(n, ys);
    amb0.topRows(split.dim_s) = split.s_row() * hmat;
    cols -= iota_h * amb0;

    const double gram_dev = max_abs(CMatrix(cols.adjoint() * cols - CMatrix::Identity(ys, ys)));
    if (gram_dev > tol.scaled(ys))
        throw InconsistentLifting("lifting_geometry: output columns are not orthonormal (dev " +
                                  std::to_string(gram_dev) + ")");

    // ran j0 must sit inside span{H_S, V H_S} with no H_S component.
    CMatrix iota_hs = CMatrix::Zero(sp.total_dim(), split.dim_s);
    iota_hs.topRows(split.dim_s) = CMatrix::Identity(split.dim_s, split.dim_s);
    if (max_abs(CMatrix(iota_hs.adjoint() * cols)) > tol.scaled(sp.total_dim()))
        throw InconsistentLifting("lifting_geometry: output columns meet H_S");
    CMatrix span(sp.total_dim(), split.dim_s * (1 + split.d));
    span.leftCols(split.dim_s) = iota_hs;
    for (int k = 0; k < split.d; ++k)
        span.middleCols(static_cast<Eigen::Index>(1 + k) * split.dim_s, split.dim_s) =
            base.v.vk[static_cast<std::size_t>(k)].leftCols(n) * iota_hs.topRows(n);
    const CMatrix basis = orthonormal_range(span, tol);
    if (max_abs(CMatrix(cols - basis * (basis.adjoint() * cols))) > tol.scaled(sp.total_dim()))
        throw InconsistentLifting("lifting_geometry: output columns leave span{H_S, V H_S}");

    base.j0 = Embedding(sp, std::move(cols), tol);
    return base;
}

}  // namespace rowiso

#endif  // ROWISO_LIFTING_HPP
