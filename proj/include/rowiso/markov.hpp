// rowiso: noncommutative Markov chains driven by an interaction unitary.
//
// An interaction is a unitary U : H (x) K -> H (x) P together with
// distinguished unit vectors Omega_H, Omega_K, Omega_P and an orthonormal
// basis (eps_k) of P.  On the chain space H (x) K^(x)N the adapted isometries
//     V_k (xi (x) eta) = U_1^* (xi (x) eps_k (x) eta)
// insert eps_k at slot 1 and apply U^* to the (H, slot 1) pair; they form a
// row isometry whose graded decomposition is H (+) U-blocks with
// U_0 = H (x) (Omega_K)^perp at slot 1.  markov_row_isometry additionally
// needs the vacuum relation U(Omega_H (x) Omega_K) = Omega_H (x) Omega_P and
// attaches the output space Y_0 = U_1^*(Omega_H (x) (Omega_P)^perp).
//
// The system matrix read off from U alone,
//     A_k h = (I (x) eps_k^*) U (h (x) Omega_K),    B_k u = (I (x) eps_k^*) U iota(u),
//     C h   = (Omega_H^* (x) I_Y) U (h (x) Omega_K), D u = (Omega_H^* (x) I_Y) U iota(u),
// reproduces the kernel coefficients of that geometry.  Note the assembled
// Sigma is not a coisometry here (V H need not be orthogonal to j_0 Y), so
// this module builds its row isometry directly from tensor slots and never
// goes through dilation_row_isometry.

#ifndef ROWISO_MARKOV_HPP
#define ROWISO_MARKOV_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rowiso/errors.hpp"
#include "rowiso/matrix.hpp"
#include "rowiso/space.hpp"
#include "rowiso/system_matrix.hpp"
#include "rowiso/words.hpp"

namespace rowiso {

struct Interaction {
    int dim_h = 1;
    int dim_k = 1;
    int dim_p = 1;
    CMatrix u;  // (dim_h * dim_k) square, maps H (x) K -> H (x) P
    std::optional<CVector> omega_h, omega_k, omega_p;
    CMatrix basis_p;  // columns eps_1..eps_d; empty means the standard basis

    int d() const { return dim_p; }
    Eigen::Index pair_dim() const { return static_cast<Eigen::Index>(dim_h) * dim_k; }

    CMatrix p_basis() const {
        return basis_p.size() > 0 ? basis_p : CMatrix(CMatrix::Identity(dim_p, dim_p));
    }

    void validate(Tolerance tol = {}) const {
        if (dim_h < 1 || dim_k < 1 || dim_p < 1)
            throw ValidationError("Interaction: dimensions must be positive");
        if (dim_k != dim_p)
            throw ValidationError("Interaction: a unitary interaction needs dimK = dimP");
        if (u.rows() != pair_dim() || u.cols() != pair_dim())
            throw ValidationError("Interaction: U must be (dimH*dimK) x (dimH*dimP)");
        if (max_abs(CMatrix(u.adjoint() * u - identity_like(pair_dim()))) > tol.scaled(pair_dim()))
            throw ValidationError("Interaction: U is not unitary within tolerance");
        auto check_unit = [&](const std::optional<CVector>& w, Eigen::Index dim, const char* name) {
            if (!w) return;
            if (w->size() != dim)
                throw ValidationError(std::string("Interaction: ") + name + " has wrong length");
            if (std::abs(w->norm() - 1.0) > tol.atol)
                throw ValidationError(std::string("Interaction: ") + name + " is not a unit vector");
        };
        check_unit(omega_h, dim_h, "omegaH");
        check_unit(omega_k, dim_k, "omegaK");
        check_unit(omega_p, dim_p, "omegaP");
        if (basis_p.size() > 0) {
            if (basis_p.rows() != dim_p || basis_p.cols() != dim_p)
                throw ValidationError("Interaction: basisP must be dimP x dimP");
            if (max_abs(CMatrix(basis_p.adjoint() * basis_p - identity_like(dim_p))) > tol.scaled(dim_p))
                throw ValidationError("Interaction: basisP is not orthonormal");
        }
    }

    bool has_vacuum(Tolerance tol = {}) const {
        if (!omega_h || !omega_k || !omega_p) return false;
        const CMatrix lhs = u * kron(CMatrix(*omega_h), CMatrix(*omega_k));
        return max_abs(CMatrix(lhs - kron(CMatrix(*omega_h), CMatrix(*omega_p)))) <= tol.atol;
    }

    void require_vacuum(Tolerance tol = {}) const {
        if (!omega_h || !omega_k || !omega_p)
            throw NoVacuum("Interaction: vacuum vectors are not declared");
        if (!has_vacuum(tol))
            throw NoVacuum("Interaction: U does not fix the vacuum vector");
    }
};

namespace detail {

inline Eigen::Index chain_dim(const Interaction& inter, int slots, Eigen::Index dim_cap) {
    Eigen::Index dim = inter.dim_h;
    for (int j = 0; j < slots; ++j) {
        dim *= inter.dim_k;
        if (dim > dim_cap)
            throw ValidationError("markov: chain dimension exceeds the cap " + std::to_string(dim_cap));
    }
    return dim;
}

// New slot-1 factor eps in front of the existing slot factors (dimension
// `rest`); the H factor stays slowest.
inline CMatrix insert_front(Eigen::Index dim_h, Eigen::Index rest, const CVector& eps,
                            const CMatrix& cols) {
    const Eigen::Index kk = eps.size();
    CMatrix out = CMatrix::Zero(dim_h * kk * rest, cols.cols());
    for (Eigen::Index h = 0; h < dim_h; ++h)
        for (Eigen::Index j = 0; j < kk; ++j)
            out.middleRows((h * kk + j) * rest, rest) += eps(j) * cols.middleRows(h * rest, rest);
    return out;
}

// op acting on the (H, slot) pair of tensor factors, all other slots spectate.
inline CMatrix apply_pair(Eigen::Index dim_h, Eigen::Index dim_k, int slot, int slots,
                          const CMatrix& op, const CMatrix& cols) {
    Eigen::Index mid = 1, tail = 1;
    for (int j = 1; j < slot; ++j) mid *= dim_k;
    for (int j = slot; j < slots; ++j) tail *= dim_k;
    CMatrix out = CMatrix::Zero(cols.rows(), cols.cols());
    CVector buf(dim_h * dim_k);
    for (Eigen::Index c = 0; c < cols.cols(); ++c)
        for (Eigen::Index m = 0; m < mid; ++m)
            for (Eigen::Index t = 0; t < tail; ++t) {
                for (Eigen::Index h = 0; h < dim_h; ++h)
                    for (Eigen::Index kj = 0; kj < dim_k; ++kj)
                        buf(h * dim_k + kj) = cols(((h * mid + m) * dim_k + kj) * tail + t, c);
                const CVector res = op * buf;
                for (Eigen::Index h = 0; h < dim_h; ++h)
                    for (Eigen::Index kj = 0; kj < dim_k; ++kj)
                        out(((h * mid + m) * dim_k + kj) * tail + t, c) = res(h * dim_k + kj);
            }
    return out;
}

inline CMatrix append_vacuum(const CVector& omega, const CMatrix& cols) {
    return kron(cols, CMatrix(omega));
}

inline CMatrix contract_last(const CVector& omega, const CMatrix& cols) {
    const Eigen::Index kk = omega.size();
    const Eigen::Index rows = cols.rows() / kk;
    CMatrix out = CMatrix::Zero(rows, cols.cols());
    for (Eigen::Index j = 0; j < kk; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out.row(i) += std::conj(omega(j)) * cols.row(i * kk + j);
    return out;
}

}  // namespace detail

inline SystemMatrix markov_system(const Interaction& inter, Tolerance tol = {}) {
    inter.validate(tol);
    inter.require_vacuum(tol);
    const Eigen::Index n = inter.dim_h, kk = inter.dim_k, pp = inter.dim_p;
    const CMatrix pb = inter.p_basis();
    const CMatrix eye_h = CMatrix::Identity(n, n);
    const CMatrix dom_vac = kron(eye_h, CMatrix(*inter.omega_k));
    const CMatrix dom_fib = kron(eye_h, CMatrix(complete_to_unitary(*inter.omega_k, tol).rightCols(kk - 1)));
    const CMatrix out_y = kron(CMatrix(*inter.omega_h),
                               CMatrix(complete_to_unitary(*inter.omega_p, tol).rightCols(pp - 1)));
    SystemMatrix s;
    s.d = inter.dim_p;
    for (int k = 0; k < s.d; ++k) {
        const CMatrix lift = kron(eye_h, CMatrix(pb.col(k)));
        s.A.push_back(lift.adjoint() * inter.u * dom_vac);
        s.B.push_back(lift.adjoint() * inter.u * dom_fib);
    }
    s.C = out_y.adjoint() * inter.u * dom_vac;
    s.D = out_y.adjoint() * inter.u * dom_fib;
    s.validate_shapes();
    return s;
}

// Chain-space row isometry in graded coordinates, together with the isometric
// basis change g whose columns are the graded basis written in the chain
// space H (x) K^(x)slots:
//   columns [0, n)              h (x) Omega_K^(x)slots
//   columns of block U_w        V_w (H (x) (Omega_K)^perp), vacuum-padded.
// Vacuum vectors beyond Omega_K are not needed here.
struct MarkovChain {
    RowIsometryTrunc v;
    Embedding i0;
    CMatrix g;
    int slots = 1;
};

inline MarkovChain markov_chain_isometry(const Interaction& inter, int slots, Tolerance tol = {},
                                         Eigen::Index dim_cap = 4096) {
    inter.validate(tol);
    if (slots < 1) throw DepthTooSmall("markov_chain_isometry: need at least one chain slot");
    if (!inter.omega_k) throw NoVacuum("markov_chain_isometry: Omega_K is not declared");
    const Eigen::Index n = inter.dim_h, kk = inter.dim_k;
    const Eigen::Index chain = detail::chain_dim(inter, slots, dim_cap);
    const CMatrix pb = inter.p_basis();
    const CMatrix fperp = complete_to_unitary(*inter.omega_k, tol).rightCols(kk - 1);
    const CMatrix fiber = kron(CMatrix(CMatrix::Identity(n, n)), CMatrix(fperp));
    const CMatrix vac = kron(CMatrix(CMatrix::Identity(n, n)), CMatrix(*inter.omega_k));

    GradedSpace space = GradedSpace::make(static_cast<int>(n), static_cast<int>(n * (kk - 1)),
                                          inter.d(), slots - 1);
    const Eigen::Index total = space.total_dim(), dom = space.domain_dim();
    const Eigen::Index u_dim = space.dim_u;

    // Unpadded U_w bases by suffix recursion: b_w = U_1^* (eps_{w_1} (x) b_tail).
    std::vector<CMatrix> bw(space.words.size());
    for (std::size_t r = 0; r < space.words.size(); ++r) {
        const Word& w = space.words[r];
        if (w.is_empty()) { bw[r] = fiber; continue; }
        const std::size_t tail = word_rank(space.d, w.suffix_from(1));
        const Eigen::Index rest = bw[tail].rows() / n;
        const CMatrix ins = detail::insert_front(n, rest, pb.col(w.letter(0) - 1), bw[tail]);
        bw[r] = detail::apply_pair(n, kk, 1, static_cast<int>(w.length()) + 1,
                                   inter.u.adjoint(), ins);
    }

    CMatrix g = CMatrix::Zero(chain, total);
    {
        CMatrix pads = CMatrix::Identity(n, n);
        for (int j = 0; j < slots; ++j) pads = detail::append_vacuum(*inter.omega_k, pads);
        g.leftCols(n) = pads;
    }
    for (std::size_t r = 0; r < space.words.size(); ++r) {
        CMatrix pads = bw[r];
        while (pads.rows() < chain) pads = detail::append_vacuum(*inter.omega_k, pads);
        g.middleCols(space.block_offset(r), u_dim) = pads;
    }
    if (chain <= 1024 &&
        max_abs(CMatrix(g.adjoint() * g - identity_like(total))) > tol.scaled(total))
        throw ValidationError("markov_chain_isometry: graded basis lost orthonormality");

    // V_k: exact shifts on U-blocks, one-slot action on H split into its
    // vacuum (-> H) and defect (-> U_0) components.
    RowIsometryTrunc v;
    v.space = space;
    const std::size_t dom_words = word_count(space.d, space.depth - 1);
    for (int k = 0; k < space.d; ++k) {
        const CMatrix wk = inter.u.adjoint() * kron(CMatrix(CMatrix::Identity(n, n)), CMatrix(pb.col(k)));
        CMatrix m = CMatrix::Zero(total, dom);
        m.block(0, 0, n, n) = vac.adjoint() * wk;
        m.block(n, 0, u_dim, n) = fiber.adjoint() * wk;
        for (std::size_t r = 0; r < dom_words; ++r) {
            const Word target = space.words[r].prepend(k + 1);
            m.block(space.block_offset(target), space.block_offset(r), u_dim, u_dim) =
                CMatrix::Identity(u_dim, u_dim);
        }
        v.vk.push_back(std::move(m));
    }
    Embedding i0 = Embedding::block(space, Word::empty());
    return MarkovChain{std::move(v), std::move(i0), std::move(g), slots};
}

struct MarkovDilation {
    RowIsometryTrunc v;
    Embedding i0;
    Embedding j0;
    CMatrix g;
    int slots = 1;
};

inline MarkovDilation markov_row_isometry(const Interaction& inter, int slots, Tolerance tol = {},
                                          Eigen::Index dim_cap = 4096) {
    inter.validate(tol);
    inter.require_vacuum(tol);
    MarkovChain chain = markov_chain_isometry(inter, slots, tol, dim_cap);
    // Y_0 = U_1^*(Omega_H (x) (Omega_P)^perp) sits in H (+) U_0, so its graded
    // coordinates are exactly the C*, D* columns of the system matrix.
    Embedding j0 = sigma_output_embedding(chain.v.space, markov_system(inter, tol), tol);
    const WanderingReport wr = is_wandering(chain.v, chain.i0, slots - 1, tol);
    if (!wr.wandering)
        throw UNotWandering("markov_row_isometry: U_0 translates deviate by " +
                            std::to_string(wr.max_dev));
    return MarkovDilation{std::move(chain.v), std::move(chain.i0), std::move(j0),
                          std::move(chain.g), slots};
}

struct PropCheck {
    bool pass = false;
    double max_dev = 0.0;
    std::string witness;
};

struct PropReport {
    PropCheck hypothesis;   // U (H_S (x) Omega_K) inside H_S (x) P
    PropCheck containment;  // Y_0 inside U_1^*(H_S (x) P) minus (H_S (x) Omega_K)
    PropCheck wandering;    // translates of Y_0 up to length slots-1
    bool pass = false;
};

// Wandering criterion for a user-supplied pair (H_S, Y_0): H_S is given by
// isometric columns in H, Y_0 by isometric columns in the chain space
// supported at slot 1.  The three conclusions are reported separately so a
// hypothesis violation with wandering still intact stays visible.
inline PropReport prop_wandering_check(const Interaction& inter, const CMatrix& hs_basis,
                                       const CMatrix& y0_basis, int slots, Tolerance tol = {},
                                       Eigen::Index dim_cap = 4096) {
    inter.validate(tol);
    if (slots < 1) throw DepthTooSmall("prop_wandering_check: need at least one chain slot");
    if (!inter.omega_k) throw NoVacuum("prop_wandering_check: Omega_K is not declared");
    const Eigen::Index n = inter.dim_h, kk = inter.dim_k, pp = inter.dim_p;
    const Eigen::Index chain = detail::chain_dim(inter, slots, dim_cap);
    if (hs_basis.rows() != n)
        throw ValidationError("prop_wandering_check: H_S basis has wrong row count");
    if (max_abs(CMatrix(hs_basis.adjoint() * hs_basis - identity_like(hs_basis.cols()))) >
        tol.scaled(hs_basis.cols()))
        throw ValidationError("prop_wandering_check: H_S basis is not orthonormal");
    if (y0_basis.rows() != chain)
        throw ValidationError("prop_wandering_check: Y_0 basis has wrong row count");
    if (max_abs(CMatrix(y0_basis.adjoint() * y0_basis - identity_like(y0_basis.cols()))) >
        tol.scaled(y0_basis.cols()))
        throw ValidationError("prop_wandering_check: Y_0 basis is not orthonormal");
    CMatrix y1 = y0_basis;
    for (int j = 1; j < slots; ++j) y1 = detail::contract_last(*inter.omega_k, y1);
    {
        CMatrix repad = y1;
        for (int j = 1; j < slots; ++j) repad = detail::append_vacuum(*inter.omega_k, repad);
        if (max_abs(CMatrix(y0_basis - repad)) > tol.atol)
            throw ValidationError("prop_wandering_check: Y_0 columns are not supported at slot 1");
    }

    PropReport rep;
    auto score = [&](PropCheck& c, const CMatrix& resid, const char* what) {
        for (Eigen::Index j = 0; j < resid.cols(); ++j) {
            const double dev = max_abs(CMatrix(resid.col(j)));
            if (dev > c.max_dev) {
                c.max_dev = dev;
                c.witness = std::string(what) + " column " + std::to_string(j + 1);
            }
        }
        c.pass = c.max_dev <= tol.atol;
    };

    const CMatrix eye_p = CMatrix::Identity(pp, pp);
    {
        const CMatrix img = inter.u * kron(hs_basis, CMatrix(*inter.omega_k));
        const CMatrix hsp = kron(hs_basis, eye_p);
        score(rep.hypothesis, CMatrix(img - hsp * (hsp.adjoint() * img)), "H_S");
    }
    {
        const CMatrix span1 = inter.u.adjoint() * kron(hs_basis, eye_p);
        const CMatrix deflator = kron(hs_basis, CMatrix(*inter.omega_k));
        const CMatrix defl = span1 - deflator * (deflator.adjoint() * span1);
        const CMatrix basis = orthonormal_range(defl, tol);
        score(rep.containment, CMatrix(y1 - basis * (basis.adjoint() * y1)), "Y_0");
    }
    {
        MarkovChain mc = markov_chain_isometry(inter, slots, tol, dim_cap);
        const Embedding emb(mc.v.space, mc.g.adjoint() * y0_basis, tol);
        const WanderingReport wr = is_wandering(mc.v, emb, slots - 1, tol);
        rep.wandering.pass = wr.wandering;
        rep.wandering.max_dev = wr.max_dev;
        if (wr.max_dev > 0.0)
            rep.wandering.witness = "words (" + wr.witness_a.str() + ", " + wr.witness_b.str() + ")";
    }
    rep.pass = rep.hypothesis.pass && rep.containment.pass && rep.wandering.pass;
    return rep;
}

}  // namespace rowiso

#endif  // ROWISO_MARKOV_HPP
