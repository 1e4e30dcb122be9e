// rowiso: characteristic functions of row contractions.
//
// The rotation (Julia) colligation of a row contraction T = (T_1 ... T_d),
//     Sigma = [[T*, D_T], [D_T*, -T]] : H (+) U -> (d copies of H) (+) Y,
// is written on the compressed defect ranges U = ran D_T, Y = ran D_T*.
// Sigma is a coisometry for every d and unitary when d = 1, so it feeds the
// dilation builder directly; its transfer function is the characteristic
// function of T.

#ifndef ROWISO_CHARACTERISTIC_HPP
#define ROWISO_CHARACTERISTIC_HPP

#include <string>
#include <utility>
#include <vector>

#include "rowiso/errors.hpp"
#include "rowiso/matrix.hpp"
#include "rowiso/space.hpp"
#include "rowiso/system_matrix.hpp"
#include "rowiso/transfer.hpp"

namespace rowiso {

struct RowContraction {
    int d = 1;
    std::vector<CMatrix> t;  // d blocks, dim x dim

    Eigen::Index dim() const { return t.empty() ? 0 : t[0].rows(); }

    // [T_1 ... T_d] as a map from d copies of H into H.
    CMatrix row() const {
        const Eigen::Index n = dim();
        CMatrix m(n, static_cast<Eigen::Index>(d) * n);
        for (int k = 0; k < d; ++k) m.middleCols(static_cast<Eigen::Index>(k) * n, n) = t[static_cast<std::size_t>(k)];
        return m;
    }

    void validate(Tolerance tol = {}) const {
        if (d < 1) throw ValidationError("RowContraction: d must be >= 1");
        if (static_cast<int>(t.size()) != d)
            throw ValidationError("RowContraction: need exactly d blocks");
        const Eigen::Index n = dim();
        for (const CMatrix& m : t)
            if (m.rows() != n || m.cols() != n)
                throw ValidationError("RowContraction: blocks must be square of equal size");
        const double norm = spectral_norm(row());
        if (norm > 1.0 + tol.atol)
            throw NotContraction("RowContraction: row norm " + std::to_string(norm) + " exceeds 1");
    }
};

inline SystemMatrix rotation_system(const RowContraction& t, Tolerance tol = {}) {
    t.validate(tol);
    const Eigen::Index n = t.dim();
    const DefectPair dp = defect_pair(t.row(), tol);
    const CMatrix du = dp.defect * dp.range;        // D_T restricted to the U-range basis
    SystemMatrix s;
    s.d = t.d;
    for (int k = 0; k < t.d; ++k) {
        s.A.push_back(t.t[static_cast<std::size_t>(k)].adjoint());
        s.B.push_back(du.middleRows(static_cast<Eigen::Index>(k) * n, n));
    }
    s.C = dp.range_star.adjoint() * dp.defect_star;
    s.D = -(dp.range_star.adjoint() * t.row() * dp.range);
    return s;
}

inline FormalSeries characteristic_series(const RowContraction& t, int degree, Tolerance tol = {}) {
    return formal_series(rotation_system(t, tol), degree);
}

struct DilationTriple {
    RowIsometryTrunc v;
    Embedding i0;
    Embedding j0;
};

// Minimal isometric dilation geometry of T up to depth N, together with the
// canonical input/output embeddings of the rotation colligation.
inline DilationTriple nagy_foias_dilation(const RowContraction& t, int depth, Tolerance tol = {}) {
    const SystemMatrix s = rotation_system(t, tol);
    DilationResult base = dilation_row_isometry(s, depth, tol);
    Embedding j0 = sigma_output_embedding(base.v.space, s, tol);
    return DilationTriple{std::move(base.v), std::move(base.i0), std::move(j0)};
}

}  // namespace rowiso

#endif  // ROWISO_CHARACTERISTIC_HPP
