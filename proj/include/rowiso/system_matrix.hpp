// rowiso: colligation data (A_k, B_k, C, D) for a d-variable linear system.
//
// The system matrix Sigma maps H (+) U into (direct sum of d copies of H) (+) Y,
// with block rows [A_k  B_k] for k = 1..d followed by [C  D].  Multi-analytic
// transfer-function coefficients are read off as
//   Theta_0 = D,   Theta_alpha = C A_{a_r} ... A_{a_2} B_{a_1}
// for a word alpha = a_1 a_2 ... a_r.

#ifndef ROWISO_SYSTEM_MATRIX_HPP
#define ROWISO_SYSTEM_MATRIX_HPP

#include <string>
#include <vector>

#include "rowiso/errors.hpp"
#include "rowiso/matrix.hpp"

namespace rowiso {

struct SystemMatrix {
    int d = 1;
    std::vector<CMatrix> A;  // d blocks, dim_h x dim_h
    std::vector<CMatrix> B;  // d blocks, dim_h x dim_u
    CMatrix C;               // dim_y x dim_h
    CMatrix D;               // dim_y x dim_u

    Eigen::Index dim_h() const { return A.empty() ? 0 : A[0].rows(); }
    Eigen::Index dim_u() const { return B.empty() ? D.cols() : B[0].cols(); }
    Eigen::Index dim_y() const { return C.rows(); }

    void validate_shapes() const {
        if (d < 1) throw ValidationError("SystemMatrix: d must be >= 1");
        if (static_cast<int>(A.size()) != d || static_cast<int>(B.size()) != d)
            throw ValidationError("SystemMatrix: need exactly d blocks A_k and B_k");
        const Eigen::Index n = dim_h(), u = dim_u(), y = dim_y();
        for (int k = 0; k < d; ++k) {
            if (A[k].rows() != n || A[k].cols() != n)
                throw ValidationError("SystemMatrix: A_" + std::to_string(k + 1) + " is not dim_h x dim_h");
            if (B[k].rows() != n || B[k].cols() != u)
                throw ValidationError("SystemMatrix: B_" + std::to_string(k + 1) + " is not dim_h x dim_u");
        }
        if (C.cols() != n) throw ValidationError("SystemMatrix: C column count differs from dim_h");
        if (D.rows() != y || D.cols() != u)
            throw ValidationError("SystemMatrix: D is not dim_y x dim_u");
    }

    // Stacked block matrix [[A_1 B_1]; ... ; [A_d B_d]; [C D]].
    CMatrix assemble() const {
        validate_shapes();
        const Eigen::Index n = dim_h(), u = dim_u(), y = dim_y();
        CMatrix s(d * n + y, n + u);
        for (int k = 0; k < d; ++k) {
            s.block(k * n, 0, n, n) = A[k];
            s.block(k * n, n, n, u) = B[k];
        }
        s.block(d * n, 0, y, n) = C;
        s.block(d * n, n, y, u) = D;
        return s;
    }
};

}  // namespace rowiso

#endif  // ROWISO_SYSTEM_MATRIX_HPP
