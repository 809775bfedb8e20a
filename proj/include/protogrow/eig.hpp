#pragma once

#include "protogrow/matrix.hpp"

namespace protogrow::la {

struct EigResult {
    Vector values;    // descending
    Matrix vectors;   // orthonormal columns, vectors.col(i) pairs with values[i]
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Eigenvalues sorted descending; each eigenvector's first component with
/// magnitude > 1e-12 is made positive so event logs reproduce across runs.
/// Throws std::invalid_argument on non-square or asymmetric input.
EigResult sym_eig(const Matrix& a);

struct DominantPlane {
    double sigma1 = 0.0;  // spectral norm
    Matrix plane;         // d x 2 orthonormal
};

/// Top singular pair of an antisymmetric matrix: sigma1 and the 2-D
/// rotation plane that carries it, via sym_eig(a^T a). Zero input returns
/// the first two canonical axes. Throws if the symmetric part of `a`
/// exceeds 1e-12 relative.
DominantPlane antisym_dominant_plane(const Matrix& a);

/// Appends `new_cols` to an orthonormal `basis` by modified Gram-Schmidt
/// with one re-orthogonalisation pass. First k columns are returned
/// unchanged. Throws std::domain_error when a new column is numerically in
/// the span already (residual below 1e-8 of its norm).
Matrix gram_schmidt_extend(const Matrix& basis, const Matrix& new_cols);

/// Convenience: extend an empty basis (d x 0 is not representable).
Matrix gram_schmidt(const Matrix& cols);

}  // namespace protogrow::la
