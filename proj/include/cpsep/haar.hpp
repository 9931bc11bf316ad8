#pragma once

#include "cpsep/density_matrix.hpp"
#include "cpsep/random_stream.hpp"

namespace cpsep {

/// Haar-uniform unit vector in C^dim (normalized complex Gaussian).
CVector random_unit_vector(int dim, RandomStream& rng);

// Haar-distributed unitary: complex Ginibre matrix, QR factorization, then
// column phases fixed so the R diagonal is real positive. Without the
// phase fix the factorization is not unique and the raw Q is biased; see
// the moment test in the quantum test suite.
UnitaryMatrix haar_unitary(int dim, RandomStream& rng);

/// The raw QR orthogonal factor without phase normalization (biased);
/// kept only so tests can document the failure mode.
CMatrix naive_qr_unitary(int dim, RandomStream& rng);

}  // namespace cpsep
