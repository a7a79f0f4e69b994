#pragma once

#include "crossnet/linalg.hpp"

namespace crossnet {

/// Singular values of a dense matrix in descending order, length
/// min(rows, cols). One-sided Jacobi with sweep tolerance 1e-12 and at most
/// 60 sweeps; adequate for the layer-sized matrices this library trains
/// (up to a few hundred per side). Throws on non-finite entries.
Vector singular_values(const Matrix& a);

}  // namespace crossnet
