#pragma once

#include <cstddef>
#include <vector>

namespace cmpg::detail {

// Solves A x = b for a dense n x n row-major A by LU with partial pivoting.
// Throws SolverError when a pivot falls below `singular_tol` times the
// largest entry of A.
std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b, std::size_t n,
                             double singular_tol = 1e-12);

}  // namespace cmpg::detail
