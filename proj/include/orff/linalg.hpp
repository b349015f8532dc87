#pragma once

#include <cstdint>
#include <functional>

#include "orff/types.hpp"

namespace orff {

/// Spectral norm (largest singular value).  Symmetric inputs take the
/// eigenvalue route, everything else falls back to an SVD.
double spectral_norm(const Matrix& M);

bool is_symmetric(const Matrix& M, double rel_tol = 1e-10);

/// Thread budget: ORFFKIT_THREADS if set (0 = hardware), else 1.
int thread_budget();

/// FNV-1a over the raw coefficient bytes, column-major.  Used as the
/// frequency checksum in model files.
std::uint64_t matrix_checksum(const Matrix& M);

namespace detail {

/// Deterministic pairwise-tree reduction over index blocks [0, n_blocks).
/// The tree shape depends only on n_blocks, so results are bit-identical
/// for any thread count.  `leaf` evaluates one block, `combine` adds the
/// right operand into the left.
void tree_reduce(Index n_blocks, int max_threads,
                 const std::function<void(Index, Matrix&)>& leaf,
                 const std::function<void(Matrix&, Matrix&)>& combine,
                 Matrix& out);

/// Parallel for over [0, n); iterations must write disjoint state.
void parallel_for(Index n, int max_threads,
                  const std::function<void(Index)>& body);

}  // namespace detail
}  // namespace orff
