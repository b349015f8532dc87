#include "orff/linalg.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <future>
#include <thread>
#include <vector>

namespace orff {

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  if (M.rows() == M.cols() && is_symmetric(M)) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

bool is_symmetric(const Matrix& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

int thread_budget() {
  const char* env = std::getenv("ORFFKIT_THREADS");
  if (env == nullptr) return 1;
  const long v = std::strtol(env, nullptr, 10);
  if (v <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  return static_cast<int>(v);
}

std::uint64_t matrix_checksum(const Matrix& M) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  const auto* data = M.data();
  for (Index i = 0; i < M.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFu;
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

namespace detail {

namespace {

void tree_reduce_range(Index lo, Index hi, int threads,
                       const std::function<void(Index, Matrix&)>& leaf,
                       const std::function<void(Matrix&, Matrix&)>& combine,
                       Matrix& out) {
  if (hi - lo == 1) {
    leaf(lo, out);
    return;
  }
  const Index mid = lo + (hi - lo) / 2;
  Matrix right;
  if (threads > 1) {
    auto task = std::async(std::launch::async, [&] {
      tree_reduce_range(mid, hi, threads / 2, leaf, combine, right);
    });
    tree_reduce_range(lo, mid, threads - threads / 2, leaf, combine, out);
    task.get();
  } else {
    tree_reduce_range(lo, mid, 1, leaf, combine, out);
    tree_reduce_range(mid, hi, 1, leaf, combine, right);
  }
  combine(out, right);
}

}  // namespace

void tree_reduce(Index n_blocks, int max_threads,
                 const std::function<void(Index, Matrix&)>& leaf,
                 const std::function<void(Matrix&, Matrix&)>& combine,
                 Matrix& out) {
  if (n_blocks <= 0) return;
  tree_reduce_range(0, n_blocks, std::max(1, max_threads), leaf, combine, out);
}

void parallel_for(Index n, int max_threads,
                  const std::function<void(Index)>& body) {
  if (n <= 0) return;
  const int threads = std::max(1, max_threads);
  if (threads == 1 || n == 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<Index> counter{0};
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(std::min<Index>(threads, n));
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index i = counter.fetch_add(1); i < n; i = counter.fetch_add(1)) {
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail
}  // namespace orff
