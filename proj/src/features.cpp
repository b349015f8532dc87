#include "orff/features.hpp"

#include <cmath>

#include "orff/linalg.hpp"

namespace orff::features {

namespace {

constexpr Index kBlockRows = 256;
// Cap for cached trig tables (doubles), cos + sin together.
constexpr Index kTrigCacheCap = Index(1) << 25;

using ThetaMap = Eigen::Map<const Matrix>;

ThetaMap as_theta(const FeatureMapHandle& h, const Vector& theta) {
  if (theta.size() != h.feature_dim()) {
    throw InvalidParameter("coefficient length does not match feature map");
  }
  return ThetaMap(theta.data(), 2 * h.D, h.pprime);
}

}  // namespace

FeatureMapHandle build_feature_map(const KernelSpec& spec, Index D,
                                   std::uint64_t seed) {
  FeatureMapHandle handle;
  handle.pair = spectral::make_spectral_pair(spec);
  handle.draw = spectral::sample_frequencies(D, spec.d, spec.sigma, seed);
  handle.D = D;
  handle.pprime = handle.pair.pprime;
  handle.normalization = 1.0 / std::sqrt(static_cast<double>(D));
  handle.seed = seed;
  return handle;
}

Matrix feature_matrix(const FeatureMapHandle& handle, const Vector& x) {
  if (x.size() != handle.spec().d) {
    throw InvalidParameter("input length does not match input dimension");
  }
  const Index D = handle.D;
  const Index pp = handle.pprime;
  Matrix F = Matrix::Zero(handle.feature_dim(), handle.spec().p);
  for (Index j = 0; j < D; ++j) {
    const Vector omega = handle.draw.omegas.row(j).transpose();
    const Matrix Bj = spectral::eval_B(handle.pair, omega);
    const double angle = omega.dot(x);
    const double c = handle.normalization * std::cos(angle);
    const double s = handle.normalization * std::sin(angle);
    for (Index col = 0; col < pp; ++col) {
      F.row(j + col * 2 * D) = c * Bj.col(col).transpose();
      F.row(D + j + col * 2 * D) = s * Bj.col(col).transpose();
    }
  }
  return F;
}

Matrix approx_kernel(const FeatureMapHandle& handle, const Vector& x,
                     const Vector& z) {
  const KernelSpec& spec = handle.spec();
  if (x.size() != spec.d || z.size() != spec.d) {
    throw InvalidParameter("input length does not match input dimension");
  }
  const Vector delta = x - z;
  const Matrix& W = handle.draw.omegas;
  const Vector cosines = (W * delta).array().cos().matrix();
  const double invD = 1.0 / static_cast<double>(handle.D);
  switch (spec.family) {
    case Family::Decomposable:
      return (cosines.mean()) * spec.A;
    case Family::CurlFree:
      return invD * (W.transpose() * cosines.asDiagonal() * W);
    case Family::DivFree: {
      const double trace_part = invD * cosines.dot(W.rowwise().squaredNorm());
      return trace_part * Matrix::Identity(spec.p, spec.p) -
             invD * (W.transpose() * cosines.asDiagonal() * W);
    }
  }
  throw InvalidParameter("unknown kernel family");
}

FastOperator::FastOperator(FeatureMapHandle handle)
    : handle_(std::move(handle)) {
  if (handle_.spec().family != Family::Decomposable) {
    omega_norms_ = handle_.draw.omegas.rowwise().norm();
  }
}

Matrix FastOperator::block_predict(const Matrix& Tc, const Matrix& Ts,
                                   const Matrix& Theta) const {
  const Index D = handle_.D;
  const double nrm = handle_.normalization;
  const auto Thc = Theta.topRows(D);
  const auto Ths = Theta.bottomRows(D);
  const Matrix& W = handle_.draw.omegas;
  switch (handle_.spec().family) {
    case Family::Decomposable: {
      const Matrix U = Tc * Thc + Ts * Ths;  // n x p'
      return nrm * (U * handle_.pair.coupling_factor.transpose());
    }
    case Family::CurlFree: {
      const Matrix weights =
          (Tc.array().rowwise() * Thc.col(0).transpose().array() +
           Ts.array().rowwise() * Ths.col(0).transpose().array())
              .matrix();
      return nrm * (weights * W);
    }
    case Family::DivFree: {
      // B(w) v = |w| v - w <w, v>/|w|, applied per frequency.
      const Vector& n = omega_norms_;
      const Matrix Thc_n = (Thc.array().colwise() * n.array()).matrix();
      const Matrix Ths_n = (Ths.array().colwise() * n.array()).matrix();
      Matrix out = Tc * Thc_n + Ts * Ths_n;
      Vector qc = (W.array() * Thc.array()).rowwise().sum().matrix();
      Vector qs = (W.array() * Ths.array()).rowwise().sum().matrix();
      for (Index j = 0; j < D; ++j) {
        const double inv = n(j) > 0.0 ? 1.0 / n(j) : 0.0;
        qc(j) *= inv;
        qs(j) *= inv;
      }
      out.noalias() -= (Tc.array().rowwise() * qc.transpose().array() +
                        Ts.array().rowwise() * qs.transpose().array())
                           .matrix() *
                       W;
      return nrm * out;
    }
  }
  throw InvalidParameter("unknown kernel family");
}

Matrix FastOperator::block_adjoint_sum(const Matrix& Tc, const Matrix& Ts,
                                       const Matrix& Yb) const {
  const Index D = handle_.D;
  const double nrm = handle_.normalization;
  const Matrix& W = handle_.draw.omegas;
  Matrix out(2 * D, handle_.pprime);
  switch (handle_.spec().family) {
    case Family::Decomposable: {
      const Matrix T = Yb * handle_.pair.coupling_factor;  // n x p'
      out.topRows(D).noalias() = nrm * (Tc.transpose() * T);
      out.bottomRows(D).noalias() = nrm * (Ts.transpose() * T);
      return out;
    }
    case Family::CurlFree: {
      const Matrix M = Yb * W.transpose();  // n x D, <y_i, w_j>
      out.topRows(D) =
          nrm * (Tc.array() * M.array()).colwise().sum().matrix().transpose();
      out.bottomRows(D) =
          nrm * (Ts.array() * M.array()).colwise().sum().matrix().transpose();
      return out;
    }
    case Family::DivFree: {
      const Vector& n = omega_norms_;
      const Matrix M = Yb * W.transpose();  // n x D
      const Matrix Pc = Tc.transpose() * Yb;  // D x d
      const Matrix Ps = Ts.transpose() * Yb;
      Vector uc = (Tc.array() * M.array()).colwise().sum().matrix().transpose();
      Vector us = (Ts.array() * M.array()).colwise().sum().matrix().transpose();
      for (Index j = 0; j < D; ++j) {
        const double inv = n(j) > 0.0 ? 1.0 / n(j) : 0.0;
        uc(j) *= inv;
        us(j) *= inv;
      }
      out.topRows(D) = nrm * ((Pc.array().colwise() * n.array()).matrix() -
                              (W.array().colwise() * uc.array()).matrix());
      out.bottomRows(D) = nrm * ((Ps.array().colwise() * n.array()).matrix() -
                                 (W.array().colwise() * us.array()).matrix());
      return out;
    }
  }
  throw InvalidParameter("unknown kernel family");
}

namespace {

void trig_of(const Matrix& Xb, const Matrix& W, Matrix& Tc, Matrix& Ts) {
  const Matrix angles = Xb * W.transpose();
  Tc = angles.array().cos().matrix();
  Ts = angles.array().sin().matrix();
}

}  // namespace

Vector FastOperator::apply(const Vector& x, const Vector& theta) const {
  if (x.size() != handle_.spec().d) {
    throw InvalidParameter("input length does not match input dimension");
  }
  const ThetaMap Theta = as_theta(handle_, theta);
  Matrix Tc, Ts;
  trig_of(x.transpose(), handle_.draw.omegas, Tc, Ts);
  return block_predict(Tc, Ts, Theta).row(0).transpose();
}

Vector FastOperator::adjoint(const Vector& x, const Vector& y) const {
  if (x.size() != handle_.spec().d) {
    throw InvalidParameter("input length does not match input dimension");
  }
  if (y.size() != handle_.spec().p) {
    throw InvalidParameter("output length does not match output dimension");
  }
  Matrix Tc, Ts;
  trig_of(x.transpose(), handle_.draw.omegas, Tc, Ts);
  const Matrix adj = block_adjoint_sum(Tc, Ts, y.transpose());
  return Eigen::Map<const Vector>(adj.data(), adj.size());
}

Vector FastOperator::normal(const Matrix& X, const Vector& theta) const {
  if (X.cols() != handle_.spec().d) {
    throw InvalidParameter("data column count does not match input dimension");
  }
  const ThetaMap Theta = as_theta(handle_, theta);
  const Index n_blocks = (X.rows() + kBlockRows - 1) / kBlockRows;
  Matrix acc;
  detail::tree_reduce(
      n_blocks, thread_budget(),
      [&](Index b, Matrix& out) {
        const Index row0 = b * kBlockRows;
        const Index rows = std::min(kBlockRows, X.rows() - row0);
        Matrix Tc, Ts;
        trig_of(X.middleRows(row0, rows), handle_.draw.omegas, Tc, Ts);
        out = block_adjoint_sum(Tc, Ts, block_predict(Tc, Ts, Theta));
      },
      [](Matrix& a, Matrix& b) { a += b; }, acc);
  if (acc.size() == 0) acc = Matrix::Zero(2 * handle_.D, handle_.pprime);
  return Eigen::Map<const Vector>(acc.data(), acc.size());
}

Matrix FastOperator::predict_batch(const Matrix& X, const Vector& theta) const {
  if (X.cols() != handle_.spec().d) {
    throw InvalidParameter("data column count does not match input dimension");
  }
  const ThetaMap Theta = as_theta(handle_, theta);
  Matrix out(X.rows(), handle_.spec().p);
  const Index n_blocks = (X.rows() + kBlockRows - 1) / kBlockRows;
  detail::parallel_for(n_blocks, thread_budget(), [&](Index b) {
    const Index row0 = b * kBlockRows;
    const Index rows = std::min(kBlockRows, X.rows() - row0);
    Matrix Tc, Ts;
    trig_of(X.middleRows(row0, rows), handle_.draw.omegas, Tc, Ts);
    out.middleRows(row0, rows) = block_predict(Tc, Ts, Theta);
  });
  return out;
}

Vector FastOperator::adjoint_sum(const Matrix& X, const Matrix& Y) const {
  if (X.rows() != Y.rows()) {
    throw InvalidParameter("input and output row counts differ");
  }
  if (Y.cols() != handle_.spec().p) {
    throw InvalidParameter("output column count does not match p");
  }
  const Index n_blocks = (X.rows() + kBlockRows - 1) / kBlockRows;
  Matrix acc;
  detail::tree_reduce(
      n_blocks, thread_budget(),
      [&](Index b, Matrix& out) {
        const Index row0 = b * kBlockRows;
        const Index rows = std::min(kBlockRows, X.rows() - row0);
        Matrix Tc, Ts;
        trig_of(X.middleRows(row0, rows), handle_.draw.omegas, Tc, Ts);
        out = block_adjoint_sum(Tc, Ts, Y.middleRows(row0, rows));
      },
      [](Matrix& a, Matrix& b) { a += b; }, acc);
  if (acc.size() == 0) acc = Matrix::Zero(2 * handle_.D, handle_.pprime);
  return Eigen::Map<const Vector>(acc.data(), acc.size());
}

NormalEquations::NormalEquations(const FastOperator& op, const Matrix& X)
    : op_(op), X_(X) {
  const Index n_blocks = (X_.rows() + kBlockRows - 1) / kBlockRows;
  cached_ = 2 * X_.rows() * op_.handle().D <= kTrigCacheCap;
  blocks_.resize(static_cast<std::size_t>(n_blocks));
  detail::parallel_for(n_blocks, thread_budget(), [&](Index b) {
    Block& blk = blocks_[static_cast<std::size_t>(b)];
    blk.row0 = b * kBlockRows;
    blk.rows = std::min(kBlockRows, X_.rows() - blk.row0);
    if (cached_) {
      trig_of(X_.middleRows(blk.row0, blk.rows), op_.handle().draw.omegas,
              blk.Tc, blk.Ts);
    }
  });
}

void NormalEquations::block_trig(const Block& b, Matrix& Tc, Matrix& Ts) const {
  if (cached_) {
    Tc = b.Tc;
    Ts = b.Ts;
  } else {
    trig_of(X_.middleRows(b.row0, b.rows), op_.handle().draw.omegas, Tc, Ts);
  }
}

Vector NormalEquations::normal(const Vector& theta) const {
  const ThetaMap Theta = as_theta(op_.handle(), theta);
  Matrix acc;
  detail::tree_reduce(
      static_cast<Index>(blocks_.size()), thread_budget(),
      [&](Index b, Matrix& out) {
        const Block& blk = blocks_[static_cast<std::size_t>(b)];
        if (cached_) {
          out = op_.block_adjoint_sum(blk.Tc, blk.Ts,
                                      op_.block_predict(blk.Tc, blk.Ts, Theta));
        } else {
          Matrix Tc, Ts;
          block_trig(blk, Tc, Ts);
          out = op_.block_adjoint_sum(Tc, Ts, op_.block_predict(Tc, Ts, Theta));
        }
      },
      [](Matrix& a, Matrix& b) { a += b; }, acc);
  return Eigen::Map<const Vector>(acc.data(), acc.size());
}

Vector NormalEquations::adjoint_sum(const Matrix& Y) const {
  Matrix acc;
  detail::tree_reduce(
      static_cast<Index>(blocks_.size()), thread_budget(),
      [&](Index b, Matrix& out) {
        const Block& blk = blocks_[static_cast<std::size_t>(b)];
        Matrix Tc, Ts;
        block_trig(blk, Tc, Ts);
        out = op_.block_adjoint_sum(Tc, Ts, Y.middleRows(blk.row0, blk.rows));
      },
      [](Matrix& a, Matrix& b) { a += b; }, acc);
  return Eigen::Map<const Vector>(acc.data(), acc.size());
}

Matrix NormalEquations::predict(const Vector& theta) const {
  const ThetaMap Theta = as_theta(op_.handle(), theta);
  Matrix out(X_.rows(), op_.handle().spec().p);
  detail::parallel_for(
      static_cast<Index>(blocks_.size()), thread_budget(), [&](Index b) {
        const Block& blk = blocks_[static_cast<std::size_t>(b)];
        Matrix Tc, Ts;
        block_trig(blk, Tc, Ts);
        out.middleRows(blk.row0, blk.rows) = op_.block_predict(Tc, Ts, Theta);
      });
  return out;
}

}  // namespace orff::features
