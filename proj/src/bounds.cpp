#include "orff/bounds.hpp"

#include <cmath>

#include "orff/kernels.hpp"
#include "orff/linalg.hpp"
#include "orff/rng.hpp"
#include "orff/spectral.hpp"

namespace orff::bounds {

namespace {

double coupling_norm(const KernelSpec& spec) { return spectral_norm(spec.A); }

Vector sample_frequency(const KernelSpec& spec, rng::SplitMix64& gen) {
  Vector w(spec.d);
  for (Index k = 0; k < spec.d; ++k) {
    w(k) = rng::next_normal(gen) / spec.sigma;
  }
  return w;
}

}  // namespace

MomentSummary moments(const KernelSpec& spec) {
  const double s2 = spec.sigma * spec.sigma;
  const double s4 = s2 * s2;
  const double d = static_cast<double>(spec.d);
  const Matrix eye = Matrix::Identity(spec.p, spec.p);
  switch (spec.family) {
    case Family::Decomposable:
      return {spec.A, Matrix::Zero(spec.p, spec.p)};
    case Family::CurlFree:
      return {eye / s2, (d + 1.0) / s4 * eye};
    case Family::DivFree:
      return {(d - 1.0) / s2 * eye, 3.0 * (d - 1.0) / s4 * eye};
  }
  throw InvalidParameter("unknown kernel family");
}

MomentSummary moments_mc(const KernelSpec& spec, Index n_mc,
                         std::uint64_t seed) {
  if (n_mc < 1) throw InvalidParameter("n_mc must be >= 1");
  const auto pair = spectral::make_spectral_pair(spec);
  const std::uint64_t base = rng::substream(seed, rng::kMoments);
  Matrix sumA = Matrix::Zero(spec.p, spec.p);
  Matrix sumA2 = Matrix::Zero(spec.p, spec.p);
  for (Index i = 0; i < n_mc; ++i) {
    rng::SplitMix64 gen(rng::substream(base, static_cast<std::uint64_t>(i)));
    const Vector w = sample_frequency(spec, gen);
    const Matrix A = spectral::eval_A(pair, w);
    sumA += A;
    sumA2 += A * A;
  }
  const Matrix EA = sumA / static_cast<double>(n_mc);
  return {EA, sumA2 / static_cast<double>(n_mc) - EA * EA};
}

double bD_bound(const KernelSpec& spec, const Vector& delta) {
  if (delta.size() != spec.d) {
    throw InvalidParameter("displacement length does not match input dimension");
  }
  const double s2 = spec.sigma * spec.sigma;
  const double s4 = s2 * s2;
  const double d = static_cast<double>(spec.d);
  const Matrix K1 = kernels::signature(spec, delta).value;
  const Matrix K2 = kernels::signature(spec, (2.0 * delta).eval()).value;
  switch (spec.family) {
    case Family::Decomposable: {
      const double a = coupling_norm(spec);
      const double k1 = kernels::gaussian_signature(delta, spec.sigma);
      const double k2 = kernels::gaussian_signature((2.0 * delta).eval(),
                                                    spec.sigma);
      return (0.5 * (1.0 + k2) + k1 * k1) * a * a;
    }
    case Family::CurlFree:
      return 0.5 * spectral_norm(K2 / s2 - 2.0 * K1 * K1) + (d + 1.0) / s4;
    case Family::DivFree:
      return 0.5 * spectral_norm((d - 1.0) / s2 * K2 - 2.0 * K1 * K1) +
             3.0 * (d - 1.0) / s4;
  }
  throw InvalidParameter("unknown kernel family");
}

double bD_bound_generic(const KernelSpec& spec, const Vector& delta) {
  const MomentSummary mom = moments(spec);
  const Matrix K0 = kernels::signature(spec, Vector::Zero(spec.d)).value;
  const Matrix K1 = kernels::signature(spec, delta).value;
  const Matrix K2 = kernels::signature(spec, (2.0 * delta).eval()).value;
  return 0.5 * spectral_norm((K2 + K0) * mom.EA - 2.0 * K1 * K1) +
         spectral_norm(mom.VA);
}

double empirical_variance(const KernelSpec& spec, const Vector& delta,
                          Index n_mc, std::uint64_t seed) {
  if (n_mc < 2) throw InvalidParameter("n_mc must be >= 2");
  if (delta.size() != spec.d) {
    throw InvalidParameter("displacement length does not match input dimension");
  }
  const auto pair = spectral::make_spectral_pair(spec);
  const Matrix K0 = kernels::signature(spec, delta).value;
  const std::uint64_t base = rng::substream(seed, rng::kMoments);
  constexpr Index kBlock = 1024;
  const Index n_blocks = (n_mc + kBlock - 1) / kBlock;
  Matrix acc;
  detail::tree_reduce(
      n_blocks, thread_budget(),
      [&](Index b, Matrix& out) {
        out = Matrix::Zero(spec.p, spec.p);
        const Index lo = b * kBlock;
        const Index hi = std::min(n_mc, lo + kBlock);
        for (Index i = lo; i < hi; ++i) {
          rng::SplitMix64 gen(
              rng::substream(base, static_cast<std::uint64_t>(i)));
          const Vector w = sample_frequency(spec, gen);
          const Matrix dev =
              std::cos(w.dot(delta)) * spectral::eval_A(pair, w) - K0;
          out += dev * dev;
        }
      },
      [](Matrix& a, Matrix& b) { a += b; }, acc);
  return spectral_norm(acc / static_cast<double>(n_mc));
}

double orlicz_psi1(const KernelSpec& spec) {
  switch (spec.family) {
    case Family::Decomposable:
      return coupling_norm(spec) / std::log(2.0);
    case Family::CurlFree:
    case Family::DivFree: {
      const double s2 = spec.sigma * spec.sigma;
      const double p = static_cast<double>(spec.p);
      return (2.0 / s2) / (1.0 - std::pow(4.0, -1.0 / p));
    }
  }
  throw InvalidParameter("unknown kernel family");
}

double sigma_p2(const KernelSpec& spec) {
  const double s2 = spec.sigma * spec.sigma;
  const double d = static_cast<double>(spec.d);
  switch (spec.family) {
    case Family::Decomposable: {
      const double a = coupling_norm(spec);
      return a * a * d / s2;
    }
    case Family::CurlFree:
    case Family::DivFree:
      return d * (d + 2.0) * (d + 4.0) / (s2 * s2 * s2);
  }
  throw InvalidParameter("unknown kernel family");
}

double sigma_p2_mc(const KernelSpec& spec, Index n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw InvalidParameter("n_mc must be >= 1");
  const auto pair = spectral::make_spectral_pair(spec);
  const std::uint64_t base = rng::substream(seed, rng::kMoments);
  double sum = 0.0;
  for (Index i = 0; i < n_mc; ++i) {
    rng::SplitMix64 gen(rng::substream(base, static_cast<std::uint64_t>(i)));
    const Vector w = sample_frequency(spec, gen);
    const double an = spectral_norm(spectral::eval_A(pair, w));
    sum += w.squaredNorm() * an * an;
  }
  return sum / static_cast<double>(n_mc);
}

double m_constant(const KernelSpec& spec, double diameter) {
  if (!(diameter > 0.0)) throw InvalidParameter("diameter must be > 0");
  const Matrix K0 = kernels::signature(spec, Vector::Zero(spec.d)).value;
  return 4.0 * (orlicz_psi1(spec) + spectral_norm(K0));
}

BoundInputs make_bound_inputs(const KernelSpec& spec, Index D, double diameter,
                              double epsilon, Index bd_samples,
                              std::uint64_t seed) {
  if (D < 1) throw InvalidParameter("feature count D must be >= 1");
  if (!(diameter > 0.0)) throw InvalidParameter("diameter must be > 0");
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  BoundInputs in;
  in.spec = spec;
  in.D = D;
  in.diameter = diameter;
  in.epsilon = epsilon;
  in.sigma_p2 = sigma_p2(spec);
  in.m = m_constant(spec, diameter);
  in.bD = bD_bound(spec, Vector::Zero(spec.d));
  rng::SplitMix64 gen(rng::substream(seed, rng::kDeltas));
  for (Index i = 0; i < bd_samples; ++i) {
    Vector dir(spec.d);
    for (Index k = 0; k < spec.d; ++k) dir(k) = rng::next_normal(gen);
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    const Vector delta = dir * (gen.next_double() * diameter / norm);
    in.bD = std::max(in.bD, bD_bound(spec, delta));
  }
  return in;
}

BoundReport theorem_bound(const BoundInputs& in, bool appendix_ubar) {
  if (!(in.bD > 0.0)) {
    throw InvalidParameter("degenerate bound inputs: b_D must be > 0");
  }
  if (!(in.m > 0.0) || !(in.sigma_p2 > 0.0) || !(in.epsilon > 0.0) ||
      !(in.diameter > 0.0) || in.D < 1) {
    throw InvalidParameter("degenerate bound inputs");
  }
  const double ratio2 = (in.m / in.bD) * (in.m / in.bD);
  const double u_bar =
      appendix_ubar ? in.m * std::log(2.0 * ratio2 + 1.0)
                    : 2.0 * in.m * std::log(std::pow(2.0, 1.5) * ratio2);
  if (!(u_bar > 0.0)) {
    throw InvalidParameter("degenerate bound inputs: log term not positive");
  }
  const double d = static_cast<double>(in.spec.d);
  const double p = static_cast<double>(in.spec.p);
  const double C_d =
      p *
      (std::pow(d / 2.0, -d / (d + 2.0)) + std::pow(d / 2.0, 2.0 / (d + 2.0))) *
      std::pow(2.0, (6.0 * d + 2.0) / (d + 2.0));
  const double prefactor =
      C_d * std::pow(std::sqrt(in.sigma_p2) * in.diameter / in.epsilon,
                     2.0 / (1.0 + 2.0 / d));
  const double e1 = std::exp(1.0) - 1.0;
  const bool subgaussian = u_bar <= 2.0 * e1 * in.bD / in.epsilon;
  const double Dd = static_cast<double>(in.D);
  const double tail =
      subgaussian
          ? std::exp(-in.epsilon * in.epsilon * Dd /
                     (8.0 * (d + 2.0) * (in.bD + in.epsilon * u_bar / 6.0)))
          : std::exp(-in.epsilon * Dd / ((d + 2.0) * e1 * u_bar));
  BoundReport report;
  report.u_bar = u_bar;
  report.C_d = C_d;
  report.regime = subgaussian ? Regime::Subgaussian : Regime::Subexponential;
  report.raw_value = prefactor * tail;
  report.probability = std::min(1.0, std::max(0.0, report.raw_value));
  report.appendix_ubar = appendix_ubar;
  return report;
}

double decomposable_corollary(double A_norm, Index d, double sigma2_freq,
                              double diameter, double eps, Index D) {
  if (!(A_norm > 0.0) || d < 1 || !(sigma2_freq > 0.0) || !(diameter > 0.0) ||
      !(eps > 0.0) || D < 1) {
    throw InvalidParameter("corollary inputs must all be positive");
  }
  const double dd = static_cast<double>(d);
  const double prefactor =
      256.0 * std::pow(dd * std::sqrt(sigma2_freq) * A_norm * diameter / eps, 2.0);
  const double tail = std::exp(-eps * eps * static_cast<double>(D) /
                               (4.0 * A_norm * A_norm * (dd + 2.0)));
  return std::min(1.0, std::max(0.0, prefactor * tail));
}

}  // namespace orff::bounds
