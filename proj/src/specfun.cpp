#include "fracivp/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fracivp/errors.hpp"

namespace fracivp::specfun {

namespace {

// lanczos13m53 from Boost.Math: numerator and denominator of the rational
// Lanczos sum, g = 6.024680040776729583740234375. The denominator is the
// expansion of z (z + 1) ... (z + 11).
constexpr double kLanczosG = 6.024680040776729583740234375;

constexpr std::array<double, 13> kLanczosNum = {
    23531376880.41075968857200767445163675473,
    42919803642.64909876895789904700198885093,
    35711959237.35566804944018545154716670596,
    17921034426.03720969991975575445893111267,
    6039542586.35202800506429164430729792107,
    1439720407.311721673663223072794912393972,
    248874557.8620541565114603864132294232163,
    31426415.58540019438061423162831820536287,
    2876370.628935372441225409051620849613599,
    186056.2653952234950402949897160456992822,
    8071.672002365816210638002902272250613822,
    210.8242777515793458725097339207133627117,
    2.506628274631000270164908177133837338626,
};

constexpr std::array<double, 13> kLanczosDenom = {
    0.0,       39916800.0, 120543840.0, 150917976.0, 105258076.0,
    45995730.0, 13339535.0, 2637558.0,  357423.0,    32670.0,
    1925.0,    66.0,       1.0,
};

constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

// Above this the result overflows a double.
constexpr double kGammaMaxArg = 171.6243769563027;

double lanczos_sum(double z) {
  double num = 0.0;
  double den = 0.0;
  if (z <= 1.0) {
    for (std::size_t i = kLanczosNum.size(); i-- > 0;) {
      num = num * z + kLanczosNum[i];
      den = den * z + kLanczosDenom[i];
    }
  } else {
    // Same ratio in powers of 1/z, avoids overflow of z^12.
    const double y = 1.0 / z;
    for (std::size_t i = 0; i < kLanczosNum.size(); ++i) {
      num = num * y + kLanczosNum[i];
      den = den * y + kLanczosDenom[i];
    }
  }
  return num / den;
}

}  // namespace

double gamma(double z) {
  if (!(z > 0.0)) {
    std::ostringstream msg;
    msg << "gamma: argument must be positive, got " << z;
    throw DomainError(msg.str());
  }
  if (z > kGammaMaxArg) {
    std::ostringstream msg;
    msg << "gamma: result overflows for argument " << z;
    throw DomainError(msg.str());
  }
  if (z < 1e-8) return 1.0 / z - kEulerGamma;

  const double zgh = z + kLanczosG - 0.5;
  const double sum = lanczos_sum(z);
  if (z > 100.0) {
    // Split the power so that the intermediate does not overflow.
    const double hp = std::pow(zgh, 0.5 * (z - 0.5));
    return sum * (hp / std::exp(zgh)) * hp;
  }
  return sum * std::pow(zgh, z - 0.5) / std::exp(zgh);
}

double beta(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) {
    std::ostringstream msg;
    msg << "beta: arguments must be positive, got (" << p << ", " << q << ")";
    throw DomainError(msg.str());
  }
  return gamma(p) * gamma(q) / gamma(p + q);
}

double QuadratureRule::total_mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

QuadratureRule jacobi_rule(double a, std::size_t n) {
  if (!(a > 0.0 && a < 1.0)) {
    std::ostringstream msg;
    msg << "jacobi_rule: order must lie in (0, 1), got " << a;
    throw DomainError(msg.str());
  }
  if (n == 0) throw PreconditionError("jacobi_rule: need at least one node");

  // Jacobi weight (1 - y)^alpha (1 + y)^beta on (-1, 1), mapped by
  // t = (1 + y) / 2. alpha + beta = -1 for every a, which makes the generic
  // n = 1 off-diagonal formula 0/0; it is written out separately.
  const double alpha = a - 1.0;
  const double beta_exp = -a;
  const double ab = alpha + beta_exp;

  Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
  Eigen::VectorXd offdiag(static_cast<Eigen::Index>(n > 1 ? n - 1 : 1));

  for (std::size_t k = 0; k < n; ++k) {
    double rec_a;
    if (k == 0) {
      rec_a = (beta_exp - alpha) / (ab + 2.0);
    } else {
      const double s = 2.0 * static_cast<double>(k) + ab;
      rec_a = (beta_exp * beta_exp - alpha * alpha) / (s * (s + 2.0));
    }
    diag[static_cast<Eigen::Index>(k)] = 0.5 * (1.0 + rec_a);
  }
  for (std::size_t k = 1; k < n; ++k) {
    double rec_b;
    const double kk = static_cast<double>(k);
    if (k == 1) {
      rec_b = 4.0 * (1.0 + alpha) * (1.0 + beta_exp) /
              ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double s = 2.0 * kk + ab;
      rec_b = 4.0 * kk * (kk + alpha) * (kk + beta_exp) * (kk + ab) /
              (s * s * (s + 1.0) * (s - 1.0));
    }
    offdiag[static_cast<Eigen::Index>(k - 1)] = 0.5 * std::sqrt(rec_b);
  }

  const double mass = beta(1.0 - a, a);
  QuadratureRule rule;
  rule.order_a = a;
  rule.n = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  if (n == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = mass;
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "jacobi_rule: tridiagonal eigensolver did not converge (a = " << a
        << ", n = " << n << ")";
    throw NumericalError(msg.str());
  }

  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double v0 = vectors(0, jj);
    rule.nodes[j] = values[jj];
    rule.weights[j] = mass * v0 * v0;
  }

  for (std::size_t j = 0; j < n; ++j) {
    const bool inside = rule.nodes[j] > 0.0 && rule.nodes[j] < 1.0;
    const bool ordered = j == 0 || rule.nodes[j] > rule.nodes[j - 1];
    if (!inside || !ordered || !(rule.weights[j] > 0.0)) {
      std::ostringstream msg;
      msg << "jacobi_rule: invalid node/weight at index " << j
          << " (t = " << rule.nodes[j] << ", w = " << rule.weights[j]
          << ") for a = " << a << ", n = " << n;
      throw NumericalError(msg.str());
    }
  }
  return rule;
}

}  // namespace fracivp::specfun
