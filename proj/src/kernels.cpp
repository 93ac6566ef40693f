#include "jspec/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "jspec/error.hpp"

namespace jspec::kernels {

namespace {

std::vector<double> normalization_table(const JacobiParams& params, int n_max) {
  std::vector<double> d(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) d[n] = normalization_constant(params, n);
  return d;
}

// ∫_0^x of the piecewise-constant function, from prefix sums over cells.
double cumulative(std::span<const double> edges, std::span<const double> prefix,
                  std::span<const double> values, double x) {
  if (x <= edges.front()) return 0.0;
  if (x >= edges.back()) return prefix.back();
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const auto j = static_cast<std::size_t>(it - edges.begin()) - 1;
  return prefix[j] + values[j] * (x - edges[j]);
}

double first_radius(std::span<const double> edges, std::span<const double> nodes, std::size_t i) {
  return std::max(std::min(nodes[i] - edges[i], edges[i + 1] - nodes[i]), 1e-300);
}

}  // namespace

Eigen::MatrixXd basis_table(const JacobiParams& params, std::span<const double> thetas, int n_max) {
  if (n_max < 0) throw DomainError("basis table needs n_max >= 0");
  const auto rows = static_cast<Eigen::Index>(thetas.size());
  Eigen::MatrixXd table(rows, n_max + 1);
  const std::vector<double> d = normalization_table(params, n_max);
  const double a = params.alpha();
  const double b = params.beta();

#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double theta = thetas[i];
    const double x = std::cos(theta);
    const double w = std::pow(std::sin(0.5 * theta), a + 0.5) * std::pow(std::cos(0.5 * theta), b + 0.5);
    double p_prev = 1.0;
    table(i, 0) = w * d[0];
    if (n_max == 0) continue;
    double p = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
    table(i, 1) = w * d[1] * p;
    for (int k = 2; k <= n_max; ++k) {
      const double c = 2.0 * k + a + b;
      const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
      const double a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
      const double a3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
      const double next = (a2 * p - a3 * p_prev) / a1;
      p_prev = p;
      p = next;
      table(i, k) = w * d[k] * p;
    }
  }
  return table;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& basis, std::span<const double> multipliers) {
  const Eigen::Map<const Eigen::VectorXd> m(multipliers.data(), static_cast<Eigen::Index>(multipliers.size()));
  const auto b = basis.leftCols(m.size());
  const Eigen::MatrixXd scaled = b * m.asDiagonal();
  return scaled * b.transpose();
}

std::vector<double> maximal_sweep(std::span<const double> edges, std::span<const double> nodes,
                                  std::span<const double> values, int radii) {
  const std::size_t n = nodes.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + values[j] * (edges[j + 1] - edges[j]);
  const double lo = edges.front();
  const double hi = edges.back();
  std::vector<double> out(n, 0.0);

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const double r0 = first_radius(edges, nodes, i);
    const double ratio = (hi - lo) / r0;
    double best = 0.0;
    for (int k = 0; k < radii; ++k) {
      const double r = radii > 1 ? r0 * std::pow(ratio, static_cast<double>(k) / (radii - 1)) : r0;
      const double a = std::max(lo, nodes[i] - r);
      const double b = std::min(hi, nodes[i] + r);
      const double avg = (cumulative(edges, prefix, values, b) - cumulative(edges, prefix, values, a)) / (b - a);
      best = std::max(best, avg);
    }
    out[i] = best;
  }
  return out;
}

std::vector<double> square_function(const Eigen::MatrixXd& basis, std::span<const cplx> amplitudes,
                                    std::span<const double> rates, double s,
                                    std::span<const double> times, std::span<const double> weights) {
  const auto modes = static_cast<Eigen::Index>(amplitudes.size());
  const auto nt = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd er(modes, nt);
  Eigen::MatrixXd ei(modes, nt);
  for (Eigen::Index q = 0; q < nt; ++q) {
    for (Eigen::Index n = 0; n < modes; ++n) {
      const cplx v = amplitudes[n] * std::exp(-times[q] * rates[n]);
      er(n, q) = v.real();
      ei(n, q) = v.imag();
    }
  }
  const Eigen::MatrixXd b = basis.leftCols(modes);
  const Eigen::MatrixXd vr = b * er;
  const Eigen::MatrixXd vi = b * ei;
  std::vector<double> tw(static_cast<std::size_t>(nt));
  for (Eigen::Index q = 0; q < nt; ++q) tw[q] = weights[q] * std::pow(times[q], 2.0 * s);

  const auto rows = basis.rows();
  std::vector<double> out(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (Eigen::Index q = 0; q < nt; ++q) acc += tw[q] * (vr(i, q) * vr(i, q) + vi(i, q) * vi(i, q));
    out[i] = acc;
  }
  return out;
}

namespace reference {

Eigen::MatrixXd basis_table(const JacobiParams& params, std::span<const double> thetas, int n_max) {
  Eigen::MatrixXd table(static_cast<Eigen::Index>(thetas.size()), n_max + 1);
  for (std::size_t i = 0; i < thetas.size(); ++i)
    for (int n = 0; n <= n_max; ++n) table(static_cast<Eigen::Index>(i), n) = eval_phi(params, n, thetas[i]);
  return table;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& basis, std::span<const double> multipliers) {
  const Eigen::Index n = basis.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < multipliers.size(); ++m)
        s += multipliers[m] * basis(i, static_cast<Eigen::Index>(m)) * basis(j, static_cast<Eigen::Index>(m));
      k(i, j) = s;
      k(j, i) = s;
    }
  }
  return k;
}

std::vector<double> maximal_sweep(std::span<const double> edges, std::span<const double> nodes,
                                  std::span<const double> values, int radii) {
  const std::size_t n = nodes.size();
  const double lo = edges.front();
  const double hi = edges.back();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r0 = first_radius(edges, nodes, i);
    double best = 0.0;
    for (int k = 0; k < radii; ++k) {
      const double r = radii > 1 ? r0 * std::pow((hi - lo) / r0, static_cast<double>(k) / (radii - 1)) : r0;
      const double a = std::max(lo, nodes[i] - r);
      const double b = std::min(hi, nodes[i] + r);
      double integral = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double overlap = std::min(b, edges[j + 1]) - std::max(a, edges[j]);
        if (overlap > 0.0) integral += values[j] * overlap;
      }
      best = std::max(best, integral / (b - a));
    }
    out[i] = best;
  }
  return out;
}

std::vector<double> square_function(const Eigen::MatrixXd& basis, std::span<const cplx> amplitudes,
                                    std::span<const double> rates, double s,
                                    std::span<const double> times, std::span<const double> weights) {
  const Eigen::Index rows = basis.rows();
  std::vector<double> out(static_cast<std::size_t>(rows), 0.0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::size_t q = 0; q < times.size(); ++q) {
      cplx v = 0.0;
      for (std::size_t n = 0; n < amplitudes.size(); ++n)
        v += amplitudes[n] * std::exp(-times[q] * rates[n]) * basis(i, static_cast<Eigen::Index>(n));
      acc += weights[q] * std::pow(times[q], 2.0 * s) * std::norm(v);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace reference

}  // namespace jspec::kernels
