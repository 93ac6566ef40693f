#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (used by the
// library) and a serial reference in kernels::reference that follows the
// defining formula directly; tests and the benchmark compare the two.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jspec/jacobi_core.hpp"

namespace jspec::kernels {

/// B(i, n) = φ_n(θ_i), one recurrence sweep per node.
Eigen::MatrixXd basis_table(const JacobiParams& params, std::span<const double> thetas, int n_max);

/// K = B diag(m) Bᵀ, i.e. K(i, j) = Σ_n m_n φ_n(θ_i) φ_n(θ_j).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& basis, std::span<const double> multipliers);

/// Centered maximal function of the piecewise-constant function that takes
/// values[i] on the cell [edges[i], edges[i+1]]; `radii` geometric radii per node
/// from the distance to the nearest cell edge up to the interval length.
std::vector<double> maximal_sweep(std::span<const double> edges, std::span<const double> nodes,
                                  std::span<const double> values, int radii);

/// Vertical square function
///   G(θ_i)² = Σ_q w_q t_q^{2s} |Σ_n A_n e^{-t_q a_n} B(i,n)|²
/// for a log-time rule with weights w_q for dt/t.
std::vector<double> square_function(const Eigen::MatrixXd& basis, std::span<const cplx> amplitudes,
                                    std::span<const double> rates, double s,
                                    std::span<const double> times, std::span<const double> weights);

namespace reference {

Eigen::MatrixXd basis_table(const JacobiParams& params, std::span<const double> thetas, int n_max);

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& basis, std::span<const double> multipliers);

std::vector<double> maximal_sweep(std::span<const double> edges, std::span<const double> nodes,
                                  std::span<const double> values, int radii);

std::vector<double> square_function(const Eigen::MatrixXd& basis, std::span<const cplx> amplitudes,
                                    std::span<const double> rates, double s,
                                    std::span<const double> times, std::span<const double> weights);

}  // namespace reference

}  // namespace jspec::kernels
