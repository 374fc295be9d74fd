// Copyright 2026 The oqtherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "oqtherm/bath.hpp"
#include "oqtherm/models.hpp"
#include "oqtherm/spin_algebra.hpp"

namespace oqtherm {

/// Generator of d rho/dt = -i [H, rho] + sum_baths D_b rho on column-stacked
/// density matrices, so A rho B -> (B^T kron A) vec(rho).
struct Liouvillian {
  int n = 0;
  SparseOperator generator;
  std::vector<BathSpec> baths;
  std::optional<ChainModel> model;

  std::int64_t hilbert_dim() const { return std::int64_t{1} << n; }
  double min_gamma() const;
};

// -i (1 kron H - H^T kron 1) for Hermitian H.
SparseOperator unitary_superop(const SparseOperator& h);

Liouvillian assemble(const ChainModel& model, std::vector<BathSpec> baths);
Liouvillian assemble(const SparseOperator& h, std::vector<BathSpec> baths);

class SteadyStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double tol = 1e-9;              // max-norm residual |L vec(rho)|
  std::optional<double> t_max;    // default 200 / min gamma
  double check_interval = 1.0;
  double courant = 0.5;           // h * |L| estimate
  int power_iterations = 20;
  int hermitize_every = 100;
  std::uint64_t seed = 1;
};

struct Checkpoint {
  double t = 0.0;
  double residual = 0.0;
  double trace_error = 0.0;
  double hermiticity_drift = 0.0;
};

struct SteadyStateResult {
  DenseMatrix rho_ss;
  double residual = 0.0;
  bool converged = false;
  std::int64_t steps = 0;
  double t_final = 0.0;
  double step_size = 0.0;
  double norm_estimate = 0.0;
  double elapsed_seconds = 0.0;
  std::vector<Checkpoint> history;
  // Fit of log r(t) over the second half of the history.
  double decay_rate = 0.0;
  double fit_r_squared = 0.0;
};

// |L v| / |v| after repeated application to a seeded random vector.
double estimate_generator_norm(const SparseOperator& generator, int iterations, std::uint64_t seed);

/// Fixed-step classical RK4 on vec(rho).
class Rk4Propagator {
 public:
  Rk4Propagator(const Liouvillian& liouvillian, const DenseMatrix& rho0, double step);

  void step();
  // Takes round(duration / step) steps.
  void advance(double duration);

  double time() const { return time_; }
  std::int64_t steps() const { return steps_; }
  double step_size() const { return h_; }
  const DenseVector& state() const { return v_; }
  DenseMatrix rho() const { return unvectorize(v_); }

  double residual() const;  // max |L v|
  cplx trace() const;
  double hermiticity_drift() const;
  void hermitize();

 private:
  const SparseOperator* generator_;
  std::int64_t dim_;
  double h_;
  double time_ = 0.0;
  std::int64_t steps_ = 0;
  DenseVector v_, k_, acc_, tmp_;
};

SteadyStateResult propagate_to_steady_state(const Liouvillian& liouvillian, const DenseMatrix& rho0,
                                            const SolverConfig& config = {});

/// Dense oracle for n <= 4: eigenvector of the generator at eigenvalue 0.
/// Throws SteadyStateError when the zero eigenvalue is degenerate.
SteadyStateResult nullspace_steady_state(const Liouvillian& liouvillian);

struct ExponentialFit {
  double rate = 0.0;
  double r_squared = 0.0;
};
ExponentialFit fit_log_residual(const std::vector<Checkpoint>& history);

DenseMatrix maximally_mixed(int n);
// Random pure product state, deterministic in `seed`.
DenseMatrix random_product_state(int n, std::uint64_t seed);

}  // namespace oqtherm
