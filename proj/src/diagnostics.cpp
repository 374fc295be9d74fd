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

#include "oqtherm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace oqtherm {

namespace {

constexpr double kImagTolerance = 1e-10;

double real_checked(cplx v, const char* what) {
  if (std::abs(v.imag()) > kImagTolerance) {
    std::ostringstream msg;
    msg << what << ": imaginary part " << v.imag() << " exceeds " << kImagTolerance;
    throw std::domain_error(msg.str());
  }
  return v.real();
}

double local_expectation(const DenseMatrix& reduced, const DenseMatrix& op) {
  return real_checked((reduced * op).trace(), "expectation");
}

std::vector<int> contiguous(int first, int count) {
  std::vector<int> sites(static_cast<std::size_t>(count));
  std::iota(sites.begin(), sites.end(), first);
  return sites;
}

// Chebyshev polynomials T_0..T_degree at x in [-1, 1].
Eigen::RowVectorXd chebyshev_row(double x, int degree) {
  Eigen::RowVectorXd row(degree + 1);
  row(0) = 1.0;
  if (degree >= 1) row(1) = x;
  for (int k = 2; k <= degree; ++k) row(k) = 2.0 * x * row(k - 1) - row(k - 2);
  return row;
}

}  // namespace

double expectation(const DenseMatrix& rho, const SparseOperator& op) {
  if (rho.rows() != op.dim() || rho.cols() != op.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return real_checked(trace_product(rho, op), "expectation");
}

ObservableReport observable_report(const DenseMatrix& rho, const ChainModel& model) {
  const int n = model.n;
  if (rho.rows() != (Eigen::Index{1} << n)) throw std::invalid_argument("observable_report: dimension mismatch");
  ObservableReport r;
  r.n = n;
  const DenseMatrix x = pauli(Axis::X), y = pauli(Axis::Y), z = pauli(Axis::Z);
  for (int j = 0; j < n; ++j) {
    const int site[] = {j};
    const DenseMatrix one = partial_trace(rho, site, n);
    r.sigma_x.push_back(local_expectation(one, x));
    r.sigma_y.push_back(local_expectation(one, y));
    r.sigma_z.push_back(local_expectation(one, z));
  }
  const DenseMatrix xx = kron(x, x), zz = kron(z, z);
  for (int l = 0; l + 1 < n; ++l) {
    const DenseMatrix two = partial_trace(rho, contiguous(l, 2), n);
    r.bond_energy.push_back(local_expectation(two, local_density_matrix(model, l)));
    r.xx.push_back(local_expectation(two, xx));
    r.zz.push_back(local_expectation(two, zz));
  }
  const DenseMatrix q4 = q4_density_matrix();
  for (int l = 0; l + 3 < n; ++l) {
    r.q4.push_back(local_expectation(partial_trace(rho, contiguous(l, 4), n), q4));
  }
  return r;
}

ObservableReport difference(const ObservableReport& a, const ObservableReport& b) {
  if (a.n != b.n) throw std::invalid_argument("difference: reports are for different chain lengths");
  auto sub = [](const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k] - v[k];
    return out;
  };
  ObservableReport d;
  d.n = a.n;
  d.sigma_x = sub(a.sigma_x, b.sigma_x);
  d.sigma_y = sub(a.sigma_y, b.sigma_y);
  d.sigma_z = sub(a.sigma_z, b.sigma_z);
  d.bond_energy = sub(a.bond_energy, b.bond_energy);
  d.xx = sub(a.xx, b.xx);
  d.zz = sub(a.zz, b.zz);
  d.q4 = sub(a.q4, b.q4);
  return d;
}

DenseMatrix central_block_hamiltonian(const ChainModel& model, int& window_start) {
  if (model.n < 6) throw std::invalid_argument("moment_report: requires n >= 6");
  window_start = (model.n - 6) / 2;
  DenseMatrix h6 = DenseMatrix::Zero(64, 64);
  for (int b = 0; b < 5; ++b) {
    h6 += embed(local_density_matrix(model, window_start + b), {b, b + 1}, 6).to_dense();
  }
  return h6;
}

std::vector<double> central_moments(const DenseMatrix& rho, const ChainModel& model, int p_max) {
  if (p_max < 2) throw std::invalid_argument("central_moments: p_max must be at least 2");
  int start = 0;
  const DenseMatrix h6 = central_block_hamiltonian(model, start);
  const DenseMatrix r6 = partial_trace(rho, contiguous(start, 6), model.n);
  const double mean = local_expectation(r6, h6);
  const DenseMatrix a = (h6 - mean * DenseMatrix::Identity(64, 64)) / 5.0;
  std::vector<double> out;
  DenseMatrix power = a;
  for (int p = 2; p <= p_max; ++p) {
    power = power * a;
    out.push_back(local_expectation(r6, power));
  }
  return out;
}

MomentReport moment_report(const DenseMatrix& rho_ss, const DenseMatrix& rho_ref, const ChainModel& model,
                           int p_max) {
  MomentReport r;
  central_block_hamiltonian(model, r.window_start);
  r.state = central_moments(rho_ss, model, p_max);
  r.reference = central_moments(rho_ref, model, p_max);
  for (int p = 2; p <= p_max; ++p) {
    r.orders.push_back(p);
    const double s = r.state[p - 2];
    const double ref = r.reference[p - 2];
    r.relative_error.push_back(ref != 0.0 ? std::abs(s - ref) / std::abs(ref) : std::abs(s - ref));
  }
  return r;
}

Sector Sector::automatic(const ChainModel& model) {
  if (model.family == ModelFamily::XxzStaggered || model.conserves_magnetization()) {
    return Sector{SectorKind::Magnetization, model.n % 2};
  }
  if (model.reflection_symmetric()) return Sector{SectorKind::ReflectionEven, 0};
  return Sector{SectorKind::Full, 0};
}

std::string Sector::label() const {
  switch (kind) {
    case SectorKind::Full: return "full";
    case SectorKind::Magnetization: return "magnetization=" + std::to_string(magnetization);
    case SectorKind::ReflectionEven: return "reflection_even";
    case SectorKind::ReflectionOdd: return "reflection_odd";
  }
  return "unknown";
}

Sector sector_from_string(const std::string& s) {
  if (s == "full") return {SectorKind::Full, 0};
  if (s == "reflection_even") return {SectorKind::ReflectionEven, 0};
  if (s == "reflection_odd") return {SectorKind::ReflectionOdd, 0};
  const std::string prefix = "magnetization=";
  if (s.rfind(prefix, 0) == 0) return {SectorKind::Magnetization, std::stoi(s.substr(prefix.size()))};
  throw std::invalid_argument("unknown sector '" + s +
                              "' (expected full, reflection_even, reflection_odd or magnetization=<m>)");
}

DenseMatrix sector_hamiltonian(const ChainModel& model, const Sector& sector) {
  const int n = model.n;
  const std::int64_t dim = std::int64_t{1} << n;
  const SparseOperator h = hamiltonian(model);
  if (sector.kind == SectorKind::Full) return h.to_dense();

  // Orthonormal sector basis as sparse columns of P; H_sector = P^dag H P.
  using Triplet = Eigen::Triplet<cplx>;
  std::vector<Triplet> entries;
  int cols = 0;
  if (sector.kind == SectorKind::Magnetization) {
    if (!model.conserves_magnetization()) {
      throw std::invalid_argument("sector: model does not conserve total magnetization");
    }
    for (std::int64_t s = 0; s < dim; ++s) {
      if (magnetization_of(s, n) == sector.magnetization) entries.emplace_back(static_cast<int>(s), cols++, 1.0);
    }
  } else {
    if (!model.reflection_symmetric()) throw std::invalid_argument("sector: model is not reflection symmetric");
    const bool even = sector.kind == SectorKind::ReflectionEven;
    const double amp = 1.0 / std::numbers::sqrt2;
    for (std::int64_t s = 0; s < dim; ++s) {
      const std::int64_t r = reflect_basis_state(s, n);
      if (r < s) continue;
      if (r == s) {
        if (even) entries.emplace_back(static_cast<int>(s), cols++, 1.0);
        continue;
      }
      entries.emplace_back(static_cast<int>(s), cols, amp);
      entries.emplace_back(static_cast<int>(r), cols, even ? amp : -amp);
      ++cols;
    }
  }
  Eigen::SparseMatrix<cplx> p(dim, cols);
  p.setFromTriplets(entries.begin(), entries.end());
  const Eigen::SparseMatrix<cplx> hc = h.matrix();
  const Eigen::SparseMatrix<cplx> block = p.adjoint() * (hc * p);
  DenseMatrix out(block);
  return 0.5 * (out + out.adjoint());
}

SpacingStatistics level_spacings(const ChainModel& model, const Sector& sector, const SpacingOptions& options) {
  const DenseMatrix h = sector_hamiltonian(model, sector);
  if (h.rows() < options.min_levels) {
    throw std::invalid_argument("level_spacings: sector " + sector.label() + " has only " +
                                std::to_string(h.rows()) + " levels (< " + std::to_string(options.min_levels) +
                                "); statistics refused");
  }
  const RealVector values = eigvalsh(h);
  return spacing_statistics_from_levels(std::vector<double>(values.data(), values.data() + values.size()),
                                        sector.label(), options);
}

SpacingStatistics spacing_statistics_from_levels(std::vector<double> levels, const std::string& label,
                                                 const SpacingOptions& options) {
  if (options.edge_trim < 0.0 || options.edge_trim >= 0.5) {
    throw std::invalid_argument("edge_trim must lie in [0, 0.5)");
  }
  std::sort(levels.begin(), levels.end());
  const auto total = static_cast<std::ptrdiff_t>(levels.size());
  const auto trim = static_cast<std::ptrdiff_t>(std::floor(options.edge_trim * static_cast<double>(total)));
  std::vector<double> kept(levels.begin() + trim, levels.end() - trim);
  const auto k = static_cast<Eigen::Index>(kept.size());
  if (k < options.poly_degree + 2) throw std::invalid_argument("level_spacings: too few levels to unfold");

  const double lo = kept.front();
  const double hi = kept.back();
  const double centre = 0.5 * (lo + hi);
  const double half = hi > lo ? 0.5 * (hi - lo) : 1.0;
  Eigen::MatrixXd design(k, options.poly_degree + 1);
  Eigen::VectorXd staircase(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    design.row(i) = chebyshev_row((kept[i] - centre) / half, options.poly_degree);
    staircase(i) = static_cast<double>(trim + i);
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(staircase);
  const Eigen::VectorXd unfolded = design * coef;

  std::vector<double> spacings(static_cast<std::size_t>(k - 1));
  for (Eigen::Index i = 0; i + 1 < k; ++i) spacings[i] = unfolded(i + 1) - unfolded(i);

  SpacingStatistics stats = histogram_spacings(std::move(spacings), options);
  stats.sector = label;
  stats.eigenvalues = Eigen::Map<const RealVector>(levels.data(), total);
  return stats;
}

SpacingStatistics histogram_spacings(std::vector<double> spacings, const SpacingOptions& options) {
  if (spacings.empty()) throw std::invalid_argument("histogram_spacings: no spacings");
  if (options.bins < 1 || !(options.s_max > 0.0)) throw std::invalid_argument("histogram_spacings: bad binning");
  SpacingStatistics stats;
  stats.bin_width = options.s_max / options.bins;
  stats.counts.assign(static_cast<std::size_t>(options.bins), 0);
  for (double s : spacings) {
    auto bin = static_cast<long>(std::floor(s / stats.bin_width));
    bin = std::clamp(bin, 0L, static_cast<long>(options.bins - 1));
    ++stats.counts[bin];
  }
  const double total = static_cast<double>(spacings.size());
  for (int b = 0; b < options.bins; ++b) {
    stats.bin_centers.push_back((b + 0.5) * stats.bin_width);
    stats.density.push_back(stats.counts[b] / (total * stats.bin_width));
  }
  stats.mean_spacing = std::accumulate(spacings.begin(), spacings.end(), 0.0) / total;
  stats.spacings = std::move(spacings);
  stats.eta = eta_metric(stats);
  return stats;
}

double poisson_density(double s) { return std::exp(-s); }

double wigner_dyson_density(double s) {
  const double pi = std::numbers::pi;
  return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
}

double eta_from_density(std::span<const double> density, double bin_width) {
  double acc = 0.0;
  for (std::size_t b = 0; b < density.size(); ++b) {
    const double mid = (static_cast<double>(b) + 0.5) * bin_width;
    acc += std::abs(density[b] - wigner_dyson_density(mid)) * bin_width;
  }
  return acc / kPoissonWignerDistance;
}

double eta_metric(const SpacingStatistics& stats) { return eta_from_density(stats.density, stats.bin_width); }

int central_q4_window(int n) {
  if (n < 4) throw std::invalid_argument("q4 window requires n >= 4");
  return (n - 4) / 2;
}

double q4_deviation(const DenseMatrix& rho_ss, const DenseMatrix& rho_ref, int n, std::optional<int> window) {
  const int l = window.value_or(central_q4_window(n));
  if (l < 0 || l > n - 4) throw std::out_of_range("q4_deviation: window outside the chain");
  const auto sites = contiguous(l, 4);
  const DenseMatrix q4 = q4_density_matrix();
  return local_expectation(partial_trace(rho_ss, sites, n), q4) -
         local_expectation(partial_trace(rho_ref, sites, n), q4);
}

double relative_q4_deviation(double deviation, std::optional<double> baseline) {
  if (!baseline) throw std::invalid_argument("relative q4 deviation requires a B = 0 baseline run");
  if (*baseline == 0.0) throw std::invalid_argument("relative q4 deviation: baseline deviation is zero");
  return deviation / *baseline;
}

}  // namespace oqtherm
