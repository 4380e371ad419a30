#include "gwit/synth.hpp"

#include <cmath>
#include <sstream>

#include "gwit/errors.hpp"
#include "gwit/rng.hpp"
#include "gwit/symplectic.hpp"

namespace gwit {
namespace {

CovarianceState make_state(std::string label, int n_modes,
                           Eigen::MatrixXd matrix) {
  RawCovariance raw;
  raw.label = std::move(label);
  raw.n_modes = n_modes;
  raw.units = UnitConvention::kVacuumHalf;
  raw.matrix = std::move(matrix);
  raw.uncertainty = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  return CovarianceState::from_raw(raw);
}

std::string format_short(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

CovarianceState vacuum_state(int n_modes) {
  if (n_modes < 1) throw InputError("vacuum: n_modes must be >= 1");
  return make_state("vacuum(" + std::to_string(n_modes) + ")", n_modes,
                    0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceState squeezed_supermodes(const std::vector<double>& db) {
  const int n = static_cast<int>(db.size());
  if (n < 1) throw InputError("squeezed supermodes: need at least one mode");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    c(j, j) = 0.5 * std::pow(10.0, db[static_cast<size_t>(j)] / 10.0);
    c(n + j, n + j) = 0.5 * std::pow(10.0, -db[static_cast<size_t>(j)] / 10.0);
  }
  std::string label = "squeezed_supermodes(dB=";
  for (int j = 0; j < n; ++j) {
    if (j) label += ',';
    label += format_short(db[static_cast<size_t>(j)]);
  }
  label += ")";
  return make_state(std::move(label), n, std::move(c));
}

Eigen::MatrixXd random_passive_symplectic(int n_modes, std::uint64_t seed) {
  if (n_modes < 1)
    throw InputError("random passive symplectic: n_modes must be >= 1");
  const int n = n_modes;
  Rng rng(mix_seed(seed, 0x70617373));  // independent stream per seed
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  // QR with the R-diagonal phase fix gives a Haar-distributed unitary.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd u = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    const std::complex<double> rjj = qr.matrixQR()(j, j);
    const double mag = std::abs(rjj);
    const std::complex<double> phase = mag > 0 ? rjj / mag : 1.0;
    u.col(j) *= phase;
  }
  // U = X + iY unitary embeds as the orthogonal-symplectic [[X, Y], [-Y, X]].
  Eigen::MatrixXd s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = u.real();
  s.topRightCorner(n, n) = u.imag();
  s.bottomLeftCorner(n, n) = -u.imag();
  s.bottomRightCorner(n, n) = u.real();
  return s;
}

Eigen::MatrixXd squeezer_symplectic(const std::vector<double>& r) {
  const int n = static_cast<int>(r.size());
  if (n < 1) throw InputError("squeezer: need at least one mode");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    s(j, j) = std::exp(-r[static_cast<size_t>(j)]);
    s(n + j, n + j) = std::exp(r[static_cast<size_t>(j)]);
  }
  return s;
}

Eigen::MatrixXd two_mode_squeezer_symplectic(int n_modes, int i, int j,
                                             double r) {
  if (i < 0 || j < 0 || i >= n_modes || j >= n_modes || i == j)
    throw InputError("two-mode squeezer: bad mode pair");
  const int n = n_modes;
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  s(i, i) = ch;
  s(j, j) = ch;
  s(i, j) = sh;
  s(j, i) = sh;
  s(n + i, n + i) = ch;
  s(n + j, n + j) = ch;
  s(n + i, n + j) = -sh;
  s(n + j, n + i) = -sh;
  return s;
}

CovarianceState apply_symplectic(const Eigen::MatrixXd& s,
                                 const CovarianceState& state) {
  if (s.rows() != state.dim() || s.cols() != state.dim())
    throw InputError("apply symplectic: dimension mismatch");
  const Eigen::MatrixXd omega = symplectic_form(state.n_modes());
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s * omega * s.transpose() - omega).cwiseAbs().maxCoeff() >
      1e-10 * scale * scale)
    throw InputError("apply symplectic: matrix is not symplectic");
  Eigen::MatrixXd c = s * state.matrix() * s.transpose();
  c = 0.5 * (c + c.transpose()).eval();
  // Worst-case propagation of independent entry errors through |S . S^T|.
  const Eigen::MatrixXd abs_s = s.cwiseAbs();
  Eigen::MatrixXd dc = abs_s * state.uncertainty() * abs_s.transpose();
  dc = 0.5 * (dc + dc.transpose()).eval();

  RawCovariance raw;
  raw.label = state.label();
  raw.n_modes = state.n_modes();
  raw.units = UnitConvention::kVacuumHalf;
  raw.matrix = std::move(c);
  raw.uncertainty = std::move(dc);
  return CovarianceState::from_raw(raw);
}

CovarianceState two_mode_squeezed(int n_modes, int i, int j, double r) {
  if (i < 0 || j < 0 || i >= n_modes || j >= n_modes || i == j)
    throw InputError("two-mode squeezed state: bad mode pair");
  const int n = n_modes;
  Eigen::MatrixXd c =
      0.5 * Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const double ch = 0.5 * std::cosh(2.0 * r);
  const double sh = 0.5 * std::sinh(2.0 * r);
  c(i, i) = ch;
  c(j, j) = ch;
  c(i, j) = sh;
  c(j, i) = sh;
  c(n + i, n + i) = ch;
  c(n + j, n + j) = ch;
  c(n + i, n + j) = -sh;
  c(n + j, n + i) = -sh;
  return make_state("tms(r=" + format_short(r) + ",modes=" +
                        std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ",n=" + std::to_string(n) + ")",
                    n, std::move(c));
}

CovarianceState mixture_covariance(
    const std::vector<double>& weights,
    const std::vector<CovarianceState>& parts,
    const std::optional<std::vector<Partition>>& part_partitions) {
  if (parts.empty()) throw InputError("mixture: no parts");
  if (weights.size() != parts.size())
    throw InputError("mixture: " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(parts.size()) +
                     " parts");
  const int n = parts.front().n_modes();
  double total = 0.0;
  for (double w : weights) {
    if (w <= 0.0) throw InputError("mixture: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InputError("mixture: weights sum to " + format_short(total) +
                     ", expected 1");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].n_modes() != n)
      throw InputError("mixture: parts have different mode counts");
    c += weights[i] * parts[i].matrix();
    dc += weights[i] * parts[i].uncertainty();
  }

  std::string label = "mixture(" + std::to_string(parts.size()) + " parts";
  if (part_partitions) {
    if (part_partitions->size() != parts.size())
      throw InputError("mixture: one partition per part required");
    int min_blocks = n + 1;
    for (const Partition& p : *part_partitions) {
      if (p.n_modes() != n)
        throw InputError("mixture: partition mode count mismatch");
      min_blocks = std::min(min_blocks, p.block_count());
    }
    // Each part is separable for its own partition, hence for every
    // coarsening; the whole mixture is guaranteed min-blocks-separable.
    label += "; " + std::to_string(min_blocks) + "-separable";
  }
  label += ")";
  RawCovariance raw;
  raw.label = std::move(label);
  raw.n_modes = n;
  raw.units = UnitConvention::kVacuumHalf;
  raw.matrix = std::move(c);
  raw.uncertainty = std::move(dc);
  return CovarianceState::from_raw(raw);
}

CovarianceState spopo_like(const SpopoParams& params) {
  if (params.n_modes < 1) throw InputError("spopo-like: n_modes must be >= 1");
  if (params.impurity < 1.0)
    throw InputError("spopo-like: impurity must be >= 1");
  if (params.delta_c < 0.0)
    throw InputError("spopo-like: delta_c must be >= 0");
  std::vector<double> db = params.db;
  if (db.empty()) {
    // Linear ramp over the typical measured squeezing span.
    const double lo = -2.6, hi = 3.0;
    db.resize(static_cast<size_t>(params.n_modes));
    for (int j = 0; j < params.n_modes; ++j)
      db[static_cast<size_t>(j)] =
          params.n_modes == 1
              ? lo
              : lo + (hi - lo) * j / (params.n_modes - 1);
  }
  if (static_cast<int>(db.size()) != params.n_modes)
    throw InputError("spopo-like: dB profile length must equal n_modes");

  CovarianceState supermodes = squeezed_supermodes(db);
  Eigen::MatrixXd c = params.impurity * supermodes.matrix();
  const Eigen::MatrixXd s =
      random_passive_symplectic(params.n_modes, params.mixing_seed);
  c = (s * c * s.transpose()).eval();
  c = 0.5 * (c + c.transpose()).eval();
  CovarianceState state = make_state(
      "spopo_like(n=" + std::to_string(params.n_modes) +
          ",seed=" + std::to_string(params.mixing_seed) +
          ",impurity=" + format_short(params.impurity) + ")",
      params.n_modes, std::move(c));
  return state.with_uniform_uncertainty(params.delta_c);
}

}  // namespace gwit
