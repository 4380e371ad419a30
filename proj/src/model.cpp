#include "gwit/model.hpp"

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gwit/errors.hpp"
#include "gwit/symplectic.hpp"

namespace gwit {
namespace {

using ordered_json = nlohmann::ordered_json;

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Symmetry tolerance scales with the matrix so a covariance in unusual
// physical units is not rejected for roundoff in its large entries.
double symmetry_tolerance(const Eigen::MatrixXd& m) {
  return 1e-9 * std::max(1.0, max_abs(m));
}

void check_square(const Eigen::MatrixXd& m, int n_modes, const char* what) {
  if (n_modes < 1) throw InputError("covariance: n_modes must be >= 1");
  const int dim = 2 * n_modes;
  if (m.rows() != dim || m.cols() != dim)
    throw InputError(std::string(what) + ": expected " + std::to_string(dim) +
                     "x" + std::to_string(dim) + " for " +
                     std::to_string(n_modes) + " modes, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& rows, int dim,
                                 const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
    throw InputError(std::string(what) + ": expected " + std::to_string(dim) +
                     " rows");
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw InputError(std::string(what) + ": row " + std::to_string(i) +
                       " is not " + std::to_string(dim) + " numbers");
    for (int j = 0; j < dim; ++j) {
      const auto& cell = row[static_cast<size_t>(j)];
      if (!cell.is_number())
        throw InputError(std::string(what) + ": non-numeric entry at (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
      m(i, j) = cell.get<double>();
    }
  }
  return m;
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string to_string(UnitConvention units) {
  return units == UnitConvention::kVacuumOne ? "vacuum_1" : "vacuum_half";
}

UnitConvention unit_convention_from_string(const std::string& tag) {
  if (tag == "vacuum_1") return UnitConvention::kVacuumOne;
  if (tag == "vacuum_half") return UnitConvention::kVacuumHalf;
  throw InputError("unknown units tag \"" + tag +
                   "\" (expected vacuum_1 or vacuum_half)");
}

RawCovariance normalize_units(const RawCovariance& raw) {
  check_square(raw.matrix, raw.n_modes, "covariance matrix");
  check_square(raw.uncertainty, raw.n_modes, "uncertainty matrix");
  RawCovariance out = raw;
  if (raw.units == UnitConvention::kVacuumOne) {
    // Declared vacuum variance 1 -> internal 1/2; uncertainties are linear
    // in the covariance and scale identically.
    out.matrix *= 0.5;
    out.uncertainty *= 0.5;
    out.units = UnitConvention::kVacuumHalf;
  }
  return out;
}

CovarianceState CovarianceState::from_raw(const RawCovariance& raw) {
  const RawCovariance norm = normalize_units(raw);
  if (max_abs(norm.matrix - norm.matrix.transpose()) >
      symmetry_tolerance(norm.matrix))
    throw InputError("covariance matrix is not symmetric within tolerance");
  if (max_abs(norm.uncertainty - norm.uncertainty.transpose()) >
      symmetry_tolerance(norm.uncertainty))
    throw InputError("uncertainty matrix is not symmetric within tolerance");
  if (norm.uncertainty.minCoeff() < 0.0)
    throw InputError("uncertainty matrix has negative entries");

  CovarianceState state;
  state.label_ = norm.label;
  state.n_modes_ = norm.n_modes;
  state.matrix_ = 0.5 * (norm.matrix + norm.matrix.transpose());
  state.uncertainty_ = 0.5 * (norm.uncertainty + norm.uncertainty.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.matrix_,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("covariance eigendecomposition failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw InputError("covariance matrix is not positive definite (min "
                     "eigenvalue " +
                     format_double(es.eigenvalues().minCoeff()) + ")");
  return state;
}

CovarianceState CovarianceState::unchecked(std::string label, int n_modes,
                                           Eigen::MatrixXd matrix,
                                           Eigen::MatrixXd uncertainty) {
  CovarianceState state;
  state.label_ = std::move(label);
  state.n_modes_ = n_modes;
  state.matrix_ = std::move(matrix);
  state.uncertainty_ = std::move(uncertainty);
  return state;
}

CovarianceState CovarianceState::with_uniform_uncertainty(double delta) const {
  if (delta < 0.0) throw InputError("uncertainty must be >= 0");
  CovarianceState out = *this;
  out.uncertainty_.setConstant(dim(), dim(), delta);
  return out;
}

CovarianceState CovarianceState::relabeled(std::string label) const {
  CovarianceState out = *this;
  out.label_ = std::move(label);
  return out;
}

std::vector<Diagnostic> validate(const CovarianceState& state) {
  std::vector<Diagnostic> out;
  const int dim = state.dim();
  if (state.n_modes() < 1 || state.matrix().rows() != dim ||
      state.matrix().cols() != dim || state.uncertainty().rows() != dim ||
      state.uncertainty().cols() != dim) {
    out.push_back({Severity::kError, "matrix shape inconsistent with n_modes"});
    return out;
  }
  if (max_abs(state.matrix() - state.matrix().transpose()) >
      symmetry_tolerance(state.matrix()))
    out.push_back({Severity::kError, "covariance matrix is not symmetric"});
  if (max_abs(state.uncertainty() - state.uncertainty().transpose()) >
      symmetry_tolerance(state.uncertainty()))
    out.push_back({Severity::kError, "uncertainty matrix is not symmetric"});
  if (state.uncertainty().minCoeff() < 0.0)
    out.push_back({Severity::kError, "uncertainty has negative entries"});

  const Eigen::MatrixXd sym =
      0.5 * (state.matrix() + state.matrix().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    out.push_back({Severity::kError, "eigendecomposition failed"});
    return out;
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig <= 0.0) {
    out.push_back({Severity::kError,
                   "covariance matrix is not positive definite (min "
                   "eigenvalue " +
                       format_double(min_eig) + ")"});
    return out;  // the physicality check below needs a PD matrix
  }
  const double margin = physicality_margin(state);
  if (margin < -1e-9)
    out.push_back({Severity::kWarning,
                   "state violates the uncertainty relation (physicality "
                   "margin " +
                       format_double(margin) + ")"});
  return out;
}

TestOperator TestOperator::from_matrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() < 2 || m.rows() % 2 != 0)
    throw InputError("test operator: need a square 2N x 2N matrix");
  const int n = static_cast<int>(m.rows()) / 2;
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(m - m.transpose()) > 1e-12 * scale)
    throw InputError("test operator: matrix not symmetric within 1e-12");
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("test operator eigendecomposition failed");
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw InputError("test operator: matrix is not positive semidefinite");

  // Every mode must actually appear in the operator: a singular per-mode
  // 2x2 block would admit arbitrarily strong squeezing of that mode at no
  // cost and the separability bounds would all collapse to the same value.
  for (int j = 0; j < n; ++j) {
    const double a = m(j, j);
    const double b = m(n + j, n + j);
    const double c = m(j, n + j);
    if (a <= 0.0 || b <= 0.0 || a * b - c * c <= 1e-12 * scale * scale)
      throw InputError("test operator: per-mode block " + std::to_string(j + 1) +
                       " is not positive definite");
  }

  TestOperator op;
  op.n_modes_ = n;
  op.matrix_ = std::move(m);
  return op;
}

TestOperator TestOperator::from_positive_factor(const Eigen::MatrixXd& factor,
                                                double eps) {
  if (factor.rows() != factor.cols() || factor.rows() < 2 ||
      factor.rows() % 2 != 0)
    throw InputError("test operator factor: need a square 2N x 2N matrix");
  if (eps <= 0.0) throw InputError("test operator factor: eps must be > 0");
  Eigen::MatrixXd m = factor * factor.transpose();
  m.diagonal().array() += eps;
  m /= m.trace();
  TestOperator op;
  op.n_modes_ = static_cast<int>(factor.rows()) / 2;
  op.matrix_ = std::move(m);
  return op;
}

// --- file I/O ---------------------------------------------------------------

RawCovariance parse_covariance_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("covariance JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("covariance JSON: expected an object");
  for (const char* key : {"label", "n_modes", "units", "matrix", "uncertainty"})
    if (!doc.contains(key))
      throw InputError(std::string("covariance JSON: missing \"") + key +
                       "\"");
  RawCovariance raw;
  if (!doc["label"].is_string())
    throw InputError("covariance JSON: \"label\" must be a string");
  raw.label = doc["label"].get<std::string>();
  if (!doc["n_modes"].is_number_integer())
    throw InputError("covariance JSON: \"n_modes\" must be an integer");
  raw.n_modes = doc["n_modes"].get<int>();
  if (raw.n_modes < 1)
    throw InputError("covariance JSON: \"n_modes\" must be >= 1");
  if (!doc["units"].is_string())
    throw InputError("covariance JSON: \"units\" must be a string");
  raw.units = unit_convention_from_string(doc["units"].get<std::string>());
  raw.matrix = matrix_from_json(doc["matrix"], 2 * raw.n_modes, "matrix");
  raw.uncertainty =
      matrix_from_json(doc["uncertainty"], 2 * raw.n_modes, "uncertainty");
  return raw;
}

std::string format_covariance_json(const CovarianceState& state) {
  ordered_json doc;
  doc["label"] = state.label();
  doc["n_modes"] = state.n_modes();
  doc["units"] = to_string(UnitConvention::kVacuumHalf);
  doc["matrix"] = matrix_to_json(state.matrix());
  doc["uncertainty"] = matrix_to_json(state.uncertainty());
  return doc.dump(2) + "\n";
}

RawCovariance parse_covariance_csv(const std::string& text) {
  RawCovariance raw;
  bool units_seen = false;
  int declared_modes = 0;
  std::vector<std::vector<double>> blocks[2];
  int block = 0;
  bool block_started[2] = {false, false};

  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      // Blank line: separator between covariance and uncertainty blocks.
      if (block == 0 && block_started[0]) block = 1;
      continue;
    }
    if (line[first] == '#') {
      std::string body = line.substr(first + 1);
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;  // free-form comment
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
      };
      const std::string key = trim(body.substr(0, colon));
      const std::string value = trim(body.substr(colon + 1));
      if (key == "label") {
        raw.label = value;
      } else if (key == "units") {
        raw.units = unit_convention_from_string(value);
        units_seen = true;
      } else if (key == "n_modes") {
        declared_modes = std::stoi(value);
      }
      // Unknown keys are tolerated as comments.
      continue;
    }
    // Data row.
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() &&
               (cell[used] == ' ' || cell[used] == '\t'))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InputError("covariance CSV line " + std::to_string(line_no) +
                         ": bad number \"" + cell + "\"");
      }
    }
    if (block > 1)
      throw InputError("covariance CSV: more than two matrix blocks");
    blocks[block].push_back(std::move(row));
    block_started[block] = true;
  }

  if (!units_seen)
    throw InputError("covariance CSV: missing \"# units: ...\" header");
  if (!block_started[0] || !block_started[1])
    throw InputError(
        "covariance CSV: expected covariance and uncertainty blocks "
        "separated by a blank line");
  const int dim = static_cast<int>(blocks[0].size());
  if (dim < 2 || dim % 2 != 0)
    throw InputError("covariance CSV: matrix must be 2N x 2N");
  raw.n_modes = dim / 2;
  if (declared_modes != 0 && declared_modes != raw.n_modes)
    throw InputError("covariance CSV: n_modes header says " +
                     std::to_string(declared_modes) + " but matrix has " +
                     std::to_string(dim) + " rows");
  for (int b = 0; b < 2; ++b) {
    if (static_cast<int>(blocks[b].size()) != dim)
      throw InputError("covariance CSV: blocks must both be 2N x 2N");
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(blocks[b][static_cast<size_t>(i)].size()) != dim)
        throw InputError("covariance CSV: row " + std::to_string(i + 1) +
                         " of block " + std::to_string(b + 1) + " has " +
                         std::to_string(
                             blocks[b][static_cast<size_t>(i)].size()) +
                         " entries, expected " + std::to_string(dim));
      for (int j = 0; j < dim; ++j)
        m(i, j) = blocks[b][static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    (b == 0 ? raw.matrix : raw.uncertainty) = std::move(m);
  }
  return raw;
}

std::string format_covariance_csv(const CovarianceState& state) {
  std::string out;
  out += "# label: " + state.label() + "\n";
  out += "# n_modes: " + std::to_string(state.n_modes()) + "\n";
  out += "# units: " + to_string(UnitConvention::kVacuumHalf) + "\n";
  for (const Eigen::MatrixXd* m : {&state.matrix(), &state.uncertainty()}) {
    for (int i = 0; i < m->rows(); ++i) {
      for (int j = 0; j < m->cols(); ++j) {
        if (j) out += ',';
        out += format_double((*m)(i, j));
      }
      out += '\n';
    }
    if (m == &state.matrix()) out += '\n';
  }
  return out;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

CovarianceState load_covariance(const std::string& path) {
  const std::string text = read_file(path);
  RawCovariance raw;
  if (ends_with(path, ".json"))
    raw = parse_covariance_json(text);
  else if (ends_with(path, ".csv"))
    raw = parse_covariance_csv(text);
  else
    throw InputError("covariance file must end in .json or .csv: " + path);
  return CovarianceState::from_raw(raw);
}

void save_covariance(const CovarianceState& state, const std::string& path) {
  std::string text;
  if (ends_with(path, ".json"))
    text = format_covariance_json(state);
  else if (ends_with(path, ".csv"))
    text = format_covariance_csv(state);
  else
    throw InputError("covariance file must end in .json or .csv: " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

}  // namespace gwit
