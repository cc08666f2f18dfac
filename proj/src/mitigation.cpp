// Copyright 2026 The qemlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qemlab/mitigation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>

#include "qemlab/io.hpp"

namespace qemlab {

namespace {

bool bit_at(Bits b, int n_bits, int k) { return (b >> (n_bits - 1 - k)) & 1U; }

}  // namespace

double QuasiDistribution::mass() const {
  double s = 0.0;
  for (const auto& [b, w] : weights) s += w;
  return s;
}

QuasiDistribution QuasiDistribution::from(const MeasurementSet& m) {
  if (m.empty()) throw std::invalid_argument("empty measurement set");
  QuasiDistribution d;
  d.n_bits = m.n_qubits();
  d.shots = static_cast<double>(m.shots());
  for (const auto& [b, c] : m.counts()) d.weights[b] = static_cast<double>(c) / d.shots;
  return d;
}

int parity_sign(Bits b, int n_bits, std::span<const int> positions) {
  int s = 1;
  for (int k : positions) {
    if (k < 0 || k >= n_bits) throw std::out_of_range("parity position out of range");
    if (bit_at(b, n_bits, k)) s = -s;
  }
  return s;
}

double parity_expectation(const QuasiDistribution& d, std::span<const int> positions) {
  double num = 0.0, den = 0.0;
  for (const auto& [b, w] : d.weights) {
    num += parity_sign(b, d.n_bits, positions) * w;
    den += w;
  }
  if (den <= 0.0) throw std::domain_error("distribution has no positive mass");
  return num / den;
}

Estimate raw_estimate(const MeasurementSet& m, const PauliString& p,
                      const std::optional<PauliString>& basis) {
  if (m.n_qubits() != p.n_qubits()) throw std::invalid_argument("register width mismatch");
  const auto support = p.support();
  if (basis) {
    if (basis->n_qubits() != p.n_qubits()) throw std::invalid_argument("basis width mismatch");
    for (int q : support) {
      const char b = basis->op(q) == 'I' ? 'Z' : basis->op(q);
      if (b != p.op(q)) {
        throw std::invalid_argument("measurement basis " + basis->str() + " cannot estimate " +
                                    p.str());
      }
    }
  }
  const auto d = QuasiDistribution::from(m);
  const double v = parity_expectation(d, support);
  return {v, (1.0 - v * v) / d.shots};
}

Estimate energy_estimate(const std::map<PauliString, Estimate>& per_term, const PauliSum& h) {
  Estimate e{h.identity_coeff(), 0.0};
  for (const auto& t : h.non_identity_terms()) {
    auto it = per_term.find(t.string);
    if (it == per_term.end()) throw std::invalid_argument("missing estimate for " + t.string.str());
    e.value += t.coeff * it->second.value;
    e.variance += t.coeff * t.coeff * it->second.variance;
  }
  return e;
}

AssignmentMatrix::AssignmentMatrix(std::vector<double> flips) : flips_(std::move(flips)) {
  if (flips_.empty()) throw std::invalid_argument("assignment matrix needs at least one qubit");
  for (double p : flips_) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("flip probability outside [0, 1]");
  }
}

Eigen::Matrix2d AssignmentMatrix::single(int k) const {
  const double p = flips_.at(static_cast<std::size_t>(k));
  Eigen::Matrix2d a;
  a << 1.0 - p, p, p, 1.0 - p;
  return a;
}

Eigen::Matrix2d AssignmentMatrix::single_inverse(int k) const {
  const double p = flips_.at(static_cast<std::size_t>(k));
  const double det = 1.0 - 2.0 * p;
  if (std::abs(det) < kMinReadoutContrast) {
    throw std::domain_error("ill-conditioned assignment matrix (p_k ~ 1/2)");
  }
  Eigen::Matrix2d inv;
  inv << 1.0 - p, -p, -p, 1.0 - p;
  return inv / det;
}

double AssignmentMatrix::element(Bits measured, Bits ideal) const {
  const int n = n_qubits();
  double v = 1.0;
  for (int k = 0; k < n; ++k) {
    const double p = flips_[static_cast<std::size_t>(k)];
    v *= bit_at(measured, n, k) == bit_at(ideal, n, k) ? 1.0 - p : p;
  }
  return v;
}

Eigen::MatrixXd AssignmentMatrix::dense() const {
  if (n_qubits() > kMaxDenseQubits) throw std::invalid_argument("dense size guard");
  const Bits dim = Bits{1} << n_qubits();
  Eigen::MatrixXd a(dim, dim);
  for (Bits i = 0; i < dim; ++i) {
    for (Bits j = 0; j < dim; ++j) a(i, j) = element(i, j);
  }
  return a;
}

double AssignmentMatrix::parity_attenuation(std::span<const int> positions) const {
  double a = 1.0;
  for (int k : positions) a *= 1.0 - 2.0 * flips_.at(static_cast<std::size_t>(k));
  return a;
}

AssignmentMatrix mem_build(
    const std::vector<std::pair<MeasurementSet, MeasurementSet>>& calibration) {
  if (calibration.empty()) throw std::invalid_argument("empty calibration");
  std::vector<double> flips;
  for (const auto& [prep0, prep1] : calibration) {
    if (prep0.empty() || prep1.empty()) throw std::invalid_argument("empty calibration set");
    if (prep0.n_qubits() != 1 || prep1.n_qubits() != 1) {
      throw std::invalid_argument("calibration sets must hold a single bit");
    }
    flips.push_back(0.5 * (prep0.frequency(1) + prep1.frequency(0)));
  }
  return AssignmentMatrix(std::move(flips));
}

std::vector<std::pair<MeasurementSet, MeasurementSet>> run_calibration(const NoiseModel& noise,
                                                                       int n_qubits,
                                                                       std::uint64_t shots,
                                                                       std::uint64_t seed) {
  std::vector<std::pair<MeasurementSet, MeasurementSet>> out;
  for (int k = 0; k < n_qubits; ++k) {
    NoiseModel single = noise;
    single.readout_flip = {noise.flip(k)};
    Circuit zero(1);
    Circuit one(1);
    one.x(0);
    const std::string tag = "calibration|" + std::to_string(k);
    out.emplace_back(run_density(zero, single, PauliString(1), shots, derive_seed(seed, tag + "|0")),
                     run_density(one, single, PauliString(1), shots, derive_seed(seed, tag + "|1")));
  }
  return out;
}

QuasiDistribution mem_apply(const AssignmentMatrix& a, const QuasiDistribution& d) {
  if (a.n_qubits() != d.n_bits) throw std::invalid_argument("assignment matrix width mismatch");
  const int n = d.n_bits;
  std::map<Bits, double> cur = d.weights;
  for (int k = 0; k < n; ++k) {
    const Eigen::Matrix2d inv = a.single_inverse(k);
    if (a.flips()[static_cast<std::size_t>(k)] == 0.0) continue;
    const Bits mask = Bits{1} << (n - 1 - k);
    std::map<Bits, double> next;
    for (const auto& [x, w] : cur) {
      const int xk = (x & mask) ? 1 : 0;
      next[x & ~mask] += inv(0, xk) * w;
      next[x | mask] += inv(1, xk) * w;
    }
    cur = std::move(next);
  }
  QuasiDistribution out;
  out.n_bits = n;
  out.shots = d.shots;
  out.weights = std::move(cur);
  return out;
}

QuasiDistribution mem_apply(const AssignmentMatrix& a, const MeasurementSet& m) {
  return mem_apply(a, QuasiDistribution::from(m));
}

std::vector<double> mem_apply(const AssignmentMatrix& a, const std::vector<double>& probs) {
  const int n = a.n_qubits();
  if (probs.size() != (std::size_t{1} << n)) throw std::invalid_argument("distribution size mismatch");
  std::vector<double> out = probs;
  for (int k = 0; k < n; ++k) {
    const Eigen::Matrix2d inv = a.single_inverse(k);
    const std::size_t b = std::size_t{1} << (n - 1 - k);
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j & b) continue;
      const double x0 = out[j], x1 = out[j | b];
      out[j] = inv(0, 0) * x0 + inv(0, 1) * x1;
      out[j | b] = inv(1, 0) * x0 + inv(1, 1) * x1;
    }
  }
  return out;
}

double mem_quasi_probability(const AssignmentMatrix& a, const MeasurementSet& m, Bits target) {
  const int n = m.n_qubits();
  if (a.n_qubits() != n) throw std::invalid_argument("assignment matrix width mismatch");
  if (m.empty()) throw std::invalid_argument("empty measurement set");
  std::vector<Eigen::Matrix2d> inv;
  for (int k = 0; k < n; ++k) inv.push_back(a.single_inverse(k));
  double q = 0.0;
  for (const auto& [x, c] : m.counts()) {
    double w = static_cast<double>(c) / static_cast<double>(m.shots());
    for (int k = 0; k < n && w != 0.0; ++k) {
      w *= inv[static_cast<std::size_t>(k)](bit_at(target, n, k), bit_at(x, n, k));
    }
    q += w;
  }
  return q;
}

SymmetryConstraint::SymmetryConstraint(std::vector<Operator> ops,
                                       const std::optional<PauliSum>& hamiltonian)
    : ops_(std::move(ops)) {
  if (ops_.empty()) throw std::invalid_argument("symmetry constraint needs an operator");
  n_ = ops_.front().op.n_qubits();
  for (const auto& o : ops_) {
    if (o.op.n_qubits() != n_) throw std::invalid_argument("symmetry operator width mismatch");
    if (!o.op.is_diagonal()) throw std::invalid_argument(o.name + " is not diagonal");
    if (o.allowed.empty()) throw std::invalid_argument(o.name + " has no allowed eigenvalue");
    if (hamiltonian) {
      if (hamiltonian->n_qubits() != n_) throw std::invalid_argument("Hamiltonian width mismatch");
      if (!commutes_with_sum(o.op, *hamiltonian)) {
        throw std::invalid_argument(o.name + " does not commute with the Hamiltonian");
      }
    }
  }
}

bool SymmetryConstraint::allows(Bits b) const {
  for (const auto& o : ops_) {
    const double v = o.op.diagonal_value(b);
    const bool ok = std::any_of(o.allowed.begin(), o.allowed.end(),
                                [v](double a) { return std::abs(a - v) < 1e-9; });
    if (!ok) return false;
  }
  return true;
}

std::vector<Bits> SymmetryConstraint::allowed_states() const {
  if (n_ > 24) throw std::invalid_argument("too many qubits to enumerate");
  std::vector<Bits> out;
  for (Bits b = 0; b < (Bits{1} << n_); ++b) {
    if (allows(b)) out.push_back(b);
  }
  return out;
}

SymmetryConstraint SymmetryConstraint::hcl(const std::optional<PauliSum>& hamiltonian) {
  const auto j = read_json_file(data_file("hcl_3q_symmetries.json"));
  const int n = j.at("n_qubits").get<int>();
  std::vector<Operator> ops;
  for (const auto& o : j.at("operators")) {
    ops.push_back({o.at("name").get<std::string>(),
                   pauli_sum_from_json({{"n_qubits", n}, {"terms", o.at("terms")}}),
                   o.at("allowed").get<std::vector<double>>()});
  }
  return SymmetryConstraint(std::move(ops), hamiltonian);
}

MeasurementSet sv_filter(const MeasurementSet& m, const SymmetryConstraint& c) {
  if (m.n_qubits() != c.n_qubits()) throw std::invalid_argument("symmetry width mismatch");
  MeasurementSet out(m.n_qubits());
  for (const auto& [b, k] : m.counts()) {
    if (c.allows(b)) out.add(b, k);
  }
  if (out.empty()) throw EmptyPostSelection("no outcome satisfies the symmetry constraint");
  return out;
}

QuasiDistribution sv_filter(const QuasiDistribution& d, const SymmetryConstraint& c) {
  if (d.n_bits != c.n_qubits()) throw std::invalid_argument("symmetry width mismatch");
  QuasiDistribution out;
  out.n_bits = d.n_bits;
  const double total = d.mass();
  double kept = 0.0;
  for (const auto& [b, w] : d.weights) {
    if (!c.allows(b)) continue;
    out.weights[b] = w;
    kept += w;
  }
  if (out.weights.empty() || kept <= 0.0) {
    throw EmptyPostSelection("no outcome satisfies the symmetry constraint");
  }
  for (auto& [b, w] : out.weights) w /= kept;
  out.shots = d.shots * kept / total;
  return out;
}

std::string_view fit_method_name(FitMethod m) { return m == FitMethod::WLS ? "WLS" : "OLS"; }

ZneFit zne_fit(const std::vector<ZnePoint>& points, FitMethod method) {
  if (points.size() < 2) throw std::invalid_argument("extrapolation needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].lambda < 1) throw std::invalid_argument("noise factors must be >= 1");
    for (std::size_t j = 0; j < i; ++j) {
      if (points[j].lambda == points[i].lambda) throw std::invalid_argument("duplicate noise factor");
    }
  }
  const std::size_t n = points.size();
  std::vector<double> w(n, 1.0);
  if (method == FitMethod::WLS) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = points[i].variance;
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("WLS needs positive finite variances");
      w[i] = 1.0 / v;
    }
  }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = points[i].lambda, y = points[i].estimate;
    sw += w[i];
    sx += w[i] * x;
    sy += w[i] * y;
    sxx += w[i] * x * x;
    sxy += w[i] * x * y;
  }
  const double det = sw * sxx - sx * sx;
  if (!(std::abs(det) > 1e-12 * sw * sxx)) throw std::invalid_argument("degenerate design");
  ZneFit f;
  f.method = method;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;

  const double ybar = sy / sw;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = points[i].estimate - f.at(points[i].lambda);
    ss_res += w[i] * r * r;
    ss_tot += w[i] * (points[i].estimate - ybar) * (points[i].estimate - ybar);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  // E0 = sum c_i y_i.
  double var = 0.0;
  bool any_variance = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = w[i] * (sxx - sx * points[i].lambda) / det;
    var += c * c * points[i].variance;
    any_variance |= points[i].variance > 0.0;
  }
  if (!any_variance) {
    const double sigma2 = n > 2 ? ss_res / static_cast<double>(n - 2) : 0.0;
    var = sigma2 * sxx / det;
  }
  f.stderr_intercept = std::sqrt(var);
  return f;
}

AncillaReadout ancilla_readout(const QuasiDistribution& d) {
  if (d.n_bits < 2) throw std::invalid_argument("DSP data needs system bits and an ancilla");
  double w0 = 0.0, w1 = 0.0;
  for (const auto& [b, w] : d.weights) {
    if ((b >> 1) != 0) continue;
    (b & 1U ? w1 : w0) += w;
  }
  const double retained = w0 + w1;
  if (!(retained > 0.0)) throw EmptyPostSelection("no shot survived DSP post-selection");
  AncillaReadout r;
  r.expectation = (w0 - w1) / retained;
  r.retention = retained / d.mass();
  r.retained_shots = d.shots * r.retention;
  return r;
}

double dsp_combine(double ex, double ez) {
  if (1.0 + ex < kDivergenceEpsilon) throw std::domain_error("DSP estimator diverges (1 + E^X ~ 0)");
  return ez / (1.0 + ex);
}

double dsp_z_only(double ez) {
  const double z = std::clamp(ez, -1.0, 1.0);
  return z / (1.0 + std::sqrt(1.0 - z * z));
}

XOnlyEstimate dsp_x_only(double ex) {
  const double x = std::clamp(ex, -1.0, 1.0);
  if (1.0 + x < kDivergenceEpsilon) throw std::domain_error("X-only estimator diverges");
  return {std::sqrt((1.0 - x) / (1.0 + x)), false};
}

namespace {

double binomial_variance(double v, double shots) {
  return shots > 0.0 ? std::max(1.0 - v * v, 0.0) / shots : 0.0;
}

// Combined DSP estimate from ancilla readouts; variances are divided by
// `att2`, the squared readout attenuation undone by MEM.
DspEstimate combine_readouts(const AncillaReadout& rx, const AncillaReadout& rz, double att2) {
  DspEstimate e;
  e.ex = rx.expectation;
  e.ez = rz.expectation;
  e.retention = 0.5 * (rx.retention + rz.retention);
  const double vx = binomial_variance(e.ex * std::sqrt(att2), rx.retained_shots) / att2;
  const double vz = binomial_variance(e.ez * std::sqrt(att2), rz.retained_shots) / att2;
  if (1.0 + e.ex < kDivergenceEpsilon) {
    e.diverged = true;
    e.value = dsp_z_only(e.ez);
    const double s = std::sqrt(std::max(1.0 - e.ez * e.ez, 1e-12));
    const double d = 1.0 / (s * (1.0 + s));
    e.variance = d * d * vz;
    return e;
  }
  e.value = dsp_combine(e.ex, e.ez);
  const double dz = 1.0 / (1.0 + e.ex);
  const double dx = -e.ez / ((1.0 + e.ex) * (1.0 + e.ex));
  e.variance = dz * dz * vz + dx * dx * vx;
  return e;
}

}  // namespace

DspEstimate dsp_estimate(const QuasiDistribution& dx, const QuasiDistribution& dz) {
  return combine_readouts(ancilla_readout(dx), ancilla_readout(dz), 1.0);
}

DspEstimate dsp_estimate(const MeasurementSet& mx, const MeasurementSet& mz) {
  return dsp_estimate(QuasiDistribution::from(mx), QuasiDistribution::from(mz));
}

double dsp_estimate_z_only(const MeasurementSet& mz) {
  return dsp_z_only(ancilla_readout(QuasiDistribution::from(mz)).expectation);
}

XOnlyEstimate dsp_estimate_x_only(const MeasurementSet& mx) {
  return dsp_x_only(ancilla_readout(QuasiDistribution::from(mx)).expectation);
}

PurifiedEstimate tomography_purify(const AncillaTomogram& t, double z_threshold,
                                   double x_tolerance) {
  PurifiedEstimate out;
  auto unpurified = [&]() {
    return 1.0 + t.gx < kDivergenceEpsilon ? dsp_z_only(t.gz) : dsp_combine(t.gx, t.gz);
  };
  const double norm = std::sqrt(t.gx * t.gx + t.gy * t.gy + t.gz * t.gz);
  if (norm < 1e-12) {
    out.degenerate = true;
    out.value = unpurified();
    return out;
  }
  if (std::abs(t.gz) < z_threshold) {
    out.value = unpurified();
    return out;
  }
  // Eigenvectors of (I + g.sigma)/2 are the Bloch directions +-g/|g|; +g/|g| dominates.
  double nx = t.gx / norm;
  double nz = t.gz / norm;
  if (nx < 0.0 && (nx >= -x_tolerance || -nx <= std::abs(nz))) {
    const double ny = t.gy / norm;
    nx = 0.0;
    nz = std::copysign(std::sqrt(1.0 - ny * ny), nz);
  } else if (nx < 0.0) {
    nx = -nx;
    nz = -nz;
    out.minority_selected = true;
  }
  out.value = nz / (1.0 + nx);
  out.purified = true;
  return out;
}

std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::MEM: return "MEM";
    case Technique::SV: return "SV";
    case Technique::DSP: return "DSP";
    case Technique::TP: return "TP";
    case Technique::ZNE: return "ZNE";
  }
  return "?";
}

std::optional<std::string> Strategy::incompatibility(const std::vector<Technique>& ts) {
  auto has = [&](Technique t) { return std::find(ts.begin(), ts.end(), t) != ts.end(); };
  if (has(Technique::SV) && has(Technique::DSP)) {
    return "SV and DSP are incompatible: DSP post-selects the system register on all zeros";
  }
  if (has(Technique::TP) && !has(Technique::DSP)) {
    return "TP acts on the DSP ancilla and needs DSP";
  }
  return std::nullopt;
}

Strategy Strategy::parse(std::string_view spec) {
  std::string s(spec);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  std::vector<Technique> found;
  bool raw = false;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('+', start);
    if (end == std::string::npos) end = s.size();
    std::string tok = s.substr(start, end - start);
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    start = end + 1;
    if (tok.empty()) {
      if (s.find_first_not_of(" \t") == std::string::npos) break;
      throw std::invalid_argument("empty technique name in '" + std::string(spec) + "'");
    }
    if (tok == "RAW") {
      raw = true;
      continue;
    }
    std::optional<Technique> t;
    for (Technique c : {Technique::MEM, Technique::SV, Technique::DSP, Technique::TP, Technique::ZNE}) {
      if (tok == technique_name(c)) t = c;
    }
    if (!t) throw std::invalid_argument("unknown technique '" + tok + "'");
    if (std::find(found.begin(), found.end(), *t) != found.end()) {
      throw std::invalid_argument("technique '" + tok + "' listed twice");
    }
    found.push_back(*t);
  }
  if (raw && !found.empty()) throw std::invalid_argument("RAW cannot be combined with techniques");
  if (auto why = incompatibility(found)) throw std::invalid_argument(*why);
  std::sort(found.begin(), found.end());
  Strategy out;
  out.techniques_ = std::move(found);
  return out;
}

bool Strategy::has(Technique t) const {
  return std::find(techniques_.begin(), techniques_.end(), t) != techniques_.end();
}

std::string Strategy::name() const {
  if (techniques_.empty()) return "RAW";
  std::string s;
  for (Technique t : techniques_) {
    if (!s.empty()) s += '+';
    s += technique_name(t);
  }
  return s;
}

const std::vector<std::string>& benchmark_strategy_names() {
  static const std::vector<std::string> names{
      "RAW",        "MEM+SV+ZNE",     "DSP+TP",          "MEM+DSP+TP",
      "MEM+ZNE",    "MEM+SV",         "SV+ZNE",          "MEM",
      "SV",         "MEM+DSP+TP+ZNE", "DSP+TP+ZNE",      "ZNE",
      "MEM+DSP+ZNE", "MEM+DSP",       "DSP+ZNE",         "DSP"};
  return names;
}

PreparedCircuit prepare_circuit(const Strategy& s, const Circuit& ansatz, const ShotKey& key,
                                const StrategyOptions& options, const NoiseModel& noise) {
  const int n = ansatz.n_qubits();
  if (key.term.n_qubits() != n) throw std::invalid_argument("term width mismatch");
  PreparedCircuit out;
  if (!s.has(Technique::DSP)) {
    out.circuit = ansatz;
    out.basis = key.term;
  } else {
    out.circuit = build_dsp_circuit(ansatz, key.term, options.coupling).circuit;
    if (!noise.is_noiseless() || s.has(Technique::ZNE)) out.circuit = decompose_swaps(out.circuit);
    out.basis = PauliString(n + 1);
    if (key.basis != 'Z') out.basis.set_op(n, key.basis);
  }
  if (s.has(Technique::ZNE)) out.circuit = amplify_noise(out.circuit, key.lambda);
  return out;
}

std::map<PauliString, double> preliminary_estimates(const PauliSum& h, const Circuit& ansatz,
                                                    const NoiseModel& noise,
                                                    const std::map<PauliString, std::uint64_t>& shots,
                                                    std::uint64_t seed) {
  std::map<PauliString, double> out;
  for (const auto& t : h.non_identity_terms()) {
    auto it = shots.find(t.string);
    const std::uint64_t k = it == shots.end() ? 0 : it->second;
    if (k == 0) {
      out[t.string] = 0.0;
      continue;
    }
    const auto m = run_density(ansatz, noise, t.string, k, derive_seed(seed, "prelim|" + t.string.str()));
    // Laplace-smoothed: a handful of identical outcomes must not pin v_P to 0.
    const double k_shots = static_cast<double>(k);
    out[t.string] = raw_estimate(m, t.string).value * k_shots / (k_shots + 2.0);
  }
  return out;
}

PlanMode plan_mode(const Strategy& s, const StrategyOptions& options) {
  PlanMode m;
  m.dsp = s.has(Technique::DSP);
  m.tp = s.has(Technique::TP);
  if (s.has(Technique::ZNE)) m.lambdas = options.lambdas;
  return m;
}

ShotPlan make_shot_plan(const Strategy& s, const PauliSum& h, const Circuit& ansatz,
                        const NoiseModel& noise, std::uint64_t budget, double prelim_fraction,
                        std::uint64_t seed, const StrategyOptions& options) {
  const auto prelim_shots = preliminary_split(h, budget, prelim_fraction);
  const auto prelim = preliminary_estimates(h, ansatz, noise, prelim_shots, seed);
  return plan_shots(h, prelim, budget, prelim_fraction, plan_mode(s, options));
}

StrategyData acquire_data(const Strategy& s, const PauliSum& h, const Circuit& ansatz,
                          const NoiseModel& noise, const ShotPlan& plan, std::uint64_t seed,
                          const StrategyOptions& options) {
  if (ansatz.n_qubits() != h.n_qubits()) throw std::invalid_argument("ansatz width mismatch");
  StrategyData data;
  data.strategy = s;
  data.plan = plan;
  const int width = h.n_qubits() + (s.has(Technique::DSP) ? 1 : 0);
  for (const auto& [key, shots] : plan.allocations) {
    const auto prepared = prepare_circuit(s, ansatz, key, options, noise);
    if (shots == 0) {
      data.sets.emplace(key, MeasurementSet(width));
      continue;
    }
    data.sets.emplace(key, run_density(prepared.circuit, noise, prepared.basis, shots,
                                       derive_seed(seed, key.str())));
  }
  if (s.has(Technique::DSP)) {
    for (const auto& t : h.non_identity_terms()) {
      data.dsp_circuits.emplace(t.string, build_dsp_circuit(ansatz, t.string, options.coupling));
    }
  }
  if (s.has(Technique::MEM)) {
    data.readout = mem_build(run_calibration(noise, width, options.calibration_shots,
                                             derive_seed(seed, "calibration")));
  }
  return data;
}

namespace {

struct TermOutcome {
  double value = 0.0;
  double variance = 0.0;
  double retention = 1.0;
  bool purified = false;
  bool diverged = false;
};

TermOutcome estimate_plain_term(const StrategyData& data, const PauliString& term, int lambda,
                                const std::optional<SymmetryConstraint>& symmetry) {
  const auto& m = data.sets.at({term, lambda, 'P'});
  auto d = QuasiDistribution::from(m);
  const auto support = term.support();
  double att = 1.0;
  if (data.readout) {
    d = mem_apply(*data.readout, d);
    att = data.readout->parity_attenuation(support);
  }
  TermOutcome out;
  if (symmetry && term.is_diagonal()) {
    d = sv_filter(d, *symmetry);
    out.retention = d.shots / static_cast<double>(m.shots());
  }
  out.value = parity_expectation(d, support);
  out.variance = binomial_variance(out.value * att, d.shots) / (att * att);
  return out;
}

TermOutcome estimate_dsp_term(const StrategyData& data, const PauliString& term, int lambda,
                              bool tp, double tp_threshold) {
  auto readout = [&](char basis) {
    auto d = QuasiDistribution::from(data.sets.at({term, lambda, basis}));
    if (data.readout) d = mem_apply(*data.readout, d);
    return ancilla_readout(d);
  };
  double att2 = 1.0;
  if (data.readout) {
    const int anc = data.readout->n_qubits() - 1;
    const std::array<int, 1> pos{anc};
    att2 = std::pow(data.readout->parity_attenuation(pos), 2);
  }
  const auto rx = readout('X');
  const auto rz = readout('Z');
  TermOutcome out;
  if (!tp) {
    const auto e = combine_readouts(rx, rz, att2);
    out.value = e.value;
    out.variance = e.variance;
    out.retention = e.retention;
    out.diverged = e.diverged;
    return out;
  }
  const auto ry = readout('Y');
  const AncillaTomogram t{rx.expectation, ry.expectation, rz.expectation};
  // Three standard errors of n_x = gx / |g|.
  const double g_norm = std::max(std::hypot(t.gx, t.gy, t.gz), 1e-12);
  const double x_tol = std::max(tp_threshold, 3.0 / (std::sqrt(rx.retained_shots) * g_norm));
  const auto p = tomography_purify(t, tp_threshold, x_tol);
  out.value = p.value;
  out.purified = p.purified;
  out.retention = (rx.retention + ry.retention + rz.retention) / 3.0;
  // Delta method with central differences.
  const std::array<double, 3> g{t.gx, t.gy, t.gz};
  const std::array<double, 3> shots{rx.retained_shots, ry.retained_shots, rz.retained_shots};
  const double step = 1e-6;
  for (int i = 0; i < 3; ++i) {
    auto gp = g, gm = g;
    gp[static_cast<std::size_t>(i)] += step;
    gm[static_cast<std::size_t>(i)] -= step;
    const double fp = tomography_purify({gp[0], gp[1], gp[2]}, tp_threshold, x_tol).value;
    const double fm = tomography_purify({gm[0], gm[1], gm[2]}, tp_threshold, x_tol).value;
    const double deriv = (fp - fm) / (2 * step);
    const double gi = g[static_cast<std::size_t>(i)];
    out.variance += deriv * deriv *
                    binomial_variance(gi * std::sqrt(att2), shots[static_cast<std::size_t>(i)]) / att2;
  }
  return out;
}

}  // namespace

EstimatorResult estimate_from_data(const StrategyData& data, const PauliSum& h,
                                   const StrategyOptions& options) {
  const Strategy& s = data.strategy;
  std::optional<SymmetryConstraint> symmetry;
  if (s.has(Technique::SV)) symmetry = options.symmetry ? *options.symmetry : SymmetryConstraint::hcl();

  EstimatorResult r;
  r.strategy = s.name();
  r.shots = data.plan.total();
  double retention_sum = 0.0;
  for (int lambda : data.plan.mode.lambdas) {
    std::map<PauliString, Estimate> per_term;
    for (const auto& t : h.non_identity_terms()) {
      const TermOutcome o =
          s.has(Technique::DSP)
              ? estimate_dsp_term(data, t.string, lambda, s.has(Technique::TP), options.tp_threshold)
              : estimate_plain_term(data, t.string, lambda, symmetry);
      per_term[t.string] = {o.value, o.variance};
      std::uint64_t shots = 0;
      for (char b : data.plan.mode.bases()) shots += data.plan.allocations.at({t.string, lambda, b});
      r.terms.push_back({t.string, t.coeff, lambda, o.value, o.variance, shots, o.retention,
                         o.purified, o.diverged});
      retention_sum += o.retention;
    }
    const Estimate e = energy_estimate(per_term, h);
    r.zne_points.push_back({lambda, e.value, e.variance});
  }
  r.mean_retention = retention_sum / static_cast<double>(r.terms.size());
  if (s.has(Technique::ZNE)) {
    const bool weights_ok = std::all_of(r.zne_points.begin(), r.zne_points.end(),
                                        [](const ZnePoint& p) { return p.variance > 0.0; });
    r.zne = zne_fit(r.zne_points, weights_ok ? options.fit : FitMethod::OLS);
    r.energy = r.zne->intercept;
    r.variance = r.zne->stderr_intercept * r.zne->stderr_intercept;
  } else {
    r.energy = r.zne_points.front().estimate;
    r.variance = r.zne_points.front().variance;
    r.zne_points.clear();
  }
  return r;
}

EstimatorResult run_strategy(const Strategy& s, const PauliSum& h, std::span<const double> params,
                             const NoiseModel& noise, const ShotPlan& plan, std::uint64_t seed,
                             const StrategyOptions& options) {
  const Circuit ansatz = build_ansatz(params, options.ansatz_form);
  return estimate_from_data(acquire_data(s, h, ansatz, noise, plan, seed, options), h, options);
}

EstimatorResult run_strategy(const Strategy& s, const PauliSum& h, std::span<const double> params,
                             const NoiseModel& noise, std::uint64_t budget, double prelim_fraction,
                             std::uint64_t seed, const StrategyOptions& options) {
  const Circuit ansatz = build_ansatz(params, options.ansatz_form);
  const ShotPlan plan = make_shot_plan(s, h, ansatz, noise, budget, prelim_fraction,
                                       derive_seed(seed, "plan"), options);
  return estimate_from_data(acquire_data(s, h, ansatz, noise, plan, seed, options), h, options);
}

std::optional<double> error_suppression(double bias, double raw_bias) {
  if (raw_bias == 0.0) return std::nullopt;
  return (1.0 - std::abs(bias / raw_bias)) * 100.0;
}

Metrics metrics(double estimate, double variance, double truth, std::optional<double> raw_bias) {
  Metrics m;
  m.bias = estimate - truth;
  m.variance = variance;
  m.mse = variance + m.bias * m.bias;
  if (raw_bias) m.suppression = error_suppression(m.bias, *raw_bias);
  return m;
}

Metrics metrics(const EstimatorResult& r, double truth, std::optional<double> raw_bias) {
  return metrics(r.energy, r.variance, truth, raw_bias);
}

nlohmann::json to_json(const ZneFit& f) {
  return {{"method", std::string(fit_method_name(f.method))},
          {"intercept", f.intercept},
          {"slope", f.slope},
          {"r_squared", f.r_squared},
          {"stderr_intercept", f.stderr_intercept}};
}

nlohmann::json to_json(const EstimatorResult& r) {
  nlohmann::json j = {{"strategy", r.strategy},
                      {"energy", r.energy},
                      {"variance", r.variance},
                      {"sigma", std::sqrt(r.variance)},
                      {"shots", r.shots},
                      {"mean_retention", r.mean_retention}};
  if (r.zne) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.zne_points) {
      pts.push_back({{"lambda", p.lambda}, {"estimate", p.estimate}, {"variance", p.variance}});
    }
    j["zne"] = {{"points", pts}, {"fit", to_json(*r.zne)}};
  }
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : r.terms) {
    terms.push_back({{"term", t.term.str()},
                     {"coeff", t.coeff},
                     {"lambda", t.lambda},
                     {"value", t.value},
                     {"variance", t.variance},
                     {"shots", t.shots},
                     {"retention", t.retention},
                     {"purified", t.purified},
                     {"diverged", t.diverged}});
  }
  j["terms"] = terms;
  return j;
}

}  // namespace qemlab
