#include "quadent/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "quadent/entropy.hpp"

namespace quadent {

namespace {

long long ipow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<int> occupations_of(long long index, int n_modes, int cutoff) {
  std::vector<int> occ(static_cast<size_t>(n_modes));
  for (int m = n_modes - 1; m >= 0; --m) {
    occ[static_cast<size_t>(m)] = static_cast<int>(index % cutoff);
    index /= cutoff;
  }
  return occ;
}

long long index_of(const std::vector<int>& occ, int cutoff) {
  long long idx = 0;
  for (int n : occ) {
    if (n < 0 || n >= cutoff) throw Error(ErrorCode::InvalidArgument, "occupation outside the cutoff");
    idx = idx * cutoff + n;
  }
  return idx;
}

CMatrix annihilation(int cutoff) {
  CMatrix a = CMatrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

std::pair<CMatrix, CMatrix> single_mode_quadratures(int cutoff) {
  const CMatrix a = annihilation(cutoff);
  const CMatrix ad = a.adjoint();
  const double r2 = std::sqrt(2.0);
  CMatrix q = (a + ad) / r2;
  CMatrix p = (a - ad) / Complex(0.0, r2);
  return {std::move(q), std::move(p)};
}

// kron over modes; null entries stand for the identity.
CMatrix kron_modes(const std::vector<const CMatrix*>& per_mode, int cutoff) {
  CMatrix out = CMatrix::Identity(1, 1);
  const CMatrix id = CMatrix::Identity(cutoff, cutoff);
  for (const CMatrix* op : per_mode) {
    CMatrix next = Eigen::kroneckerProduct(out, op ? *op : id);
    out = std::move(next);
  }
  return out;
}

// (outer, cutoff, inner) view of v with `op` acting on the middle index.
CVector apply_mode(const CMatrix& op, int mode, int n_modes, int cutoff, const CVector& v) {
  const long long inner = ipow(cutoff, n_modes - 1 - mode);
  const long long outer = ipow(cutoff, mode);
  CVector out = CVector::Zero(v.size());
  for (long long o = 0; o < outer; ++o) {
    for (long long in = 0; in < inner; ++in) {
      const long long base = o * cutoff * inner + in;
      for (int r = 0; r < cutoff; ++r) {
        Complex acc = 0.0;
        for (int c = 0; c < cutoff; ++c) {
          const Complex w = op(r, c);
          if (w != Complex(0.0)) acc += w * v(base + c * inner);
        }
        out(base + r * inner) = acc;
      }
    }
  }
  return out;
}

CVector pad_cutoff(const FockState& psi, int new_cutoff) {
  const int n = psi.modes();
  CVector out = CVector::Zero(ipow(new_cutoff, n));
  for (long long i = 0; i < psi.amplitudes().size(); ++i) {
    out(index_of(occupations_of(i, n, psi.cutoff()), new_cutoff)) = psi.amplitudes()(i);
  }
  return out;
}

}  // namespace

void FockConfig::validate() const {
  if (n_modes < 1 || n_modes > 3) throw Error(ErrorCode::InvalidArgument, "Fock oracle supports 1 to 3 modes");
  if (cutoff < 4) throw Error(ErrorCode::InvalidArgument, "cutoff must be at least 4");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(leak_ceiling > 0.0)) throw Error(ErrorCode::InvalidArgument, "leak ceiling must be positive");
  if (dimension() > max_dimension) {
    std::ostringstream os;
    os << "total dimension " << dimension() << " exceeds the configured bound " << max_dimension;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

long long FockConfig::dimension() const { return ipow(cutoff, n_modes); }

FockState::FockState(int n_modes, int cutoff, CVector amplitudes)
    : n_modes_(n_modes), cutoff_(cutoff), amp_(std::move(amplitudes)) {
  if (n_modes_ < 1 || cutoff_ < 2) throw Error(ErrorCode::InvalidArgument, "bad Fock state shape");
  if (amp_.size() != ipow(cutoff_, n_modes_)) throw Error(ErrorCode::DimensionMismatch, "amplitude count");
}

FockState FockState::vacuum(int n_modes, int cutoff) {
  return basis(cutoff, std::vector<int>(static_cast<size_t>(n_modes), 0));
}

FockState FockState::basis(int cutoff, const std::vector<int>& occupations) {
  const int n = static_cast<int>(occupations.size());
  CVector amp = CVector::Zero(ipow(cutoff, n));
  amp(index_of(occupations, cutoff)) = 1.0;
  return FockState(n, cutoff, std::move(amp));
}

FockState FockState::coherent(int cutoff, const std::vector<Complex>& alphas) {
  const int n = static_cast<int>(alphas.size());
  std::vector<CVector> factors;
  for (const Complex& alpha : alphas) {
    CVector c(cutoff);
    Complex term = std::exp(-0.5 * std::norm(alpha));
    for (int k = 0; k < cutoff; ++k) {
      c(k) = term;
      term *= alpha / std::sqrt(static_cast<double>(k + 1));
    }
    factors.push_back(c);
  }
  CVector amp(ipow(cutoff, n));
  for (long long i = 0; i < amp.size(); ++i) {
    const auto occ = occupations_of(i, n, cutoff);
    Complex v = 1.0;
    for (int m = 0; m < n; ++m) v *= factors[static_cast<size_t>(m)](occ[static_cast<size_t>(m)]);
    amp(i) = v;
  }
  amp /= amp.norm();
  return FockState(n, cutoff, std::move(amp));
}

FockState FockState::cat(int n_modes, int cutoff, int mode, Complex alpha) {
  if (mode < 0 || mode >= n_modes) throw Error(ErrorCode::InvalidArgument, "cat mode out of range");
  std::vector<Complex> plus(static_cast<size_t>(n_modes), 0.0), minus(static_cast<size_t>(n_modes), 0.0);
  plus[static_cast<size_t>(mode)] = alpha;
  minus[static_cast<size_t>(mode)] = -alpha;
  CVector amp = coherent(cutoff, plus).amplitudes() + coherent(cutoff, minus).amplitudes();
  const double nrm = amp.norm();
  if (!(nrm > 0.0)) throw Error(ErrorCode::InvalidArgument, "degenerate cat state");
  amp /= nrm;
  return FockState(n_modes, cutoff, std::move(amp));
}

FockState FockState::superposition(int cutoff, const std::vector<std::pair<std::vector<int>, Complex>>& terms) {
  if (terms.empty()) throw Error(ErrorCode::InvalidArgument, "empty superposition");
  const int n = static_cast<int>(terms.front().first.size());
  CVector amp = CVector::Zero(ipow(cutoff, n));
  for (const auto& [occ, c] : terms) {
    if (static_cast<int>(occ.size()) != n) throw Error(ErrorCode::DimensionMismatch, "mixed mode counts");
    amp(index_of(occ, cutoff)) += c;
  }
  const double nrm = amp.norm();
  if (!(nrm > 0.0)) throw Error(ErrorCode::InvalidArgument, "superposition has zero norm");
  amp /= nrm;
  return FockState(n, cutoff, std::move(amp));
}

double FockState::leak() const {
  std::vector<double> top(static_cast<size_t>(n_modes_), 0.0);
  for (long long i = 0; i < amp_.size(); ++i) {
    const double p = std::norm(amp_(i));
    if (p == 0.0) continue;
    const auto occ = occupations_of(i, n_modes_, cutoff_);
    for (int m = 0; m < n_modes_; ++m) {
      if (occ[static_cast<size_t>(m)] >= cutoff_ - 2) top[static_cast<size_t>(m)] += p;
    }
  }
  return *std::max_element(top.begin(), top.end()) / amp_.squaredNorm();
}

Quadratures build_quadratures(const FockConfig& cfg) {
  cfg.validate();
  auto [q, p] = single_mode_quadratures(cfg.cutoff);
  Quadratures out;
  out.single = {q, p};
  for (int m = 0; m < cfg.n_modes; ++m) {
    for (const CMatrix* op : {&q, &p}) {
      std::vector<const CMatrix*> per_mode(static_cast<size_t>(cfg.n_modes), nullptr);
      per_mode[static_cast<size_t>(m)] = op;
      out.ops.push_back(kron_modes(per_mode, cfg.cutoff));
    }
  }
  return out;
}

CMatrix build_hamiltonian(const QuadraticHamiltonian& hamiltonian, double t, const FockConfig& cfg) {
  cfg.validate();
  if (hamiltonian.modes() != cfg.n_modes) throw Error(ErrorCode::DimensionMismatch, "Hamiltonian vs Fock modes");
  const Matrix h = hamiltonian.h(t);
  if (max_abs(h - h.transpose()) > 1e-12 * (1.0 + max_abs(h))) {
    throw Error(ErrorCode::NonSymmetricH, "h(t) is not symmetric");
  }
  const auto [q, p] = single_mode_quadratures(cfg.cutoff);
  const CMatrix* single[2] = {&q, &p};
  const int dim2 = 2 * cfg.n_modes;
  const long long d = cfg.dimension();
  CMatrix out = CMatrix::Zero(d, d);
  for (int a = 0; a < dim2; ++a) {
    for (int b = 0; b < dim2; ++b) {
      const double w = h(a, b);
      if (w == 0.0) continue;
      const int ma = a / 2, mb = b / 2;
      std::vector<const CMatrix*> per_mode(static_cast<size_t>(cfg.n_modes), nullptr);
      CMatrix same;
      if (ma == mb) {
        same = *single[a % 2] * *single[b % 2];
        per_mode[static_cast<size_t>(ma)] = &same;
      } else {
        per_mode[static_cast<size_t>(ma)] = single[a % 2];
        per_mode[static_cast<size_t>(mb)] = single[b % 2];
      }
      out += (0.5 * w) * kron_modes(per_mode, cfg.cutoff);
    }
  }
  if (hamiltonian.has_linear_term()) {
    const Vector f = hamiltonian.f(t);
    for (int a = 0; a < dim2; ++a) {
      if (f(a) == 0.0) continue;
      std::vector<const CMatrix*> per_mode(static_cast<size_t>(cfg.n_modes), nullptr);
      per_mode[static_cast<size_t>(a / 2)] = single[a % 2];
      out += f(a) * kron_modes(per_mode, cfg.cutoff);
    }
  }
  const double asym = (out - out.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + out.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "Hamiltonian matrix not Hermitian (defect " << asym << ")";
    throw Error(ErrorCode::NonHermitian, os.str());
  }
  return 0.5 * (out + out.adjoint());
}

namespace {

CMatrix step_unitary(const CMatrix& ham, double h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ham);
  CVector phase(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::exp(Complex(0.0, -h * es.eigenvalues()(i)));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

FockTrajectory evolve_fock(const FockState& psi0, const QuadraticHamiltonian& hamiltonian, double t_final,
                           const FockConfig& cfg, int samples) {
  cfg.validate();
  if (psi0.modes() != cfg.n_modes || psi0.cutoff() != cfg.cutoff) {
    throw Error(ErrorCode::DimensionMismatch, "initial state does not match the Fock config");
  }
  if (!(t_final > 0.0) || samples < 1) throw Error(ErrorCode::InvalidArgument, "t_final and samples must be positive");
  if (std::abs(psi0.norm() - 1.0) > 1e-8) throw Error(ErrorCode::InvalidArgument, "initial state not normalized");
  if (psi0.leak() > cfg.leak_ceiling) {
    std::ostringstream os;
    os << "initial state already leaks " << psi0.leak() << " into the top levels";
    throw Error(ErrorCode::TruncationLeak, os.str());
  }

  FockTrajectory traj;
  bool trusted = true;
  auto record = [&](double t, CVector amp) {
    FockState s(cfg.n_modes, cfg.cutoff, std::move(amp));
    const double leak = s.leak();
    const double drift = std::abs(s.norm() - 1.0);
    if (t > 0.0) traj.max_norm_drift_rate = std::max(traj.max_norm_drift_rate, drift / t);
    if (trusted && leak > cfg.leak_ceiling) {
      trusted = false;
      traj.leak_time = t;
    }
    traj.samples.push_back(FockSample{t, std::move(s), leak, drift, trusted});
  };

  if (hamiltonian.is_constant()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(build_hamiltonian(hamiltonian, 0.0, cfg));
    const CVector c0 = es.eigenvectors().adjoint() * psi0.amplitudes();
    for (int k = 0; k <= samples; ++k) {
      const double t = t_final * k / samples;
      CVector phased(c0.size());
      for (Eigen::Index i = 0; i < c0.size(); ++i) {
        phased(i) = std::exp(Complex(0.0, -t * es.eigenvalues()(i))) * c0(i);
      }
      record(t, es.eigenvectors() * phased);
    }
  } else {
    long long n_steps = 0;
    long long per_period = 0;
    double h = 0.0;
    if (hamiltonian.period()) {
      per_period = static_cast<long long>(std::ceil(*hamiltonian.period() / cfg.dt - 1e-9));
      h = *hamiltonian.period() / static_cast<double>(per_period);
      n_steps = std::max<long long>(1, std::llround(t_final / h));
      if (std::abs(static_cast<double>(n_steps) * h - t_final) > 1e-9 * t_final) per_period = 0;
    }
    if (per_period == 0) {
      n_steps = static_cast<long long>(std::ceil(t_final / cfg.dt - 1e-9));
      h = t_final / static_cast<double>(n_steps);
    }
    // Cache one period of step unitaries while it fits in ~256 MB.
    const double bytes = static_cast<double>(per_period) * static_cast<double>(cfg.dimension() * cfg.dimension()) * 16.0;
    std::vector<std::optional<CMatrix>> cache;
    if (per_period > 0 && bytes <= 256.0 * 1024 * 1024) cache.resize(static_cast<size_t>(per_period));

    std::vector<long long> marks;
    for (int k = 0; k <= samples; ++k) {
      const long long idx = std::llround(static_cast<double>(k) * static_cast<double>(n_steps) / samples);
      if (marks.empty() || idx != marks.back()) marks.push_back(idx);
    }
    CVector psi = psi0.amplitudes();
    size_t next = 0;
    if (marks[next] == 0) {
      record(0.0, psi);
      ++next;
    }
    for (long long i = 0; i < n_steps; ++i) {
      if (!cache.empty()) {
        auto& slot = cache[static_cast<size_t>(i % per_period)];
        if (!slot) {
          const double t_mid = (static_cast<double>(i % per_period) + 0.5) * h;
          slot = step_unitary(build_hamiltonian(hamiltonian, t_mid, cfg), h);
        }
        psi = *slot * psi;
      } else {
        const double t_mid = (static_cast<double>(i) + 0.5) * h;
        psi = step_unitary(build_hamiltonian(hamiltonian, t_mid, cfg), h) * psi;
      }
      if (next < marks.size() && marks[next] == i + 1) {
        record(static_cast<double>(i + 1) * h, psi);
        ++next;
      }
    }
  }
  if (traj.max_norm_drift_rate > 1e-8) {
    std::ostringstream os;
    os << "norm drift " << traj.max_norm_drift_rate << " per unit time exceeds 1e-8";
    throw Error(ErrorCode::NotConverged, os.str());
  }
  return traj;
}

double reduced_entropy(const FockState& psi, const std::vector<int>& subsystem) {
  const int n = psi.modes();
  const int d = psi.cutoff();
  std::vector<bool> in_a(static_cast<size_t>(n), false);
  for (int m : subsystem) {
    if (m < 0 || m >= n) throw Error(ErrorCode::InvalidArgument, "subsystem mode out of range");
    in_a[static_cast<size_t>(m)] = true;
  }
  const int na = static_cast<int>(std::count(in_a.begin(), in_a.end(), true));
  if (na == 0 || na == n) return 0.0;
  CMatrix mat = CMatrix::Zero(ipow(d, na), ipow(d, n - na));
  for (long long i = 0; i < psi.amplitudes().size(); ++i) {
    const auto occ = occupations_of(i, n, d);
    long long r = 0, c = 0;
    for (int m = 0; m < n; ++m) {
      if (in_a[static_cast<size_t>(m)]) {
        r = r * d + occ[static_cast<size_t>(m)];
      } else {
        c = c * d + occ[static_cast<size_t>(m)];
      }
    }
    mat(r, c) = psi.amplitudes()(i);
  }
  Eigen::BDCSVD<CMatrix> svd(mat);
  const Vector s = svd.singularValues();
  const double total = s.squaredNorm();
  double entropy = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double p = s(k) * s(k) / total;
    if (p > 1e-300) entropy -= p * std::log(p);
  }
  return entropy;
}

GaussianState covariance_of(const FockState& psi, double leak_ceiling) {
  if (psi.leak() > leak_ceiling) {
    std::ostringstream os;
    os << "state leaks " << psi.leak() << " into the top levels; moments untrusted";
    throw Error(ErrorCode::TruncationLeak, os.str());
  }
  // One extra level makes the ladder action on psi exact.
  const int n = psi.modes();
  const int d = psi.cutoff() + 1;
  const CVector v = pad_cutoff(psi, d);
  const double norm2 = v.squaredNorm();
  const auto [q, p] = single_mode_quadratures(d);
  std::vector<CVector> moved;
  for (int m = 0; m < n; ++m) {
    moved.push_back(apply_mode(q, m, n, d, v));
    moved.push_back(apply_mode(p, m, n, d, v));
  }
  const int dim2 = 2 * n;
  Vector z(dim2);
  for (int a = 0; a < dim2; ++a) z(a) = v.dot(moved[static_cast<size_t>(a)]).real() / norm2;
  Matrix g(dim2, dim2);
  for (int a = 0; a < dim2; ++a) {
    for (int b = a; b < dim2; ++b) {
      const double second = moved[static_cast<size_t>(a)].dot(moved[static_cast<size_t>(b)]).real() / norm2;
      g(a, b) = g(b, a) = 2.0 * second - 2.0 * z(a) * z(b);
    }
  }
  return GaussianState(CovarianceMatrix(g), z);
}

GrowthVerification verify_linear_growth(const FockTrajectory& trajectory, const std::vector<int>& subsystem,
                                        double reference_rate, const GrowthOptions& options) {
  GrowthVerification out;
  out.reference_rate = reference_rate;
  for (const auto& s : trajectory.samples) {
    if (!s.trusted) break;
    out.trusted_end = s.t;
  }
  out.window_end = out.trusted_end;
  out.window_begin = options.window_start * out.trusted_end;
  std::vector<int> sorted = subsystem;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> wt, ws;
  for (const auto& s : trajectory.samples) {
    if (!s.trusted) break;
    const double ent = reduced_entropy(s.state, subsystem);
    const GaussianState gs = covariance_of(s.state, std::max(s.leak, 1.0));
    const double gauss = von_neumann_entropy(restrict(gs.cov, SubsystemSpec::modes(s.state.modes(), sorted)));
    out.times.push_back(s.t);
    out.entropies.push_back(ent);
    out.gaussian_entropies.push_back(gauss);
    out.max_bound_excess = std::max(out.max_bound_excess, ent - gauss);
    if (s.t >= out.window_begin - 1e-12) {
      wt.push_back(s.t);
      ws.push_back(ent);
    }
  }
  out.gaussian_bound_respected = out.max_bound_excess <= 1e-6;
  if (static_cast<int>(wt.size()) < options.min_window_points) {
    std::ostringstream os;
    os << "trusted window [" << out.window_begin << ", " << out.window_end << "] holds " << wt.size()
       << " samples, need " << options.min_window_points << "; raise the cutoff or sample more densely";
    throw Error(ErrorCode::WindowTooShort, os.str());
  }
  out.fit = fit_line(wt, ws);
  out.relative_error = std::abs(out.fit.slope - reference_rate) / std::max(std::abs(reference_rate), 1e-300);
  out.within_tolerance = out.relative_error <= options.relative_tolerance;
  return out;
}

}  // namespace quadent
