#include "quadent/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quadent/matrix_functions.hpp"

namespace quadent {

QuadraticHamiltonian::QuadraticHamiltonian(int n_modes, MatrixFn h, VectorFn f, std::optional<double> period)
    : n_modes_(n_modes), h_(std::move(h)), f_(std::move(f)), period_(period) {
  if (n_modes < 1) throw Error(ErrorCode::InvalidArgument, "Hamiltonian needs at least one mode");
  if (!h_) throw Error(ErrorCode::InvalidArgument, "Hamiltonian needs a quadratic form");
  if (period_ && !(*period_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "period must be positive");
}

QuadraticHamiltonian QuadraticHamiltonian::constant(Matrix h, Vector f) {
  if (h.rows() != h.cols() || h.rows() % 2 != 0 || h.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "h must be 2N x 2N");
  }
  if (f.size() != 0 && f.size() != h.rows()) throw Error(ErrorCode::DimensionMismatch, "f must have length 2N");
  const int n = static_cast<int>(h.rows() / 2);
  QuadraticHamiltonian out(n, [h](double) { return h; });
  out.constant_h_ = std::move(h);
  if (f.size() > 0 && f.cwiseAbs().maxCoeff() > 0.0) out.constant_f_ = std::move(f);
  return out;
}

Matrix QuadraticHamiltonian::h(double t) const {
  if (constant_h_.size() > 0) return constant_h_;
  Matrix m = h_(t);
  if (m.rows() != 2 * n_modes_ || m.cols() != 2 * n_modes_) {
    throw Error(ErrorCode::DimensionMismatch, "h(t) has the wrong size");
  }
  return m;
}

Vector QuadraticHamiltonian::f(double t) const {
  if (constant_f_.size() > 0) return constant_f_;
  if (!f_) return Vector::Zero(2 * n_modes_);
  Vector v = f_(t);
  if (v.size() != 2 * n_modes_) throw Error(ErrorCode::DimensionMismatch, "f(t) has the wrong size");
  return v;
}

Matrix generator(const QuadraticHamiltonian& hamiltonian, double t) {
  const Matrix h = hamiltonian.h(t);
  const double asym = max_abs(h - h.transpose());
  if (asym > 1e-12 * std::max(1.0, max_abs(h))) {
    std::ostringstream os;
    os << "h(" << t << ") asymmetry " << asym;
    throw Error(ErrorCode::NonSymmetricH, os.str());
  }
  return standard_omega(hamiltonian.modes()) * (0.5 * (h + h.transpose()));
}

Matrix symplectic_projection_step(const Matrix& s) {
  const Matrix omega = standard_omega(static_cast<int>(s.rows() / 2));
  const Matrix y = omega.transpose() * s.transpose() * omega * s;
  return s * (3.0 * Matrix::Identity(s.rows(), s.cols()) - y) * 0.5;
}

PropagationResult::PropagationResult(std::vector<FlowSample> samples, double dt, int steps, double max_step_defect)
    : samples_(std::move(samples)), dt_(dt), steps_(steps), max_step_defect_(max_step_defect) {
  if (samples_.empty()) throw Error(ErrorCode::InvalidArgument, "empty propagation");
}

std::vector<double> PropagationResult::times() const {
  std::vector<double> t;
  t.reserve(samples_.size());
  for (const auto& s : samples_) t.push_back(s.t);
  return t;
}

const FlowSample& PropagationResult::nearest(double t) const {
  return *std::min_element(samples_.begin(), samples_.end(), [t](const FlowSample& a, const FlowSample& b) {
    return std::abs(a.t - t) < std::abs(b.t - t);
  });
}

double PropagationResult::max_defect() const {
  double d = 0.0;
  for (const auto& s : samples_) d = std::max(d, s.defect);
  return d;
}

namespace {

struct Step {
  Matrix e;
  Vector shift;  // displacement increment, empty if no linear term
};

Step make_step(const QuadraticHamiltonian& ham, double t_mid, double dt, bool project) {
  const Matrix k = generator(ham, t_mid);
  const Eigen::Index n = k.rows();
  Step s;
  if (ham.has_linear_term()) {
    Matrix aug = Matrix::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = dt * k;
    aug.topRightCorner(n, 1) = dt * (standard_omega(ham.modes()) * ham.f(t_mid));
    const Matrix ex = expm(aug);
    s.e = ex.topLeftCorner(n, n);
    s.shift = ex.topRightCorner(n, 1);
  } else {
    s.e = expm(dt * k);
  }
  if (project) {
    for (int i = 0; i < 3; ++i) s.e = symplectic_projection_step(s.e);
  }
  return s;
}

double relative_defect(const Matrix& e) {
  const double norm = e.cwiseAbs().rowwise().sum().maxCoeff();
  return symplectic_defect(e) / (1.0 + norm * norm);
}

}  // namespace

PropagationResult propagate(const QuadraticHamiltonian& hamiltonian, double t_final, double dt,
                            const PropagationOptions& options) {
  if (!(dt > 0.0) || !(t_final > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt and t_final must be positive");
  if (options.samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  const int dim = 2 * hamiltonian.modes();

  double h = 0.0;
  long long n_steps = 0;
  long long per_period = 0;
  if (hamiltonian.period() && !hamiltonian.is_constant()) {
    const double tau = *hamiltonian.period();
    per_period = static_cast<long long>(std::ceil(tau / dt - 1e-9));
    h = tau / static_cast<double>(per_period);
    n_steps = std::max<long long>(1, std::llround(t_final / h));
    // Step reuse only when the horizon is a whole number of steps.
    if (std::abs(static_cast<double>(n_steps) * h - t_final) > 1e-9 * t_final) per_period = 0;
  }
  if (per_period == 0) {
    n_steps = static_cast<long long>(std::ceil(t_final / dt - 1e-9));
    h = t_final / static_cast<double>(n_steps);
  }
  if (n_steps > 50'000'000) throw Error(ErrorCode::InvalidArgument, "too many steps");

  std::vector<long long> record;
  for (int k = 0; k <= options.samples; ++k) {
    const long long idx = std::llround(static_cast<double>(k) * static_cast<double>(n_steps) / options.samples);
    if (record.empty() || idx != record.back()) record.push_back(idx);
  }

  std::optional<Step> fixed;
  std::vector<std::optional<Step>> cycle;
  if (hamiltonian.is_constant()) {
    fixed = make_step(hamiltonian, 0.0, h, options.symplectic_projection);
  } else if (per_period > 0 && per_period <= 200'000) {
    cycle.resize(static_cast<size_t>(per_period));
  }

  StretchFactor stretch = StretchFactor::identity(dim);
  std::optional<Matrix> dense = Matrix(Matrix::Identity(dim, dim));
  Vector z = Vector::Zero(dim);
  double max_step_defect = 0.0;
  std::vector<FlowSample> samples;
  samples.reserve(record.size());
  size_t next_record = 0;

  auto snapshot = [&](long long i) {
    FlowSample s;
    s.t = static_cast<double>(i) * h;
    s.stretch = stretch;
    s.dense = dense;
    s.displacement = z;
    s.defect = stretch.relative_symplectic_defect();
    if (s.defect > options.defect_ceiling) {
      std::ostringstream os;
      os << "relative symplectic defect " << s.defect << " at t=" << s.t << " exceeds " << options.defect_ceiling
         << "; reduce dt";
      throw Error(ErrorCode::StepTooLarge, os.str());
    }
    samples.push_back(std::move(s));
  };

  if (record[next_record] == 0) {
    snapshot(0);
    ++next_record;
  }
  for (long long i = 0; i < n_steps; ++i) {
    const Step* step = nullptr;
    Step local;
    if (fixed) {
      step = &*fixed;
    } else if (!cycle.empty()) {
      auto& slot = cycle[static_cast<size_t>(i % per_period)];
      if (!slot) {
        const double t_mid = (static_cast<double>(i % per_period) + 0.5) * h;
        slot = make_step(hamiltonian, t_mid, h, options.symplectic_projection);
        max_step_defect = std::max(max_step_defect, relative_defect(slot->e));
      }
      step = &*slot;
    } else {
      local = make_step(hamiltonian, (static_cast<double>(i) + 0.5) * h, h, options.symplectic_projection);
      max_step_defect = std::max(max_step_defect, relative_defect(local.e));
      step = &local;
    }
    if (fixed && i == 0) max_step_defect = relative_defect(step->e);

    stretch.left_multiply(step->e);
    if (dense) {
      *dense = step->e * *dense;
      if (!(dense->cwiseAbs().maxCoeff() < 1e150)) dense.reset();
    }
    z = step->e * z;
    if (step->shift.size() > 0) z += step->shift;

    if (next_record < record.size() && record[next_record] == i + 1) {
      snapshot(i + 1);
      ++next_record;
    }
  }
  if (max_step_defect > options.defect_ceiling) {
    std::ostringstream os;
    os << "step matrix defect " << max_step_defect << " exceeds " << options.defect_ceiling;
    throw Error(ErrorCode::StepTooLarge, os.str());
  }
  return PropagationResult(std::move(samples), h, static_cast<int>(n_steps), max_step_defect);
}

CovarianceMatrix evolve_covariance(const CovarianceMatrix& g0, const Matrix& m) {
  if (m.rows() != m.cols() || m.cols() != g0.matrix().rows()) {
    throw Error(ErrorCode::DimensionMismatch, "M and G0 sizes differ");
  }
  const Matrix ml = m * g0.spd().cholesky();
  const Matrix g = ml * ml.transpose();
  return CovarianceMatrix(Matrix(0.5 * (g + g.transpose())));
}

PolarPair polar_decompose(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "polar decomposition needs a square matrix");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-14 * s(0))) throw Error(ErrorCode::SingularM, "M is numerically singular");
  const Matrix& u = svd.matrixU();
  PolarPair out;
  out.t_part = u * s.asDiagonal() * u.transpose();
  out.t_part = 0.5 * (out.t_part + out.t_part.transpose());
  out.u_part = u * svd.matrixV().transpose();
  return out;
}

Matrix stroboscopic_generator(const Matrix& m_tau, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  return logm_real(m_tau) / tau;
}

}  // namespace quadent
