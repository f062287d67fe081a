#include "handcept/fusion/ekf.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace handcept::fusion {
namespace {

template <int N>
void require_symmetric_psd(const Eigen::Matrix<double, N, N>& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(name) + " must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
  }
}

template <int N>
void symmetrize(Eigen::Matrix<double, N, N>& m) {
  m = 0.5 * (m + m.transpose()).eval();
}

Eigen::Vector4d bias_quaternion(const Eigen::Vector3d& b) { return {1.0, 0.5 * b.x(), 0.5 * b.y(), 0.5 * b.z()}; }

}  // namespace

StateVector EkfState::vector() const {
  StateVector x;
  x << q.coeffs(), b;
  return x;
}

Covariance NoiseConfig::process() const {
  Covariance q = Covariance::Zero();
  q.topLeftCorner<4, 4>() = q_q;
  q.bottomRightCorner<3, 3>() = q_b;
  return q;
}

void NoiseConfig::validate() const {
  require_symmetric_psd(q_q, "Q_q");
  require_symmetric_psd(q_b, "Q_b");
  require_symmetric_psd(r_imu, "R_imu");
  require_symmetric_psd(r_cam, "R_cam");
}

Covariance InitConfig::covariance() const {
  Covariance p = Covariance::Zero();
  p.topLeftCorner<4, 4>() = p_q;
  p.bottomRightCorner<3, 3>() = p_b;
  return p;
}

Belief initial_belief(const rot::UnitQuaternion& q0, const InitConfig& init) {
  return {{q0, init.b0}, init.covariance()};
}

Belief predict(const Belief& belief, const NoiseConfig& noise) {
  Belief out = belief;
  out.cov += noise.process();
  symmetrize(out.cov);
  return out;
}

Eigen::Vector4d imu_measurement_fn(const EkfState& state) {
  return rot::hamilton_product(state.q.coeffs(), bias_quaternion(state.b));
}

ImuJacobian imu_measurement_jacobian(const EkfState& state) {
  ImuJacobian j;
  j.leftCols<4>() = rot::right_multiplication_matrix(bias_quaternion(state.b));
  j.rightCols<3>() = 0.5 * rot::left_multiplication_matrix(state.q.coeffs()).rightCols<3>();
  return j;
}

Eigen::Vector4d sign_aligned(const Eigen::Vector4d& z, const Eigen::Vector4d& h) {
  return z.dot(h) < 0.0 ? Eigen::Vector4d(-z) : z;
}

template <int M>
UpdateOutcome kalman_update(Belief& belief, const Eigen::Matrix<double, M, 1>& z,
                            const Eigen::Matrix<double, M, 1>& h, const Eigen::Matrix<double, M, 7>& H,
                            const Eigen::Matrix<double, M, M>& R) {
  using MatM = Eigen::Matrix<double, M, M>;
  const Covariance& P = belief.cov;
  MatM S = H * P * H.transpose() + R;
  symmetrize(S);

  Eigen::SelfAdjointEigenSolver<MatM> es(S, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  UpdateOutcome out;
  out.condition_number = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(out.condition_number <= kMaxInnovationCondition)) {
    out.applied = false;
    return out;
  }

  // K = P H^T S^-1, computed as (S^-1 H P)^T since P and S are symmetric.
  const Eigen::Matrix<double, 7, M> K = S.ldlt().solve(H * P).transpose();
  StateVector x = belief.state.vector() + K * (z - h);
  Covariance cov = (Covariance::Identity() - K * H) * P;
  symmetrize(cov);

  const Eigen::Vector4d raw = x.template head<4>();
  const auto q = rot::UnitQuaternion::from_coeffs(raw);
  if (q.coeffs().dot(raw) < 0.0) {
    // q -> -q maps the covariance through S = diag(-I4, I3).
    cov.template topRightCorner<4, 3>() *= -1.0;
    cov.template bottomLeftCorner<3, 4>() *= -1.0;
  }
  belief.state = {q, x.template tail<3>()};
  belief.cov = cov;
  return out;
}

template UpdateOutcome kalman_update<4>(Belief&, const Eigen::Matrix<double, 4, 1>&,
                                        const Eigen::Matrix<double, 4, 1>&, const Eigen::Matrix<double, 4, 7>&,
                                        const Eigen::Matrix<double, 4, 4>&);
template UpdateOutcome kalman_update<8>(Belief&, const Eigen::Matrix<double, 8, 1>&,
                                        const Eigen::Matrix<double, 8, 1>&, const Eigen::Matrix<double, 8, 7>&,
                                        const Eigen::Matrix<double, 8, 8>&);

UpdateOutcome update_camera(Belief& belief, const rot::UnitQuaternion& z_cam, const NoiseConfig& noise) {
  const Eigen::Vector4d h = belief.state.q.coeffs();
  Eigen::Matrix<double, 4, 7> H = Eigen::Matrix<double, 4, 7>::Zero();
  H.leftCols<4>().setIdentity();
  return kalman_update<4>(belief, sign_aligned(z_cam.coeffs(), h), h, H, noise.r_cam);
}

UpdateOutcome update_imu(Belief& belief, const rot::UnitQuaternion& z_imu, const NoiseConfig& noise) {
  const Eigen::Vector4d h = imu_measurement_fn(belief.state);
  return kalman_update<4>(belief, sign_aligned(z_imu.coeffs(), h), h, imu_measurement_jacobian(belief.state),
                          noise.r_imu);
}

UpdateOutcome update_joint(Belief& belief, const rot::UnitQuaternion& z_cam, const rot::UnitQuaternion& z_imu,
                           const NoiseConfig& noise) {
  const Eigen::Vector4d h_cam = belief.state.q.coeffs();
  const Eigen::Vector4d h_imu = imu_measurement_fn(belief.state);
  Eigen::Matrix<double, 8, 1> z, h;
  z << sign_aligned(z_cam.coeffs(), h_cam), sign_aligned(z_imu.coeffs(), h_imu);
  h << h_cam, h_imu;
  Eigen::Matrix<double, 8, 7> H = Eigen::Matrix<double, 8, 7>::Zero();
  H.topLeftCorner<4, 4>().setIdentity();
  H.bottomRows<4>() = imu_measurement_jacobian(belief.state);
  Eigen::Matrix<double, 8, 8> R = Eigen::Matrix<double, 8, 8>::Zero();
  R.topLeftCorner<4, 4>() = noise.r_cam;
  R.bottomRightCorner<4, 4>() = noise.r_imu;
  return kalman_update<8>(belief, z, h, H, R);
}

double min_eigenvalue(const Covariance& cov) {
  Eigen::SelfAdjointEigenSolver<Covariance> es(cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace handcept::fusion
