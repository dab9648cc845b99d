#include "poseamm/upnp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "poseamm/errors.hpp"

namespace poseamm {
namespace {

constexpr double kRankThreshold = 1e-10;

}  // namespace

Eigen::RowVector3d UpnpFactorization::u(std::size_t i, std::size_t j) const {
  const Eigen::Vector3d& vi = bearings_[i];
  const Eigen::Vector3d& vj = bearings_[j];
  const Eigen::RowVector3d wi = vi.transpose() * schur_inverse_;
  Eigen::RowVector3d out = wi.dot(vj) * vj.transpose() - wi;
  if (i == j) out += vj.transpose();
  return out;
}

Eigen::MatrixXd UpnpFactorization::dense_u() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd out(n, 3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out.block<1, 3>(i, 3 * j) = u(i, j);
  }
  return out;
}

UpnpFactorization build_upnp_factorization(const std::vector<PointRayCorrespondence>& corrs) {
  if (corrs.empty()) throw EmptyData("build_upnp_factorization: no correspondences");
  if (corrs.size() < 3) {
    throw InsufficientData("build_upnp_factorization: need at least 3 correspondences");
  }
  const double n = static_cast<double>(corrs.size());

  std::vector<Eigen::Vector3d> bearings;
  bearings.reserve(corrs.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const PointRayCorrespondence& corr : corrs) {
    bearings.push_back(corr.ray.bearing.normalized());
    scatter.noalias() += bearings.back() * bearings.back().transpose();
  }

  // A'A = [[I, B], [B', N I]] with B' B = scatter. Its eigenvalues are 1
  // (when N > 3) and the roots of (lambda - 1)(lambda - N) = c_k for each
  // eigenvalue c_k of the scatter matrix.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter, Eigen::EigenvaluesOnly);
  double min_eigenvalue = corrs.size() > 3 ? 1.0 : std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double gap = std::max(0.0, n - eig.eigenvalues()(k));
    const double root = 2.0 * gap / ((n + 1.0) + std::sqrt((n + 1.0) * (n + 1.0) - 4.0 * gap));
    min_eigenvalue = std::min(min_eigenvalue, root);
  }
  if (!(min_eigenvalue >= kRankThreshold)) {
    throw RankDeficientSystem("build_upnp_factorization: ray system is rank deficient");
  }

  const Eigen::Matrix3d schur = n * Eigen::Matrix3d::Identity() - scatter;
  return UpnpFactorization(std::move(bearings), schur.inverse(), min_eigenvalue);
}

double upnp_depth(const UpnpFactorization& fact,
                  const std::vector<PointRayCorrespondence>& corrs, std::size_t i,
                  const Eigen::Matrix3d& rotation, const Eigen::Vector3d& /*translation*/) {
  double alpha = 0.0;
  for (std::size_t j = 0; j < corrs.size(); ++j) {
    alpha += fact.u(i, j).dot(rotation * corrs[j].point - corrs[j].ray.offset);
  }
  return alpha;
}

QuadraticPoseForm build_upnp_form(const std::vector<PointRayCorrespondence>& corrs) {
  const UpnpFactorization fact = build_upnp_factorization(corrs);
  const std::vector<Eigen::Vector3d>& v = fact.bearings();
  const Eigen::Matrix3d& s_inv = fact.schur_inverse();
  const std::size_t n = corrs.size();

  // Sums over j that make every row of U cheap to contract:
  //   sum_j (p_j' kron u_ij) = (p_i kron v_i)' + w_i' H - (P kron w_i)'
  //   sum_j u_ij c_j        = v_i' c_i + w_i' Cv - w_i' Csum
  // with w_i = S^-1 v_i.
  Matrix39d h = Matrix39d::Zero();
  Eigen::Vector3d point_sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d projected_offsets = Eigen::Vector3d::Zero();
  Eigen::Vector3d offset_sum = Eigen::Vector3d::Zero();
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Vector3d& p = corrs[j].point;
    const Eigen::Vector3d& c = corrs[j].ray.offset;
    h.noalias() += v[j] * kron(p, v[j]).transpose();
    point_sum += p;
    projected_offsets += v[j] * v[j].dot(c);
    offset_sum += c;
  }

  QuadraticPoseForm form;
  Matrix39d g_sum = Matrix39d::Zero();
  Eigen::Vector3d d_sum = Eigen::Vector3d::Zero();
  Eigen::MatrixXd rows(3 * static_cast<Eigen::Index>(n), 13);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d& p = corrs[i].point;
    const Eigen::Vector3d& c = corrs[i].ray.offset;
    const Eigen::Vector3d w = s_inv * v[i];

    const Eigen::Matrix<double, 1, 9> depth_row =
        kron(p, v[i]).transpose() + w.transpose() * h - kron(point_sum, w).transpose();
    const double depth_offset = v[i].dot(c) + w.dot(projected_offsets) - w.dot(offset_sum);

    // eta_i = G_i r + d_i - t.
    const Matrix39d g = v[i] * depth_row - kron(p.transpose(), Eigen::Matrix3d::Identity());
    const Eigen::Vector3d d = c - depth_offset * v[i];

    form.m_rr.noalias() += g.transpose() * g;
    form.v_r.noalias() += 2.0 * g.transpose() * d;
    g_sum += g;
    d_sum += d;
    form.c += d.squaredNorm();

    const Eigen::Index row = 3 * static_cast<Eigen::Index>(i);
    rows.block<3, 9>(row, 0) = g;
    rows.block<3, 3>(row, 9) = -Eigen::Matrix3d::Identity();
    rows.block<3, 1>(row, 12) = d;
  }
  form.root = Matrix13d(square_root_factor(rows));
  form.m_tr = -2.0 * g_sum;
  form.m_tt = static_cast<double>(n) * Eigen::Matrix3d::Identity();
  form.v_t = -2.0 * d_sum;
  form.well_posed = true;
  return form;
}

}  // namespace poseamm
