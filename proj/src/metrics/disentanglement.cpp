#include "mvd/metrics/disentanglement.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mvd/numerics/kernels.hpp"
#include "mvd/numerics/ops.hpp"

namespace mvd {
namespace {

double spectral_norm_symmetric(const Matrix& m) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(
      m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(view, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double interview_pearson(const Matrix& a, const Matrix& b, PearsonVariant variant) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("interview_pearson: need two n x n matrices of equal size");
  }
  const std::size_t n = a.rows();
  if (n < 3) throw std::invalid_argument("interview_pearson: need n >= 3");

  if (variant == PearsonVariant::Flattened) {
    std::vector<double> x, y;
    x.reserve(n * (n - 1));
    y.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          x.push_back(a(i, j));
          y.push_back(b(i, j));
        }
    return pearson(x, y).r;
  }

  std::vector<double> x(n - 1), y(n - 1);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      x[k] = a(i, j);
      y[k] = b(i, j);
      ++k;
    }
    const auto r = pearson(x, y);
    if (r.constant) continue;
    sum += r.r;
    ++used;
  }
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

double hsic_from_grams(const Matrix& k1, const Matrix& k2, HsicNorm norm) {
  if (k1.rows() != k2.rows() || k1.rows() != k1.cols() || k2.rows() != k2.cols()) {
    throw std::invalid_argument("hsic: Gram matrices must be square and of equal size");
  }
  if (k1.rows() < 3) throw std::invalid_argument("hsic: need n >= 3");
  const Matrix c1 = center_gram(k1);
  const Matrix c2 = center_gram(k2);
  // tr(K1 H K2 H) = <H K1 H, H K2 H>_F for symmetric K.
  const double num = kernels::dot(c1.data(), c2.data(), c1.size());
  const double n1 = norm == HsicNorm::Frobenius ? frobenius_norm(c1) : spectral_norm_symmetric(c1);
  const double n2 = norm == HsicNorm::Frobenius ? frobenius_norm(c2) : spectral_norm_symmetric(c2);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw std::domain_error("hsic: centered Gram matrix has zero norm");
  return num / (n1 * n2);
}

double hsic(const Matrix& y1, const Matrix& y2, HsicNorm norm) {
  if (y1.rows() != y2.rows()) throw std::invalid_argument("hsic: row count mismatch");
  return hsic_from_grams(matsim(y1, y1, SimilarityKind::Dot), matsim(y2, y2, SimilarityKind::Dot), norm);
}

DisentanglementReport disentanglement_report(const std::vector<Matrix>& input, const std::vector<Matrix>& output,
                                             PearsonVariant variant) {
  if (input.size() != output.size()) throw std::invalid_argument("disentanglement_report: view count mismatch");
  std::vector<Matrix> gin, gout;
  for (std::size_t m = 0; m < input.size(); ++m) {
    gin.push_back(matsim(input[m], input[m], SimilarityKind::Dot));
    gout.push_back(matsim(output[m], output[m], SimilarityKind::Dot));
  }
  DisentanglementReport r;
  for (std::size_t m = 0; m < input.size(); ++m) {
    for (std::size_t n = m + 1; n < input.size(); ++n) {
      r.inter_input.push_back({m, n, interview_pearson(gin[m], gin[n], variant), hsic_from_grams(gin[m], gin[n])});
      r.inter_output.push_back(
          {m, n, interview_pearson(gout[m], gout[n], variant), hsic_from_grams(gout[m], gout[n])});
    }
    r.intra.push_back({m, m, interview_pearson(gin[m], gout[m], variant), hsic_from_grams(gin[m], gout[m])});
  }
  return r;
}

}  // namespace mvd
