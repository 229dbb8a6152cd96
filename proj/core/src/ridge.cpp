#include "crc/ridge.hpp"

#include <cmath>
#include <limits>

#include "crc/error.hpp"

namespace crc {

namespace {

constexpr double kStdFloor = 1e-8;
// Relative pivot below which an unregularized Gram matrix is treated as singular.
constexpr double kPivotTolerance = 1e-12;

bool factor_ok(const Eigen::LLT<Matrix>& llt, const Matrix& gram) {
  if (llt.info() != Eigen::Success) return false;
  const double scale = std::max(gram.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const Vector pivots = llt.matrixL().toDenseMatrix().diagonal();
  return (pivots.array().square() / scale).minCoeff() > kPivotTolerance;
}

}  // namespace

Matrix solve_ridge(const Matrix& design, const Matrix& rhs, double lambda,
                   std::size_t unpenalized_trailing) {
  if (design.rows() != rhs.rows()) {
    throw ShapeMismatch("design has " + std::to_string(design.rows()) + " rows, rhs has " +
                        std::to_string(rhs.rows()));
  }
  if (lambda < 0) throw ConfigError("ridge lambda must be >= 0");
  const Eigen::Index p = design.cols();
  Matrix gram = design.transpose() * design;
  const Matrix moment = design.transpose() * rhs;
  const Eigen::Index penalized = p - static_cast<Eigen::Index>(std::min<std::size_t>(unpenalized_trailing, static_cast<std::size_t>(p)));
  for (Eigen::Index k = 0; k < penalized; ++k) gram(k, k) += lambda;

  Eigen::LLT<Matrix> llt(gram);
  if (factor_ok(llt, gram)) return llt.solve(moment);
  if (lambda == 0.0) {
    throw SingularSystem("rank-deficient design (" + std::to_string(design.rows()) + "x" +
                         std::to_string(p) + ") with lambda = 0");
  }
  double jitter = 1e-8;
  for (int attempt = 0; attempt < 8; ++attempt, jitter *= 10.0) {
    Matrix g = gram;
    g.diagonal().array() += jitter;
    Eigen::LLT<Matrix> retry(g);
    if (factor_ok(retry, g)) return retry.solve(moment);
  }
  throw SingularSystem("Cholesky failed after jitter escalation");
}

Matrix node_design(const Tensor3& features, std::size_t node) {
  const std::size_t B = features.dim(0), D = features.dim(2);
  Matrix g(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(D));
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t k = 0; k < D; ++k)
      g(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) = features(b, node, k);
  return g;
}

Matrix node_block(const Tensor3& values, std::size_t node) {
  const std::size_t B = values.dim(0), H = values.dim(1);
  Matrix r(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(H));
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t h = 0; h < H; ++h)
      r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(h)) = values(b, h, node);
  return r;
}

namespace {

Matrix fit_node(const Matrix& z, const Matrix& r, double lambda) {
  const Eigen::Index B = z.rows(), D = z.cols();
  const Vector mean = z.colwise().mean();
  Vector sd(D);
  for (Eigen::Index k = 0; k < D; ++k) {
    const double var = (z.col(k).array() - mean(k)).square().mean();
    sd(k) = std::max(std::sqrt(var), kStdFloor);
  }
  Matrix g(B, D + 1);
  for (Eigen::Index k = 0; k < D; ++k) g.col(k) = (z.col(k).array() - mean(k)) / sd(k);
  g.col(D).setOnes();
  const Matrix w_std = solve_ridge(g, r, lambda, 1);
  Matrix w(D + 1, r.cols());
  for (Eigen::Index k = 0; k < D; ++k) w.row(k) = w_std.row(k) / sd(k);
  w.row(D) = w_std.row(D);
  for (Eigen::Index k = 0; k < D; ++k) w.row(D) -= mean(k) * w.row(k);
  return w;
}

void check_inputs(const Tensor3& features, const Tensor3& residual) {
  if (features.dim(0) != residual.dim(0) || features.dim(1) != residual.dim(2)) {
    throw ShapeMismatch("features " + features.shape_string() + " vs residual " + residual.shape_string());
  }
}

}  // namespace

RidgeModel fit_ridge(const Tensor3& features, const Tensor3& residual, double lambda) {
  check_inputs(features, residual);
  RidgeModel m;
  const std::size_t N = features.dim(1);
  for (std::size_t i = 0; i < N; ++i) {
    m.weights.push_back(fit_node(node_design(features, i), node_block(residual, i), lambda));
    m.lambda.push_back(lambda);
  }
  return m;
}

RidgeModel fit_ridge_select(const Tensor3& train_features, const Tensor3& train_residual,
                            const Tensor3& val_features, const Tensor3& val_residual,
                            const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("ridge lambda grid is empty");
  check_inputs(train_features, train_residual);
  check_inputs(val_features, val_residual);
  RidgeModel m;
  const std::size_t N = train_features.dim(1);
  for (std::size_t i = 0; i < N; ++i) {
    const Matrix z = node_design(train_features, i);
    const Matrix r = node_block(train_residual, i);
    Matrix zv(val_features.dim(0), val_features.dim(2) + 1);
    zv.leftCols(static_cast<Eigen::Index>(val_features.dim(2))) = node_design(val_features, i);
    zv.col(zv.cols() - 1).setOnes();
    const Matrix rv = node_block(val_residual, i);
    double best_mae = std::numeric_limits<double>::infinity();
    Matrix best_w;
    double best_lambda = grid.front();
    for (double lambda : grid) {
      Matrix w = fit_node(z, r, lambda);
      const double mae = (rv - zv * w).cwiseAbs().mean();
      if (mae < best_mae) {
        best_mae = mae;
        best_w = std::move(w);
        best_lambda = lambda;
      }
    }
    m.weights.push_back(std::move(best_w));
    m.lambda.push_back(best_lambda);
  }
  return m;
}

Tensor3 predict_ridge(const RidgeModel& model, const Tensor3& features) {
  if (features.dim(1) != model.nodes() || features.dim(2) != model.features()) {
    throw ShapeMismatch("features " + features.shape_string() + " vs ridge model with " +
                        std::to_string(model.nodes()) + " nodes x " + std::to_string(model.features()) +
                        " features");
  }
  const std::size_t B = features.dim(0), N = model.nodes(), H = model.horizon(), D = model.features();
  Tensor3 out(B, H, N);
  for (std::size_t i = 0; i < N; ++i) {
    const Matrix& w = model.weights[i];
    const Matrix pred = node_design(features, i) * w.topRows(static_cast<Eigen::Index>(D));
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t h = 0; h < H; ++h)
        out(b, h, i) = pred(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(h)) +
                       w(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(h));
  }
  return out;
}

}  // namespace crc
