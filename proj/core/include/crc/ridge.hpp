#pragma once

#include <cstddef>
#include <vector>

#include "crc/tensor.hpp"

namespace crc {

/// Solves (G^T G + lambda * D) W = G^T R by Cholesky, where D is the identity
/// with the last `unpenalized_trailing` diagonal entries zeroed.
///
/// With lambda == 0 a rank-deficient design throws SingularSystem. With
/// lambda > 0 a failed factorization is retried with escalating diagonal
/// jitter (1e-8, 1e-7, ...) before giving up.
Matrix solve_ridge(const Matrix& design, const Matrix& rhs, double lambda,
                   std::size_t unpenalized_trailing = 0);

/// Closed-form per-node ridge floor over augmented node features.
///
/// Each node i owns an affine map Z_aug,i -> H stored as a
/// [(D + 1) x H] matrix whose last row is the intercept. Features are
/// standardized with training statistics before solving, so lambda acts on
/// unit-variance columns; the intercept is never penalized. The stored
/// weights are folded back into raw feature space.
struct RidgeModel {
  std::vector<Matrix> weights;  // per node
  std::vector<double> lambda;   // per node

  std::size_t nodes() const { return weights.size(); }
  std::size_t features() const { return weights.empty() ? 0 : static_cast<std::size_t>(weights[0].rows()) - 1; }
  std::size_t horizon() const { return weights.empty() ? 0 : static_cast<std::size_t>(weights[0].cols()); }
};

/// Rows of node `node` of a [B x N x D] feature tensor as a B x D matrix.
Matrix node_design(const Tensor3& features, std::size_t node);
/// Column block of node `node` of a [B x H x N] tensor as a B x H matrix.
Matrix node_block(const Tensor3& values, std::size_t node);

/// Fits one ridge system per node. `features` is [B x N x D], `residual` is
/// [B x H x N]. Throws SingularSystem for lambda == 0 on a rank-deficient design.
RidgeModel fit_ridge(const Tensor3& features, const Tensor3& residual, double lambda);

/// As fit_ridge, choosing each node's lambda from `grid` by validation MAE.
/// Ties keep the earlier grid entry.
RidgeModel fit_ridge_select(const Tensor3& train_features, const Tensor3& train_residual,
                            const Tensor3& val_features, const Tensor3& val_residual,
                            const std::vector<double>& grid);

/// Delta^ridge = [Z_aug, 1] W per node; returns [B x H x N].
Tensor3 predict_ridge(const RidgeModel& model, const Tensor3& features);

}  // namespace crc
