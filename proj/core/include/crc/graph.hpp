#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "crc/tensor.hpp"

namespace crc {

/// Directed binary prior. adjacency(i, j) == 1 means "j may influence i".
/// The diagonal is always zero; self-dynamics are handled by the encoder.
struct AdjacencyGraph {
  Matrix adjacency;                              // [N x N], 0/1
  Matrix normalized;                             // row-normalized adjacency
  std::vector<std::vector<std::size_t>> neighbors;  // sources of each target, ascending

  std::size_t nodes() const { return neighbors.size(); }

  /// Builds all three views from a neighbor list.
  static AdjacencyGraph from_neighbors(std::vector<std::vector<std::size_t>> neighbors);
};

/// Pearson correlation of the columns of `series` ([T x N]). Zero-variance
/// columns correlate 0 with every other column.
Matrix pearson_correlation(const Matrix& series);

/// For each target i, links the K sources with the largest |corr(i, j)|
/// (ties to the lower index). Requires T >= 2 and K < N; K is clamped to
/// N - 1 only when N == 1.
AdjacencyGraph build_correlation_knn(const Matrix& series, std::size_t k);

/// Flattens a [B x P x N] history tensor into [(B*P) x N] rows.
Matrix flatten_history(const Tensor3& history);

/// Edge list `target,source` per line (A[target][source] = 1).
std::string edge_list(const AdjacencyGraph& graph);
void write_edge_list(const std::filesystem::path& path, const AdjacencyGraph& graph,
                     const std::string& header_comment = {});
AdjacencyGraph read_edge_list(const std::filesystem::path& path, std::size_t nodes);
AdjacencyGraph parse_edge_list(const std::string& text, std::size_t nodes);

}  // namespace crc
