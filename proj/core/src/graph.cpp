#include "crc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crc/csv.hpp"
#include "crc/error.hpp"
#include "crc/kvfile.hpp"

namespace crc {

AdjacencyGraph AdjacencyGraph::from_neighbors(std::vector<std::vector<std::size_t>> neighbors) {
  AdjacencyGraph g;
  const auto N = static_cast<Eigen::Index>(neighbors.size());
  g.adjacency = Matrix::Zero(N, N);
  g.normalized = Matrix::Zero(N, N);
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    auto& row = neighbors[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (std::size_t j : row) {
      if (j >= neighbors.size()) throw ShapeMismatch("neighbor index out of range");
      if (j == i) throw ConfigError("self edge on node " + std::to_string(i));
      g.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    }
    if (!row.empty()) {
      const double w = 1.0 / static_cast<double>(row.size());
      for (std::size_t j : row) g.normalized(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
    }
  }
  g.neighbors = std::move(neighbors);
  return g;
}

Matrix pearson_correlation(const Matrix& series) {
  const Eigen::Index T = series.rows(), N = series.cols();
  if (T < 2) throw DegenerateSeries("correlation needs at least 2 time points");
  const Matrix centered = series.rowwise() - series.colwise().mean();
  const Vector norms = centered.colwise().norm();
  Matrix corr = Matrix::Zero(N, N);
  const Matrix cross = centered.transpose() * centered;
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      if (i == j) {
        corr(i, j) = norms(i) > 0 ? 1.0 : 0.0;
        continue;
      }
      const double denom = norms(i) * norms(j);
      corr(i, j) = denom > 0 ? std::clamp(cross(i, j) / denom, -1.0, 1.0) : 0.0;
    }
  }
  return corr;
}

AdjacencyGraph build_correlation_knn(const Matrix& series, std::size_t k) {
  const auto N = static_cast<std::size_t>(series.cols());
  if (N == 0) throw ShapeMismatch("series has no columns");
  if (N > 1 && k >= N) {
    throw ConfigError("K = " + std::to_string(k) + " must be < N = " + std::to_string(N));
  }
  const Matrix corr = pearson_correlation(series);
  const std::size_t kk = std::min(k, N - 1);
  std::vector<std::vector<std::size_t>> neighbors(N);
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < N; ++j)
      if (j != i) cand.push_back(j);
    std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a))) >
             std::abs(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)));
    });
    neighbors[i].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk));
  }
  return AdjacencyGraph::from_neighbors(std::move(neighbors));
}

Matrix flatten_history(const Tensor3& history) {
  const std::size_t B = history.dim(0), P = history.dim(1), N = history.dim(2);
  Matrix out(static_cast<Eigen::Index>(B * P), static_cast<Eigen::Index>(N));
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t i = 0; i < N; ++i)
        out(static_cast<Eigen::Index>(b * P + p), static_cast<Eigen::Index>(i)) = history(b, p, i);
  return out;
}

std::string edge_list(const AdjacencyGraph& graph) {
  std::string out;
  for (std::size_t i = 0; i < graph.nodes(); ++i)
    for (std::size_t j : graph.neighbors[i]) out += std::to_string(i) + "," + std::to_string(j) + "\n";
  return out;
}

void write_edge_list(const std::filesystem::path& path, const AdjacencyGraph& graph,
                     const std::string& header_comment) {
  std::string text;
  if (!header_comment.empty()) {
    std::stringstream ss(header_comment);
    std::string line;
    while (std::getline(ss, line)) text += "# " + line + "\n";
  }
  text += edge_list(graph);
  write_text(path, text);
}

AdjacencyGraph parse_edge_list(const std::string& text, std::size_t nodes) {
  std::vector<std::vector<std::size_t>> neighbors(nodes);
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("edge list line " + std::to_string(line_no) + ": expected i,j");
    const long long i = parse_int(line.substr(0, comma), "edge list line " + std::to_string(line_no));
    const long long j = parse_int(line.substr(comma + 1), "edge list line " + std::to_string(line_no));
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= nodes || static_cast<std::size_t>(j) >= nodes)
      throw ParseError("edge list line " + std::to_string(line_no) + ": node out of range");
    neighbors[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
  }
  return AdjacencyGraph::from_neighbors(std::move(neighbors));
}

AdjacencyGraph read_edge_list(const std::filesystem::path& path, std::size_t nodes) {
  return parse_edge_list(read_text(path), nodes);
}

}  // namespace crc
