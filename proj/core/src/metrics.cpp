#include "crc/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "crc/csv.hpp"
#include "crc/error.hpp"
#include "json_util.hpp"
#include "crc/kvfile.hpp"

namespace crc {

namespace {

template <class F>
Matrix pair_stat(const Tensor3& pred, const Tensor3& truth, F&& f) {
  require_same_shape(pred, truth, "metric operands");
  const std::size_t Bn = pred.dim(0), H = pred.dim(1), N = pred.dim(2);
  if (Bn == 0) throw ShapeMismatch("metric over zero samples");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(H));
  for (std::size_t b = 0; b < Bn; ++b)
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t i = 0; i < N; ++i)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) += f(pred(b, h, i) - truth(b, h, i));
  return out / static_cast<double>(Bn);
}

template <class F>
double overall_stat(const Tensor3& pred, const Tensor3& truth, F&& f) {
  require_same_shape(pred, truth, "metric operands");
  if (pred.empty()) throw ShapeMismatch("metric over an empty tensor");
  const auto p = pred.values();
  const auto t = truth.values();
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += f(p[k] - t[k]);
  return s / static_cast<double>(p.size());
}

double square(double x) { return x * x; }
double absval(double x) { return std::abs(x); }

}  // namespace

double mse(const Tensor3& pred, const Tensor3& truth) { return overall_stat(pred, truth, square); }
double mae(const Tensor3& pred, const Tensor3& truth) { return overall_stat(pred, truth, absval); }
Matrix pair_mae(const Tensor3& pred, const Tensor3& truth) { return pair_stat(pred, truth, absval); }
Matrix pair_mse(const Tensor3& pred, const Tensor3& truth) { return pair_stat(pred, truth, square); }

double ndr(const Matrix& baseline, const Matrix& corrected) {
  if (baseline.rows() != corrected.rows() || baseline.cols() != corrected.cols())
    throw ShapeMismatch("NDR tables differ in shape");
  if (baseline.size() == 0) throw ShapeMismatch("NDR over zero pairs");
  std::size_t ok = 0;
  for (Eigen::Index k = 0; k < baseline.size(); ++k)
    if (corrected.data()[k] <= baseline.data()[k]) ++ok;
  return static_cast<double>(ok) / static_cast<double>(baseline.size());
}

EvaluationReport evaluate(const std::string& split, const Tensor3& base, const Tensor3& corrected,
                          const Tensor3& truth) {
  require_same_shape(base, truth, "baseline vs target");
  require_same_shape(corrected, truth, "corrected vs target");
  EvaluationReport r;
  r.split = split;
  r.samples = truth.dim(0);
  r.horizon = truth.dim(1);
  r.nodes = truth.dim(2);
  r.mse_base = mse(base, truth);
  r.mae_base = mae(base, truth);
  r.mse_corrected = mse(corrected, truth);
  r.mae_corrected = mae(corrected, truth);
  r.pair_mae_base = pair_mae(base, truth);
  r.pair_mae_corrected = pair_mae(corrected, truth);
  r.pair_mse_base = pair_mse(base, truth);
  r.pair_mse_corrected = pair_mse(corrected, truth);
  r.ndr = ndr(r.pair_mae_base, r.pair_mae_corrected);
  return r;
}

std::string EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "crc-evaluation";
  j["version"] = 1;
  j["config_hash"] = config_hash;
  j["split"] = split;
  j["pair_statistic"] = "mae";
  j["samples"] = samples;
  j["nodes"] = nodes;
  j["horizon"] = horizon;
  j["mse_base"] = mse_base;
  j["mae_base"] = mae_base;
  j["mse_corrected"] = mse_corrected;
  j["mae_corrected"] = mae_corrected;
  j["delta_mse"] = delta_mse();
  j["delta_mae"] = delta_mae();
  j["ndr"] = ndr;
  j["runtime_seconds"] = runtime_seconds;
  j["pair_mae_base"] = json_util::matrix_to_json(pair_mae_base);
  j["pair_mae_corrected"] = json_util::matrix_to_json(pair_mae_corrected);
  j["pair_mse_base"] = json_util::matrix_to_json(pair_mse_base);
  j["pair_mse_corrected"] = json_util::matrix_to_json(pair_mse_corrected);
  return j.dump(2) + "\n";
}

EvaluationReport EvaluationReport::from_json(std::string_view text) {
  const auto j = json_util::parse(text, "crc-evaluation");
  EvaluationReport r;
  try {
    r.config_hash = j.at("config_hash").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.samples = j.at("samples").get<std::size_t>();
    r.nodes = j.at("nodes").get<std::size_t>();
    r.horizon = j.at("horizon").get<std::size_t>();
    r.mse_base = j.at("mse_base").get<double>();
    r.mae_base = j.at("mae_base").get<double>();
    r.mse_corrected = j.at("mse_corrected").get<double>();
    r.mae_corrected = j.at("mae_corrected").get<double>();
    r.ndr = j.at("ndr").get<double>();
    r.runtime_seconds = j.at("runtime_seconds").get<double>();
    r.pair_mae_base = json_util::matrix_from_json(j.at("pair_mae_base"));
    r.pair_mae_corrected = json_util::matrix_from_json(j.at("pair_mae_corrected"));
    r.pair_mse_base = json_util::matrix_from_json(j.at("pair_mse_base"));
    r.pair_mse_corrected = json_util::matrix_from_json(j.at("pair_mse_corrected"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("evaluation report: ") + e.what());
  }
  return r;
}

void EvaluationReport::write(const std::filesystem::path& path) const { write_text(path, to_json()); }

EvaluationReport EvaluationReport::read(const std::filesystem::path& path) { return from_json(read_text(path)); }

std::string EvaluationReport::pairs_csv() const {
  std::string out = "node,horizon,mae_base,mae_corrected,mse_base,mse_corrected\n";
  for (Eigen::Index i = 0; i < pair_mae_base.rows(); ++i)
    for (Eigen::Index h = 0; h < pair_mae_base.cols(); ++h) {
      out += std::to_string(i) + "," + std::to_string(h) + ",";
      out += format_double(pair_mae_base(i, h)) + "," + format_double(pair_mae_corrected(i, h)) + ",";
      out += format_double(pair_mse_base(i, h)) + "," + format_double(pair_mse_corrected(i, h)) + "\n";
    }
  return out;
}

}  // namespace crc
