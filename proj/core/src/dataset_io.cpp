#include "crc/dataset_io.hpp"

#include "crc/csv.hpp"
#include "crc/error.hpp"

namespace crc {

namespace {

constexpr const char* kSplits[] = {"train", "val", "test"};

std::string series_csv(const Matrix& series, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  out += "\n";
  for (Eigen::Index t = 0; t < series.rows(); ++t) {
    for (Eigen::Index i = 0; i < series.cols(); ++i) out += (i ? "," : "") + format_double(series(t, i));
    out += "\n";
  }
  return out;
}

Matrix parse_series(const CsvTable& t, const std::string& origin) {
  Matrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.header.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(t.rows[r][c], origin + " row " + std::to_string(r + 2) + " column " + t.header[c]);
  return m;
}

ForecastInstance* instance(DatasetSplit& s, std::size_t k) {
  return k == 0 ? &s.train : k == 1 ? &s.val : &s.test;
}

}  // namespace

void write_dataset(const std::filesystem::path& dir, const StoredDataset& data) {
  const DatasetSplit& s = data.split;
  std::filesystem::create_directories(dir);
  KvFile meta;
  meta.set("format", std::string("crc-dataset"));
  meta.set_int("version", 1);
  meta.set("source", data.source);
  meta.set("baseline", data.baseline);
  meta.set_int("rows", static_cast<long long>(s.series.rows()));
  meta.set_int("nodes", static_cast<long long>(s.nodes()));
  meta.set_int("lookback", static_cast<long long>(s.train.lookback()));
  meta.set_int("horizon", static_cast<long long>(s.train.horizon()));
  const auto& b = s.bounds;
  meta.set_int("train_begin", static_cast<long long>(b.train_begin));
  meta.set_int("train_end", static_cast<long long>(b.train_end));
  meta.set_int("val_begin", static_cast<long long>(b.val_begin));
  meta.set_int("val_end", static_cast<long long>(b.val_end));
  meta.set_int("test_begin", static_cast<long long>(b.test_begin));
  meta.set_int("test_end", static_cast<long long>(b.test_end));
  meta.set("normalization", std::string(s.normalization.enabled ? "zscore" : "none"));
  for (std::size_t i = 0; i < s.normalization.mean.size(); ++i) {
    meta.set("norm_mean_" + std::to_string(i), s.normalization.mean[i]);
    meta.set("norm_scale_" + std::to_string(i), s.normalization.scale[i]);
  }
  meta.write(dir / "meta.kv");

  std::vector<std::string> names = s.node_names;
  if (names.size() != s.nodes()) {
    names.clear();
    for (std::size_t i = 0; i < s.nodes(); ++i) names.push_back("x" + std::to_string(i));
  }
  write_text(dir / "series.csv", series_csv(s.series, names));
  write_forecast_csv(dir / "base_train.csv", s.train.base_forecast);
  write_forecast_csv(dir / "base_val.csv", s.val.base_forecast);
  write_forecast_csv(dir / "base_test.csv", s.test.base_forecast);
  if (data.oracle) {
    const auto& o = *data.oracle;
    write_forecast_csv(dir / "oracle_cross_train.csv", o.cross_train);
    write_forecast_csv(dir / "oracle_cross_val.csv", o.cross_val);
    write_forecast_csv(dir / "oracle_cross_test.csv", o.cross_test);
    write_forecast_csv(dir / "oracle_noise_train.csv", o.noise_train);
    write_forecast_csv(dir / "oracle_noise_val.csv", o.noise_val);
    write_forecast_csv(dir / "oracle_noise_test.csv", o.noise_test);
  }
}

StoredDataset read_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "meta.kv")) throw MissingStage("no dataset at " + dir.string());
  const KvFile meta = KvFile::read(dir / "meta.kv");
  if (meta.get("format") != "crc-dataset" || meta.get_int("version") != 1)
    throw ParseError(dir.string() + ": not a version-1 dataset");
  StoredDataset out;
  out.source = meta.get("source");
  out.baseline = meta.get("baseline");
  DatasetSplit& s = out.split;
  const CsvTable table = read_csv(dir / "series.csv");
  s.series = parse_series(table, (dir / "series.csv").string());
  s.node_names = table.header;
  const auto N = static_cast<std::size_t>(meta.get_int("nodes"));
  if (static_cast<std::size_t>(s.series.cols()) != N || s.series.rows() != meta.get_int("rows"))
    throw ShapeMismatch(dir.string() + ": series.csv disagrees with meta.kv");
  const auto P = static_cast<std::size_t>(meta.get_int("lookback"));
  const auto H = static_cast<std::size_t>(meta.get_int("horizon"));
  auto& b = s.bounds;
  b.train_begin = static_cast<std::size_t>(meta.get_int("train_begin"));
  b.train_end = static_cast<std::size_t>(meta.get_int("train_end"));
  b.val_begin = static_cast<std::size_t>(meta.get_int("val_begin"));
  b.val_end = static_cast<std::size_t>(meta.get_int("val_end"));
  b.test_begin = static_cast<std::size_t>(meta.get_int("test_begin"));
  b.test_end = static_cast<std::size_t>(meta.get_int("test_end"));
  if (b.test_end > static_cast<std::size_t>(s.series.rows())) throw ShapeMismatch(dir.string() + ": bounds exceed series");
  s.normalization.enabled = meta.get("normalization") == "zscore";
  for (std::size_t i = 0; meta.contains("norm_mean_" + std::to_string(i)); ++i) {
    s.normalization.mean.push_back(meta.get_double("norm_mean_" + std::to_string(i)));
    s.normalization.scale.push_back(meta.get_double("norm_scale_" + std::to_string(i)));
  }
  const std::size_t begins[] = {b.train_begin, b.val_begin, b.test_begin};
  const std::size_t ends[] = {b.train_end, b.val_end, b.test_end};
  for (std::size_t k = 0; k < 3; ++k) {
    ForecastInstance& inst = *instance(s, k);
    extract_windows(s.series, begins[k], ends[k], P, H, inst.history, inst.target.emplace());
    inst.base_forecast = read_forecast_csv(dir / ("base_" + std::string(kSplits[k]) + ".csv"));
    require_same_shape(inst.base_forecast, *inst.target, std::string("base_") + kSplits[k] + ".csv vs windows");
  }
  if (std::filesystem::exists(dir / "oracle_cross_train.csv")) {
    DatasetOracle o;
    o.cross_train = read_forecast_csv(dir / "oracle_cross_train.csv");
    o.cross_val = read_forecast_csv(dir / "oracle_cross_val.csv");
    o.cross_test = read_forecast_csv(dir / "oracle_cross_test.csv");
    o.noise_train = read_forecast_csv(dir / "oracle_noise_train.csv");
    o.noise_val = read_forecast_csv(dir / "oracle_noise_val.csv");
    o.noise_test = read_forecast_csv(dir / "oracle_noise_test.csv");
    out.oracle = std::move(o);
  }
  return out;
}

StoredDataset stored_from_synthetic(const SyntheticDataset& ds) {
  StoredDataset out;
  out.split = ds.split;
  out.source = "synthetic";
  out.baseline = "oracle";
  out.oracle = DatasetOracle{ds.train.cross_term, ds.val.cross_term, ds.test.cross_term,
                             ds.train.noise_part, ds.val.noise_part, ds.test.noise_part};
  return out;
}

std::vector<std::string> dataset_files(const StoredDataset& data) {
  std::vector<std::string> files{"meta.kv", "series.csv", "base_train.csv", "base_val.csv", "base_test.csv"};
  if (data.oracle) {
    for (const char* kind : {"cross", "noise"})
      for (const char* sp : kSplits) files.push_back(std::string("oracle_") + kind + "_" + sp + ".csv");
  }
  return files;
}

}  // namespace crc
