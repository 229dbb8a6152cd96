#include "crc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "crc/error.hpp"
#include "crc/rng.hpp"

namespace crc {

namespace {

constexpr double kDivergenceLimit = 1e8;

std::vector<double> split_list(const std::string& s, const std::string& context) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, context));
  return out;
}

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

// Value of node i at lag l (1-based) relative to step `t` inside a rollout
// buffer whose columns hold the already-known path.
struct Path {
  const Matrix& values;  // [time x N]
  double at(std::ptrdiff_t t, std::size_t node) const {
    return values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(node));
  }
};

double self_part(const SyntheticSpec& spec, const Path& p, std::ptrdiff_t t, std::size_t i) {
  double v = 0.0;
  const auto& ar = spec.self_ar[i];
  for (std::size_t l = 1; l <= ar.size(); ++l) v += ar[l - 1] * p.at(t - static_cast<std::ptrdiff_t>(l), i);
  return v;
}

double cross_part(const SyntheticSpec& spec, const Path& p, std::ptrdiff_t t, std::size_t i) {
  double v = 0.0;
  for (const auto& c : spec.cross[i]) {
    for (std::size_t l = 1; l <= c.lags.size(); ++l)
      v += c.lags[l - 1] * p.at(t - static_cast<std::ptrdiff_t>(l), c.source);
    if (c.quadratic != 0.0) {
      const double x = p.at(t - 1, c.source);
      v += c.quadratic * x * x;
    }
  }
  return v;
}

Tensor3 rollout(const SyntheticSpec& spec, const Tensor3& history,
                const std::vector<std::size_t>& start_time, std::size_t horizon, bool with_cross) {
  const std::size_t B = history.dim(0), P = history.dim(1), N = history.dim(2);
  if (N != spec.nodes) throw ShapeMismatch("history node count differs from spec");
  if (start_time.size() != B) throw ShapeMismatch("one start time per window required");
  if (spec.max_lag() > P) throw ShapeMismatch("lookback shorter than the process lag order");
  Tensor3 out(B, horizon, N);
  Matrix buf(static_cast<Eigen::Index>(P + horizon), static_cast<Eigen::Index>(N));
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t i = 0; i < N; ++i)
        buf(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = history(b, p, i);
    const Path path{buf};
    for (std::size_t h = 0; h < horizon; ++h) {
      const auto t = static_cast<std::ptrdiff_t>(P + h);
      const double time = static_cast<double>(spec.burn_in + start_time[b] + P + h);
      for (std::size_t i = 0; i < N; ++i) {
        double v = self_part(spec, path, t, i) + spec.forcing(i, time);
        if (with_cross) v += cross_part(spec, path, t, i);
        buf(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = v;
        out(b, h, i) = v;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::size_t> SyntheticSpec::parents(std::size_t node) const {
  std::vector<std::size_t> out;
  for (const auto& c : cross[node]) out.push_back(c.source);
  return out;
}

std::size_t SyntheticSpec::max_lag() const {
  std::size_t lag = 1;
  for (const auto& ar : self_ar) lag = std::max(lag, ar.size());
  for (const auto& terms : cross)
    for (const auto& c : terms) lag = std::max(lag, c.lags.size());
  return lag;
}

double SyntheticSpec::forcing(std::size_t node, double time) const {
  const double a = forcing_amplitude.empty() ? 0.0 : forcing_amplitude[node];
  if (a == 0.0) return 0.0;
  const double phase = forcing_phase.empty() ? 0.0 : forcing_phase[node];
  return a * std::sin(2.0 * std::numbers::pi * time / forcing_period + phase);
}

void SyntheticSpec::validate_structure() const {
  if (nodes == 0) throw ConfigError("synthetic spec needs at least one node");
  if (self_ar.size() != nodes || cross.size() != nodes)
    throw ConfigError("self_ar and cross must have one entry per node");
  if (!forcing_amplitude.empty() && forcing_amplitude.size() != nodes)
    throw ConfigError("forcing_amplitude must have one entry per node");
  if (!forcing_phase.empty() && forcing_phase.size() != nodes)
    throw ConfigError("forcing_phase must have one entry per node");
  if (!(forcing_period > 0.0)) throw ConfigError("forcing_period must be positive");
  for (std::size_t i = 0; i < nodes; ++i) {
    std::vector<std::size_t> seen;
    for (const auto& c : cross[i]) {
      if (c.source >= nodes) throw ConfigError("cross term source out of range");
      if (c.source == i) throw ConfigError("parent set of node " + std::to_string(i) + " contains itself");
      if (std::find(seen.begin(), seen.end(), c.source) != seen.end())
        throw ConfigError("duplicate parent in node " + std::to_string(i));
      seen.push_back(c.source);
    }
  }
  if (noise == NoiseKind::gaussian && !(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
  if (noise == NoiseKind::student_t && (!(nu > 0.0) || !(scale >= 0.0)))
    throw ConfigError("student-t needs nu > 0 and scale >= 0");
}

double SyntheticSpec::spectral_radius() const {
  const std::size_t L = max_lag();
  const auto dim = static_cast<Eigen::Index>(nodes * L);
  Matrix companion = Matrix::Zero(dim, dim);
  // Block row 0 maps the stacked lags [x_{t-1}; ...; x_{t-L}] to x_t.
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t l = 1; l <= self_ar[i].size(); ++l)
      companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((l - 1) * nodes + i)) +=
          self_ar[i][l - 1];
    for (const auto& c : cross[i])
      for (std::size_t l = 1; l <= c.lags.size(); ++l)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((l - 1) * nodes + c.source)) +=
            c.lags[l - 1];
  }
  for (Eigen::Index r = static_cast<Eigen::Index>(nodes); r < dim; ++r)
    companion(r, r - static_cast<Eigen::Index>(nodes)) = 1.0;
  Eigen::EigenSolver<Matrix> es(companion, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

KvFile SyntheticSpec::to_kv() const {
  KvFile kv;
  kv.set_int("nodes", static_cast<long long>(nodes));
  kv.set_int("length", static_cast<long long>(length));
  kv.set_int("burn_in", static_cast<long long>(burn_in));
  kv.set("seed", std::to_string(seed));
  kv.set("noise", std::string(noise == NoiseKind::gaussian ? "gaussian" : "student_t"));
  kv.set("sigma", sigma);
  kv.set("nu", nu);
  kv.set("scale", scale);
  kv.set("forcing_period", forcing_period);
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::string n = std::to_string(i);
    kv.set("ar_" + n, join_list(self_ar[i]));
    kv.set("amplitude_" + n, forcing_amplitude.empty() ? 0.0 : forcing_amplitude[i]);
    kv.set("phase_" + n, forcing_phase.empty() ? 0.0 : forcing_phase[i]);
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    for (const auto& c : cross[i]) {
      const std::string edge = std::to_string(c.source) + "_to_" + std::to_string(i);
      kv.set("cross_" + edge, join_list(c.lags));
      if (c.quadratic != 0.0) kv.set("quad_" + edge, c.quadratic);
    }
  }
  return kv;
}

SyntheticSpec SyntheticSpec::from_kv(const KvFile& kv) {
  SyntheticSpec s;
  const long long n = kv.get_int("nodes");
  if (n <= 0) throw ConfigError("nodes must be positive");
  s.nodes = static_cast<std::size_t>(n);
  s.self_ar.assign(s.nodes, {});
  s.cross.assign(s.nodes, {});
  s.forcing_amplitude.assign(s.nodes, 0.0);
  s.forcing_phase.assign(s.nodes, 0.0);
  std::vector<std::pair<std::string, double>> quads;
  for (const auto& [key, value] : kv.entries()) {
    const auto starts = [&](const char* prefix) { return key.rfind(prefix, 0) == 0; };
    const auto node_index = [&](std::size_t prefix_len) {
      const long long i = parse_int(key.substr(prefix_len), key);
      if (i < 0 || static_cast<std::size_t>(i) >= s.nodes) throw ConfigError(key + ": node out of range");
      return static_cast<std::size_t>(i);
    };
    if (key == "nodes") continue;
    if (key == "length") s.length = static_cast<std::size_t>(kv.get_int(key));
    else if (key == "burn_in") s.burn_in = static_cast<std::size_t>(kv.get_int(key));
    else if (key == "seed") s.seed = kv.get_uint(key);
    else if (key == "noise") {
      if (value == "gaussian") s.noise = NoiseKind::gaussian;
      else if (value == "student_t") s.noise = NoiseKind::student_t;
      else throw ConfigError("noise must be gaussian or student_t");
    } else if (key == "sigma") s.sigma = kv.get_double(key);
    else if (key == "nu") s.nu = kv.get_double(key);
    else if (key == "scale") s.scale = kv.get_double(key);
    else if (key == "forcing_period") s.forcing_period = kv.get_double(key);
    else if (starts("ar_")) s.self_ar[node_index(3)] = split_list(value, key);
    else if (starts("amplitude_")) s.forcing_amplitude[node_index(10)] = kv.get_double(key);
    else if (starts("phase_")) s.forcing_phase[node_index(6)] = kv.get_double(key);
    else if (starts("cross_") || starts("quad_")) {
      const bool quad = starts("quad_");
      const std::string edge = key.substr(quad ? 5 : 6);
      const auto sep = edge.find("_to_");
      if (sep == std::string::npos) throw ConfigError(key + ": expected <source>_to_<target>");
      const long long src = parse_int(edge.substr(0, sep), key);
      const long long dst = parse_int(edge.substr(sep + 4), key);
      if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= s.nodes ||
          static_cast<std::size_t>(dst) >= s.nodes)
        throw ConfigError(key + ": node out of range");
      if (quad) {
        quads.emplace_back(edge, kv.get_double(key));
        continue;
      }
      CrossTerm c;
      c.source = static_cast<std::size_t>(src);
      c.lags = split_list(value, key);
      s.cross[static_cast<std::size_t>(dst)].push_back(std::move(c));
    } else {
      throw ConfigError("unknown synthetic spec key '" + key + "'");
    }
  }
  for (const auto& [edge, q] : quads) {
    const auto sep = edge.find("_to_");
    const auto src = static_cast<std::size_t>(parse_int(edge.substr(0, sep), edge));
    const auto dst = static_cast<std::size_t>(parse_int(edge.substr(sep + 4), edge));
    auto& terms = s.cross[dst];
    auto it = std::find_if(terms.begin(), terms.end(), [&](const CrossTerm& c) { return c.source == src; });
    if (it == terms.end()) {
      CrossTerm c;
      c.source = src;
      c.quadratic = q;
      terms.push_back(c);
    } else {
      it->quadratic = q;
    }
  }
  s.validate_structure();
  return s;
}

SyntheticSpec random_spec(const RandomSpecOptions& o) {
  Rng rng = make_rng(o.seed, "random_spec");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SyntheticSpec s;
    s.nodes = o.nodes;
    s.self_ar.assign(o.nodes, {});
    s.cross.assign(o.nodes, {});
    s.forcing_amplitude.assign(o.nodes, o.forcing_amplitude);
    s.forcing_phase.assign(o.nodes, 0.0);
    s.forcing_period = o.forcing_period;
    s.noise = o.noise;
    s.sigma = o.sigma;
    s.nu = o.nu;
    s.scale = o.scale;
    s.length = o.length;
    s.seed = derive_seed(o.seed, "series");
    for (std::size_t i = 0; i < o.nodes; ++i) {
      s.forcing_phase[i] = phase(rng);
      for (std::size_t l = 0; l < o.ar_order; ++l)
        s.self_ar[i].push_back(unit(rng) * (l == 0 ? 0.6 : 0.2));
      if (o.nodes < 2 || o.max_parents == 0) continue;
      std::uniform_int_distribution<std::size_t> count(1, std::min(o.max_parents, o.nodes - 1));
      const std::size_t k = count(rng);
      std::vector<std::size_t> pool;
      for (std::size_t j = 0; j < o.nodes; ++j)
        if (j != i) pool.push_back(j);
      std::shuffle(pool.begin(), pool.end(), rng);
      for (std::size_t p = 0; p < k; ++p) {
        CrossTerm c;
        c.source = pool[p];
        for (std::size_t l = 0; l < o.cross_lags; ++l)
          c.lags.push_back(o.cross_strength * unit(rng) / static_cast<double>(l + 1));
        c.quadratic = o.quadratic * unit(rng);
        s.cross[i].push_back(std::move(c));
      }
    }
    if (s.spectral_radius() < 0.95) return s;
  }
  throw UnstableSystem("could not draw a stable random spec");
}

Matrix simulate_series(const SyntheticSpec& spec) {
  spec.validate_structure();
  const double rho = spec.spectral_radius();
  if (!(rho < 1.0)) {
    throw UnstableSystem("companion spectral radius " + format_double(rho) + " >= 1");
  }
  const std::size_t N = spec.nodes;
  const std::size_t L = spec.max_lag();
  const std::size_t total = spec.burn_in + spec.length;
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(total + L), static_cast<Eigen::Index>(N));
  Rng rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::student_t_distribution<double> student(spec.noise == NoiseKind::student_t ? spec.nu : 1.0);
  const Path path{x};
  for (std::size_t step = 0; step < total; ++step) {
    const auto t = static_cast<std::ptrdiff_t>(step + L);
    for (std::size_t i = 0; i < N; ++i) {
      const double eps = spec.noise == NoiseKind::gaussian ? spec.sigma * gauss(rng)
                                                           : spec.scale * student(rng);
      const double v = self_part(spec, path, t, i) + spec.forcing(i, static_cast<double>(step)) +
                       cross_part(spec, path, t, i) + eps;
      if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit) {
        throw UnstableSystem("simulated path diverged at step " + std::to_string(step));
      }
      x(t, static_cast<Eigen::Index>(i)) = v;
    }
  }
  return x.bottomRows(static_cast<Eigen::Index>(spec.length));
}

Tensor3 oracle_baseline(const SyntheticSpec& spec, const Tensor3& history,
                        const std::vector<std::size_t>& start_time, std::size_t horizon) {
  return rollout(spec, history, start_time, horizon, false);
}

Tensor3 full_rollout(const SyntheticSpec& spec, const Tensor3& history,
                     const std::vector<std::size_t>& start_time, std::size_t horizon) {
  return rollout(spec, history, start_time, horizon, true);
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, const Shape& shape,
                                    const SplitFractions& fractions) {
  if (shape.nodes != spec.nodes) throw ShapeMismatch("shape.nodes differs from spec.nodes");
  if (shape.lookback < 2) throw ConfigError("lookback must be at least 2");
  SyntheticDataset ds;
  DatasetSplit& split = ds.split;
  split.series = simulate_series(spec);
  split.bounds = make_bounds(spec.length, fractions, shape.lookback, shape.horizon);
  for (std::size_t i = 0; i < spec.nodes; ++i) split.node_names.push_back("x" + std::to_string(i));

  const auto build = [&](std::size_t begin, std::size_t end, ForecastInstance& inst,
                         SyntheticSplitOracle& oracle) {
    Tensor3 target;
    extract_windows(split.series, begin, end, shape.lookback, shape.horizon, inst.history, target);
    oracle.start_time.resize(inst.history.dim(0));
    for (std::size_t s = 0; s < oracle.start_time.size(); ++s) oracle.start_time[s] = begin + s;
    inst.base_forecast = oracle_baseline(spec, inst.history, oracle.start_time, shape.horizon);
    const Tensor3 full = full_rollout(spec, inst.history, oracle.start_time, shape.horizon);
    oracle.cross_term = full - inst.base_forecast;
    oracle.noise_part = target - full;
    inst.target = std::move(target);
  };
  build(split.bounds.train_begin, split.bounds.train_end, split.train, ds.train);
  build(split.bounds.val_begin, split.bounds.val_end, split.val, ds.val);
  build(split.bounds.test_begin, split.bounds.test_end, split.test, ds.test);
  return ds;
}

}  // namespace crc
