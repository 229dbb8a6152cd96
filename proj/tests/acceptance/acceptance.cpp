// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Tolerances and run sizes are fixed below. Every synthetic run shares the
// same audit for the validation guarantee (2) and clip containment (7).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "crc/config.hpp"
#include "crc/corrector.hpp"
#include "crc/encoder.hpp"
#include "crc/graph.hpp"
#include "crc/metrics.hpp"
#include "crc/mlp.hpp"
#include "crc/pipeline.hpp"
#include "crc/priors.hpp"
#include "crc/ridge.hpp"
#include "crc/rng.hpp"
#include "crc/safety.hpp"
#include "crc/synthetic.hpp"
#include "gradcheck.hpp"
#include "ridge_oracle.hpp"
#include "support.hpp"

namespace {

using namespace crc;

// sqrt(ln 20 / 400), 40 significant digits.
constexpr double kHoeffding200 = 0.08654091913011426690915043603275527832489;

constexpr double kRidgeOracleTol = 1e-6;
constexpr double kGradTol = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr double kHoeffdingTol = 1e-12;
constexpr double kPandFailureCeiling = 0.10;
constexpr double kRecoveryFloor = 0.80;
constexpr double kMinSnr = 4.0;
constexpr double kPointwiseBudgetSeconds = 120.0;
constexpr double kPandBudgetSeconds = 900.0;
constexpr double kEndToEndBudgetSeconds = 60.0;

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %2d  %s  %s: %s\n", id, pass ? "PASS" : "FAIL", title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int sign_of(double v) { return (v > 0) - (v < 0); }

double variance(const Tensor3& t) {
  const auto& v = t.values();
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

// Running tallies for the checks that apply to every synthetic run.
struct RunAudit {
  std::size_t guarantee_runs = 0, guarantee_violations = 0;
  std::size_t reverted_runs = 0, reverted_mismatches = 0;
  std::size_t clip_elements = 0, clip_violations = 0;

  // Validation guarantee, under the full firewall only.
  void guarantee(const PipelineResult& r, const ForecastInstance& val) {
    ++guarantee_runs;
    const Tensor3& y = val.target_or_throw();
    const double linear = mae(val.base_forecast + r.val.bundle.delta_ridge, y);
    const double deployed = mae(r.val.bundle.corrected, y);
    if (!(deployed <= linear)) ++guarantee_violations;
    if (!r.policy.active) {
      ++reverted_runs;
      const auto& a = r.val.bundle.corrected.values();
      const auto& b = val.base_forecast.values();
      if (a.size() != b.size() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) != 0)
        ++reverted_mismatches;
    }
  }

  void containment(const SafetyPolicy& p, const CorrectionBundle& bundle) {
    if (!p.active || !p.switches.clipping) return;
    const Tensor3& d = bundle.delta_clip;
    for (std::size_t b = 0; b < d.dim(0); ++b)
      for (std::size_t h = 0; h < d.dim(1); ++h)
        for (std::size_t i = 0; i < d.dim(2); ++i) {
          ++clip_elements;
          const double tau = p.tau(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h));
          if (std::abs(p.w2 * d(b, h, i)) > p.w2 * tau) ++clip_violations;
        }
  }

  void full(const PipelineResult& r, const ForecastInstance& val) {
    guarantee(r, val);
    containment(r.policy, r.val.bundle);
    containment(r.policy, r.test.bundle);
  }
};

RunAudit audit;

struct Prepared {
  SyntheticDataset ds;
  AdjacencyGraph graph;
};

Prepared prepare(const SyntheticSpec& spec, const Shape& shape, const RunConfig& cfg) {
  Prepared p{generate_synthetic(spec, shape), {}};
  p.graph = build_correlation_knn(p.ds.split.train_series(), cfg.knn_k);
  return p;
}

Shape shape_of(std::size_t nodes, std::size_t lookback, std::size_t horizon) {
  Shape s;
  s.nodes = nodes;
  s.lookback = lookback;
  s.horizon = horizon;
  return s;
}

// ---- 1: pointwise non-degradation of the audit gate + clip ---------------

void pointwise() {
  Clock clock;
  RunConfig cfg;
  cfg.encoder_epochs = 20;
  cfg.mlp_epochs = 30;
  cfg.mlp_lr = 1e-3;
  std::size_t elements = 0, min_elements = SIZE_MAX, aligned_bad = 0, exempt_bad = 0, admitted = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomSpecOptions o;
    o.nodes = 8;
    o.length = 1500;
    o.quadratic = 0.15;
    o.seed = seed;
    cfg.seed = seed;
    const auto prep = prepare(random_spec(o), shape_of(8, 96, 24), cfg);
    const auto r = run_pipeline(prep.ds.split, prep.graph, cfg);
    audit.full(r, prep.ds.split.val);

    const auto& val = prep.ds.split.val;
    const Tensor3 e = val.target_or_throw() - val.base_forecast - r.val.bundle.delta_ridge;
    const Tensor3 dp = audit_gate_clip(r.val.bundle.delta_mlp, e, r.policy.tau);
    elements += e.size();
    min_elements = std::min(min_elements, e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
      const double ek = e.values()[k], dk = dp.values()[k];
      if (dk != 0.0) ++admitted;
      if (std::abs(ek - dk) > std::abs(ek)) {
        if (sign_of(dk) == sign_of(ek)) ++aligned_bad;
        else ++exempt_bad;
      }
    }
  }
  const double t = clock.seconds();
  const bool pass = aligned_bad + exempt_bad == 0 && min_elements >= 2000 && t < kPointwiseBudgetSeconds;
  report(1, "pointwise non-degradation", pass,
         std::to_string(aligned_bad + exempt_bad) + " of " + std::to_string(elements) + " elements with |e - d'| > |e| (" +
             std::to_string(aligned_bad) + " sign-aligned, " + std::to_string(exempt_bad) +
             " admitted by the |d| <= tau/2 exemption with opposite sign; " + std::to_string(admitted) +
             " admitted in total), min " + std::to_string(min_elements) + " per run, " + fmt("%.1f s", t));
}

// ---- 3: PAND bound over independent resamples ---------------------------

void pand() {
  Clock clock;
  RunConfig cfg;
  cfg.encoder_epochs = 10;
  cfg.mlp_epochs = 20;
  cfg.mlp_lr = 1e-3;
  RandomSpecOptions o;
  o.nodes = 8;
  // About 400 validation windows per run. With much shorter segments the
  // correlated pair indicators push the miss rate past the ceiling.
  o.length = 3000;
  o.seed = 301;
  SyntheticSpec spec = random_spec(o);
  const std::size_t runs = 100;
  std::size_t below = 0, active = 0, m = 0;
  double bound_sum = 0.0, ndr_sum = 0.0;
  for (std::size_t k = 0; k < runs; ++k) {
    spec.seed = derive_seed(9000 + k, "resample");
    cfg.seed = 500 + k;
    const auto prep = prepare(spec, shape_of(8, 24, 25), cfg);
    const auto r = run_pipeline(prep.ds.split, prep.graph, cfg);
    audit.full(r, prep.ds.split.val);
    const auto& c = r.certificate;
    m = c.m;
    if (c.ndr_test < c.z_bar_val - hoeffding_term(c.m, 0.05)) ++below;
    if (r.policy.active) ++active;
    bound_sum += c.pand_bound;
    ndr_sum += c.ndr_test;
  }
  const double t = clock.seconds();
  const double rate = static_cast<double>(below) / static_cast<double>(runs);
  const bool pass = m == 200 && rate <= kPandFailureCeiling && t < kPandBudgetSeconds;
  report(3, "PAND bound validity", pass,
         std::to_string(below) + "/" + std::to_string(runs) + " runs below the bound (ceiling " +
             fmt("%.2f", kPandFailureCeiling) + "), m = " + std::to_string(m) + ", " + std::to_string(active) +
             " active, mean bound " + fmt("%.4f", bound_sum / runs) + ", mean test NDR " + fmt("%.4f", ndr_sum / runs) +
             ", " + fmt("%.1f s", t));
}

// ---- 4: ridge recoverability on the linear cross-term DGP ---------------

void recoverability() {
  RunConfig cfg;
  cfg.encoder_epochs = 20;
  PipelineOptions opt;
  opt.corrector = CorrectorMode::ridge_only;
  double worst = 1.0, min_snr = 1e300;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RandomSpecOptions o;
    o.nodes = 8;
    o.length = 2000;
    o.seed = seed;
    o.sigma = o.scale = 0.05;
    // Shrink the noise until the cross term dominates it by the required ratio.
    for (;;) {
      const auto ds = generate_synthetic(random_spec(o), shape_of(8, 96, 24));
      if (variance(ds.test.cross_term) >= kMinSnr * variance(ds.test.noise_part) || o.sigma < 1e-4) break;
      o.sigma = o.scale = o.sigma / 2.0;
    }
    cfg.seed = seed;
    const auto prep = prepare(random_spec(o), shape_of(8, 96, 24), cfg);
    const double snr = variance(prep.ds.test.cross_term) / variance(prep.ds.test.noise_part);
    const auto model = fit_corrector(prep.ds.split, prep.graph, cfg, opt);
    const auto d = predict_deltas(model, prep.ds.split.test.history, prep.graph);
    const double removed = 1.0 - variance(prep.ds.test.cross_term - d.ridge) / variance(prep.ds.test.cross_term);
    worst = std::min(worst, removed);
    min_snr = std::min(min_snr, snr);
    per_seed += (seed > 1 ? ", " : "") + fmt("%.4f", removed) + fmt(" (snr %.1f)", snr);
  }
  report(4, "ridge recoverability", worst >= kRecoveryFloor && min_snr >= kMinSnr,
         "removed cross-term variance per seed " + per_seed + "; floor " + fmt("%.2f", kRecoveryFloor));
}

// ---- 5: closed-form ridge vs gradient descent ---------------------------

void ridge_oracle() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> rows(13, 60), cols(1, 12);
  const double lambdas[] = {0.0, 0.01, 0.1, 1.0, 10.0};
  double worst = 0.0;
  for (int sys = 0; sys < 20; ++sys) {
    const int p = cols(rng);
    const int n = std::max(rows(rng), 2 * p + 2);
    const Matrix g = testing::random_matrix(n, p, 5000 + sys);
    const Matrix r = testing::random_matrix(n, 3, 6000 + sys);
    const double lambda = lambdas[sys % 5];
    const Eigen::Index free_tail = sys % 3 == 0 ? 1 : 0;
    const double lam = free_tail && lambda == 0.0 ? 0.5 : lambda;
    const Matrix w = solve_ridge(g, r, lam, free_tail);
    worst = std::max(worst, (w - testing::ridge_by_descent(g, r, lam, free_tail)).cwiseAbs().maxCoeff());
  }
  report(5, "closed-form ridge", worst < kRidgeOracleTol,
         "max elementwise gap to gradient descent over 20 systems " + fmt("%.2e", worst));
}

// ---- 6: gradient checks --------------------------------------------------

AdjacencyGraph ring(std::size_t n) {
  std::vector<std::vector<std::size_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i) nb[i] = {(i + 1) % n, (i + n - 1) % n};
  for (auto& v : nb) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return AdjacencyGraph::from_neighbors(nb);
}

void gradients() {
  using EB = EncoderParams::Block;
  const std::size_t Bn = 2, P = 8, N = 3, d = 4, H = 3;
  const auto g = ring(N);
  EncoderTrainingData data;
  data.history = testing::random_tensor(Bn, P, N, 601);
  const auto pr = compute_priors(data.history, g);
  data.priors = PriorScaler::fit(pr).apply(pr);
  data.residual = testing::random_tensor(Bn, H, N, 602);
  Rng rng(603);
  EncoderParams p = EncoderParams::initialized(P, d, rng);
  for (std::size_t blk = EB::proj_b; blk < EB::block_count; ++blk) p.weights.randomize(blk, 0.3, rng);
  Readout r(d + data.priors.dim(2), H);
  r.weights.randomize(Readout::weight, 0.3, rng);
  r.weights.randomize(Readout::bias, 0.3, rng);
  std::vector<std::size_t> idx(Bn);
  std::iota(idx.begin(), idx.end(), 0);
  EncoderParams gp;
  Readout gr;
  encoder_objective(p, r, data, g, idx, &gp, &gr);
  const auto enc_loss = [&] { return encoder_objective(p, r, data, g, idx, nullptr, nullptr); };
  const double enc = std::max(testing::check_gradient(p.weights.values(), gp.weights.values(), enc_loss, kGradStep).max_rel,
                              testing::check_gradient(r.weights.values(), gr.weights.values(), enc_loss, kGradStep).max_rel);

  using MB = MlpModel::Block;
  Rng mrng(604);
  MlpModel m = MlpModel::initialized(5, N, H, 6, 2, mrng);
  m.weights.randomize(MB::w2, 0.3, mrng);
  m.weights.randomize(MB::b2, 0.3, mrng);
  m.weights.randomize(MB::b1, 0.3, mrng);
  const Tensor3 x = testing::random_tensor(5, N, 5, 605);
  const Tensor3 t = testing::random_tensor(5, H, N, 606);
  std::vector<std::size_t> midx(5);
  std::iota(midx.begin(), midx.end(), 0);
  ParamSet grad;
  mlp_objective(m, x, t, midx, &grad);
  const auto mlp_loss = [&] { return mlp_objective(m, x, t, midx, nullptr); };
  const double mlp = testing::check_gradient(m.weights.values(), grad.values(), mlp_loss, kGradStep).max_rel;
  report(6, "gradient checks", enc < kGradTol && mlp < kGradTol,
         "max relative error encoder " + fmt("%.2e", enc) + ", MLP " + fmt("%.2e", mlp));
}

// ---- 8: ablation trend under heavy tails --------------------------------

void ablation() {
  RunConfig cfg;
  cfg.encoder_epochs = 15;
  cfg.mlp_epochs = 40;
  cfg.mlp_lr = 1e-3;
  double full = 0, no_clip = 0, no_gate = 0, unconstrained = 0;
  int clip_wins = 0, gate_wins = 0, mlp_wins = 0;  // seeds where the ablated variant beats full
  const int seeds = 10;
  for (int s = 1; s <= seeds; ++s) {
    RandomSpecOptions o;
    o.nodes = 8;
    o.length = 1500;
    o.noise = NoiseKind::student_t;
    o.nu = 3.0;
    o.scale = 0.1;
    o.quadratic = 0.1;
    o.seed = 800 + static_cast<std::uint64_t>(s);
    cfg.seed = o.seed;
    const auto prep = prepare(random_spec(o), shape_of(8, 48, 12), cfg);
    const auto& split = prep.ds.split;
    const auto model = fit_corrector(split, prep.graph, cfg);
    const auto test_ndr = [&](FirewallSwitches sw) {
      auto variant = model;
      variant.options.firewall = sw;
      const auto policy = calibrate_corrector(variant, split.val, prep.graph, cfg);
      const auto out = correct_split(variant, policy, split.test, prep.graph, "test");
      audit.containment(policy, out.bundle);
      return out.report.ndr;
    };
    const double f = test_ndr({});
    const double c = test_ndr({true, false, true, true});
    const double g = test_ndr({false, true, true, true});
    const auto um = fit_corrector(split, prep.graph, cfg, PipelineOptions::unconstrained_mlp());
    const auto up = calibrate_corrector(um, split.val, prep.graph, cfg);
    const double u = correct_split(um, up, split.test, prep.graph, "test").report.ndr;
    full += f;
    no_clip += c;
    no_gate += g;
    unconstrained += u;
    clip_wins += c > f;
    gate_wins += g > f;
    mlp_wins += u > f;
  }
  full /= seeds;
  no_clip /= seeds;
  no_gate /= seeds;
  unconstrained /= seeds;
  report(8, "ablation trend", full >= no_clip && full >= no_gate && full >= unconstrained,
         "mean test NDR full " + fmt("%.4f", full) + ", no clipping " + fmt("%.4f", no_clip) + ", no gating " +
             fmt("%.4f", no_gate) + ", unconstrained MLP " + fmt("%.4f", unconstrained) + " over 10 seeds; seeds where the variant beats full: " +
             std::to_string(clip_wins) + ", " + std::to_string(gate_wins) + ", " + std::to_string(mlp_wins));
}

// ---- 9: Hoeffding arithmetic --------------------------------------------

void hoeffding() {
  const double got = hoeffding_term(200, 0.05);
  report(9, "Hoeffding term", std::abs(got - kHoeffding200) <= kHoeffdingTol,
         "m = 200, confidence 0.05: " + fmt("%.17g", got) + ", gap " + fmt("%.1e", std::abs(got - kHoeffding200)));
}

// ---- 10: end-to-end runtime ---------------------------------------------

void end_to_end() {
  Clock clock;
  RunConfig cfg;
  RandomSpecOptions o;
  o.nodes = 8;
  o.length = 5000;
  o.seed = 1000;
  const auto prep = prepare(random_spec(o), shape_of(8, 96, 24), cfg);
  const auto r = run_pipeline(prep.ds.split, prep.graph, cfg);
  audit.full(r, prep.ds.split.val);
  const double t = clock.seconds();
  report(10, "end-to-end runtime", t < kEndToEndBudgetSeconds,
         fmt("%.1f s", t) + " for N = 8, 5000 steps, P = 96, H = 24 with default settings (budget " +
             fmt("%.0f s", kEndToEndBudgetSeconds) + "), certificate m = " + std::to_string(r.certificate.m));
}

// Without cross-node coupling the oracle residual is pure noise, so the
// policy should revert; this exercises the byte-identity half of criterion 2.
void uncoupled_runs(int k) {
  RunConfig cfg;
  cfg.encoder_epochs = 10;
  cfg.mlp_epochs = 20;
  cfg.mlp_lr = 1e-3;
  RandomSpecOptions o;
  o.nodes = 8;
  o.length = 1500;
  o.cross_strength = 0.0;
  o.seed = 77 + static_cast<std::uint64_t>(k);
  cfg.seed = o.seed;
  const auto prep = prepare(random_spec(o), shape_of(8, 96, 24), cfg);
  const auto r = run_pipeline(prep.ds.split, prep.graph, cfg);
  audit.full(r, prep.ds.split.val);
}

}  // namespace

int main() {
  // Run-level audits come last so they cover every synthetic run above.
  pointwise();
  pand();
  recoverability();
  ridge_oracle();
  gradients();
  ablation();
  hoeffding();
  end_to_end();
  for (int k = 0; k < 3; ++k) uncoupled_runs(k);
  report(2, "validation guarantee", audit.guarantee_violations == 0 && audit.reverted_mismatches == 0,
         std::to_string(audit.guarantee_violations) + " of " + std::to_string(audit.guarantee_runs) +
             " full-firewall runs with deployed validation MAE above linear-only; " +
             std::to_string(audit.reverted_mismatches) + " of " + std::to_string(audit.reverted_runs) +
             " reverted runs differing from the baseline bytes");
  report(7, "clip containment", audit.clip_violations == 0,
         std::to_string(audit.clip_violations) + " of " + std::to_string(audit.clip_elements) +
             " deployed elements with |w2 d_clip| > w2 tau");
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
