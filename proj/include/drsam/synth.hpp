#pragma once

// Synthetic labeled counter traces standing in for simulator output.
//
// Each feature j has a benign baseline N(mean[j], std[j]). Row kinds:
//   benign     baseline noise; each feature is independently "stressed" with
//              stress_trigger_prob and then raised by stress_shift * std[j],
//              at most floor(q/2) stressed features per row
//   attack     every feature raised by attack_shift[j] * std[j]
//   transient  a uniformly chosen subset of size in
//              [transient_min, transient_max] raised like an attack, the
//              rest at baseline; these sit at the edges of attack windows
// Values are clamped at zero and rounded to whole counts.
//
// Draw order per row: q normals (features in order), then the row kind's
// own draws (stress coins then cap shuffle, or subset size then subset
// shuffle). All randomness comes from one Rng per trace (see random.hpp).
// Noise is Gaussian; real counters are not, but the pipeline only consumes
// threshold crossings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "drsam/error.hpp"
#include "drsam/random.hpp"
#include "drsam/trace.hpp"

namespace drsam {

struct SynthConfig {
  std::uint64_t seed = 20240601;
  std::size_t q = 8;
  std::string workload_id = "synthetic";

  std::size_t n_benign = 5700;
  std::size_t n_attack = 5600;
  std::size_t n_transient = 100;
  std::size_t attack_windows = 4;

  // Counter baselines per sampling interval (standard schema order).
  std::vector<double> benign_base_mean{1200, 900, 800, 30000, 6000, 12000, 24000, 15000};
  std::vector<double> benign_base_std{600, 450, 400, 15000, 3000, 6000, 12000, 7500};

  std::vector<double> attack_shift{6, 6, 6, 6, 6, 6, 6, 6};  // in std units
  double return_variant_fetch_stall_shift = 5.0;               // return variant keeps fetch stalls lower
  std::size_t fetch_stall_feature = 4;

  double stress_trigger_prob = 0.05;
  double stress_shift = 4.0;

  std::size_t transient_min = 5;  // q-3
  std::size_t transient_max = 7;  // q-1

  // Test-case layout.
  std::size_t attack_trace_benign = 100;  // benign rows inside the Test Case 1 attack run
  std::size_t benchmark_rows = 12000;
  double benchmark_attack_fraction = 0.03;

  void validate() const {
    auto fail = [](const std::string& m) { throw ValidationError("synth config: " + m); };
    if (q == 0 || q > kMaxFeatures) fail("q must be in [1, " + std::to_string(kMaxFeatures) + "]");
    if (benign_base_mean.size() != q || benign_base_std.size() != q || attack_shift.size() != q) {
      fail("per-feature vectors must have length q");
    }
    for (std::size_t j = 0; j < q; ++j) {
      if (!(benign_base_mean[j] >= 0.0) || !std::isfinite(benign_base_mean[j])) fail("baseline means must be >= 0");
      if (!(benign_base_std[j] > 0.0) || !std::isfinite(benign_base_std[j])) fail("baseline std must be > 0");
      if (!(attack_shift[j] > 3.0) || !std::isfinite(attack_shift[j])) fail("attack_shift must exceed 3 (sigma units)");
    }
    if (!(return_variant_fetch_stall_shift > 3.0)) fail("return_variant_fetch_stall_shift must exceed 3");
    if (!(stress_trigger_prob >= 0.0 && stress_trigger_prob <= 0.5)) {
      fail("stress_trigger_prob must lie in [0, 0.5] so benign rows stress at most q/2 features on average");
    }
    if (!(stress_shift >= 0.0) || !std::isfinite(stress_shift)) fail("stress_shift must be >= 0");
    if (transient_min < 1 || transient_min > transient_max || transient_max > q) {
      fail("transient range must satisfy 1 <= min <= max <= q");
    }
    if (!(benchmark_attack_fraction >= 0.0 && benchmark_attack_fraction <= 1.0)) {
      fail("benchmark_attack_fraction must lie in [0,1]");
    }
  }

  std::vector<double> return_variant_shift() const {
    auto s = attack_shift;
    if (fetch_stall_feature < s.size()) s[fetch_stall_feature] = return_variant_fetch_stall_shift;
    return s;
  }
};

namespace detail {

enum class RowKind { Benign, Attack, Transient };

struct Segment {
  RowKind kind;
  std::size_t rows;
  const std::vector<double>* shift = nullptr;  // attack/transient elevation
};

// n split into k near-equal parts, larger parts first.
inline std::vector<std::size_t> even_parts(std::size_t n, std::size_t k) {
  std::vector<std::size_t> parts(k, k ? n / k : 0);
  for (std::size_t i = 0; i < (k ? n % k : 0); ++i) ++parts[i];
  return parts;
}

struct AttackWindow {
  std::size_t attack = 0;
  std::size_t transient = 0;
  const std::vector<double>* shift = nullptr;
};

// Benign gaps around windows: gap, window, gap, window, ..., gap.
inline std::vector<Segment> layout(std::size_t n_benign, const std::vector<AttackWindow>& windows) {
  std::vector<Segment> segs;
  const auto gaps = even_parts(n_benign, windows.size() + 1);
  for (std::size_t w = 0; w <= windows.size(); ++w) {
    if (gaps[w]) segs.push_back({RowKind::Benign, gaps[w], nullptr});
    if (w == windows.size()) break;
    const auto& win = windows[w];
    const auto lead = win.transient / 2 + win.transient % 2;
    if (lead) segs.push_back({RowKind::Transient, lead, win.shift});
    if (win.attack) segs.push_back({RowKind::Attack, win.attack, win.shift});
    if (win.transient - lead) segs.push_back({RowKind::Transient, win.transient - lead, win.shift});
  }
  return segs;
}

inline WorkloadTrace render(const SynthConfig& cfg, std::string id, const std::vector<double>& mean,
                            const std::vector<double>& sd, const std::vector<Segment>& segs, std::uint64_t seed) {
  Rng rng(seed);
  const auto q = cfg.q;
  const std::size_t stress_cap = q / 2;
  WorkloadTrace t;
  t.workload_id = std::move(id);
  std::vector<std::size_t> order(q);
  std::vector<double> lift(q);
  for (const auto& seg : segs) {
    for (std::size_t r = 0; r < seg.rows; ++r) {
      std::vector<double> row(q);
      for (std::size_t j = 0; j < q; ++j) row[j] = mean[j] + sd[j] * rng.normal();
      std::fill(lift.begin(), lift.end(), 0.0);
      switch (seg.kind) {
        case RowKind::Benign: {
          std::vector<std::size_t> stressed;
          for (std::size_t j = 0; j < q; ++j) {
            if (rng.uniform() < cfg.stress_trigger_prob) stressed.push_back(j);
          }
          if (stressed.size() > stress_cap) {
            rng.shuffle(std::span<std::size_t>(stressed));
            stressed.resize(stress_cap);
          }
          for (auto j : stressed) lift[j] = cfg.stress_shift;
          break;
        }
        case RowKind::Attack:
          lift = *seg.shift;
          break;
        case RowKind::Transient: {
          const auto size = cfg.transient_min + rng.below(cfg.transient_max - cfg.transient_min + 1);
          std::iota(order.begin(), order.end(), std::size_t{0});
          rng.shuffle(std::span<std::size_t>(order));
          for (std::size_t k = 0; k < size; ++k) lift[order[k]] = (*seg.shift)[order[k]];
          break;
        }
      }
      for (std::size_t j = 0; j < q; ++j) row[j] = std::max(0.0, std::round(row[j] + lift[j] * sd[j]));
      t.values.push_back(std::move(row));
      t.labels.push_back(seg.kind == RowKind::Benign ? 0 : 1);
    }
  }
  return t;
}

inline std::vector<AttackWindow> windows_for(std::size_t n_attack, std::size_t n_transient, std::size_t count,
                                             const std::vector<const std::vector<double>*>& shifts) {
  if (n_attack + n_transient == 0 || count == 0) return {};
  const auto a = even_parts(n_attack, count);
  const auto tr = even_parts(n_transient, count);
  std::vector<AttackWindow> ws;
  for (std::size_t w = 0; w < count; ++w) ws.push_back({a[w], tr[w], shifts[w % shifts.size()]});
  return ws;
}

}  // namespace detail

// One trace: n_benign benign rows around attack_windows windows, each window
// an attack block flanked by transient rows.
inline WorkloadTrace generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto windows = detail::windows_for(cfg.n_attack, cfg.n_transient, cfg.attack_windows, {&cfg.attack_shift});
  return detail::render(cfg, cfg.workload_id, cfg.benign_base_mean, cfg.benign_base_std,
                        detail::layout(cfg.n_benign, windows), cfg.seed);
}

inline const std::vector<std::string>& test_case_benchmarks(int tc_id) {
  static const std::vector<std::string> tc2{"aes", "sha512", "dhrystone", "norx"};
  static const std::vector<std::string> tc3{"qsort", "prime", "miniz"};
  static const std::vector<std::string> tc4{"aes", "sha512", "dhrystone", "norx", "qsort", "prime", "miniz"};
  static const std::vector<std::string> none;
  switch (tc_id) {
    case 2: return tc2;
    case 3: return tc3;
    case 4: return tc4;
    default: return none;
  }
}

// Traces for one of the four test cases:
//   1: "os" (benign operating-system activity) and "fault" (fault-variant
//      attack run), with roughly balanced classes overall
//   2-4: one trace per listed benchmark, each interleaving fault- and
//      return-variant attack windows into benign benchmark activity
// Each benchmark has its own counter profile, a fixed per-feature rescaling
// of the baseline derived from its name.
inline std::vector<WorkloadTrace> generate_test_case(int tc_id, const SynthConfig& cfg) {
  cfg.validate();
  if (tc_id < 1 || tc_id > 4) throw ValidationError("test case id must be 1..4, got " + std::to_string(tc_id));
  const auto stream = [&](std::string_view name) {
    return derive_seed(cfg.seed, fnv1a(name) ^ static_cast<std::uint64_t>(tc_id));
  };

  std::vector<WorkloadTrace> out;
  if (tc_id == 1) {
    out.push_back(detail::render(cfg, "os", cfg.benign_base_mean, cfg.benign_base_std,
                                 detail::layout(cfg.n_benign, {}), stream("os")));
    const auto windows = detail::windows_for(cfg.n_attack, cfg.n_transient, cfg.attack_windows, {&cfg.attack_shift});
    out.push_back(detail::render(cfg, "fault", cfg.benign_base_mean, cfg.benign_base_std,
                                 detail::layout(cfg.attack_trace_benign, windows), stream("fault")));
    return out;
  }

  const auto ret_shift = cfg.return_variant_shift();
  const std::vector<const std::vector<double>*> variants{&cfg.attack_shift, &ret_shift};
  const auto n_attack_rows = static_cast<std::size_t>(std::llround(cfg.benchmark_rows * cfg.benchmark_attack_fraction));
  const auto n_transient = cfg.n_attack ? n_attack_rows * cfg.n_transient / cfg.n_attack : 0;
  const auto n_attack = n_attack_rows - std::min(n_transient, n_attack_rows);
  const auto n_benign = cfg.benchmark_rows - std::min(cfg.benchmark_rows, n_attack_rows);
  const auto window_count = std::max<std::size_t>(cfg.attack_windows, 2);

  for (const auto& name : test_case_benchmarks(tc_id)) {
    Rng profile(fnv1a(name));
    std::vector<double> mean(cfg.q), sd(cfg.q);
    for (std::size_t j = 0; j < cfg.q; ++j) {
      const double scale = 0.5 + profile.uniform();
      mean[j] = cfg.benign_base_mean[j] * scale;
      sd[j] = cfg.benign_base_std[j] * scale;
    }
    const auto windows = detail::windows_for(n_attack, n_transient, window_count, variants);
    out.push_back(detail::render(cfg, name, mean, sd, detail::layout(n_benign, windows), stream(name)));
  }
  return out;
}

}  // namespace drsam
