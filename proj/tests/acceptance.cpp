// Acceptance checks: one PASS/FAIL line per criterion, exit 1 on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "noisydet/anchors.hpp"
#include "noisydet/froc.hpp"
#include "noisydet/geom.hpp"
#include "noisydet/io.hpp"
#include "noisydet/losses.hpp"
#include "noisydet/mining.hpp"
#include "noisydet/noise.hpp"
#include "noisydet/rng.hpp"
#include "noisydet/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace noisydet;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("noisydet_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs synth -> inject-noise x4 -> census -> eval-froc in `dir`.
std::vector<CensusRow> run_pipeline(const fs::path& dir, std::size_t images) {
  std::ostringstream sink;
  cli::SynthOptions s;
  s.output = dir / "clean.csv";
  s.detections = dir / "detections.csv";
  s.images = images;
  cli::synth(s, sink);

  cli::CensusOptions c;
  c.annotations.push_back("clean=" + s.output.string());
  for (int mu = 0; mu <= 3; ++mu) {
    cli::InjectNoiseOptions o;
    o.input = s.output;
    o.output = dir / ("mu" + std::to_string(mu) + ".csv");
    o.mu = mu;
    o.seed = 7;
    cli::inject_noise(o, sink);
    c.annotations.push_back("mu" + std::to_string(mu) + "=" + o.output.string());
  }
  c.out = dir / "census.csv";
  cli::census(c, sink);

  cli::EvalFrocOptions f;
  f.detections = dir / "detections.csv";
  f.ground_truth = s.output;
  f.bootstrap = 200;
  f.cases = images;
  f.seed = 11;
  f.out = dir / "froc";
  cli::eval_froc(f, sink);

  std::istringstream in(io::read_file(c.out));
  return io::read_census(in);
}

Outcome census_ordering(double& seconds) {
  Outcome r;
  const auto dir = scratch("census");
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_pipeline(dir, 200);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fs::remove_all(dir);
  r.require(rows.size() == 15, "expected 15 census rows");
  if (rows.size() != 15) return r;
  double growth[3];
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t l = 1; l < 5; ++l) {
      r.require(rows[c * 5 + l].positives_per_lesion >= rows[c * 5 + l - 1].positives_per_lesion,
                rows[c * 5].criterion + " not monotone at " + rows[c * 5 + l].level);
    }
    growth[c] = rows[c * 5 + 4].positives_per_lesion / rows[c * 5].positives_per_lesion;
  }
  const double iou = growth[0], centroid = growth[1], expiou = growth[2];
  r.require(expiou < iou && iou < centroid, "growth order exp_iou < iou < centroid violated");
  r.require(expiou <= 3.0, "exp_iou growth above 3x");
  r.require(iou >= 4.0, "iou growth below 4x");
  r.require(seconds < 60.0, "runtime above 60 s");
  r.detail += (r.detail.empty() ? "" : "; ") + std::string("growth iou=") + fmt("%.2f", iou) +
              " centroid=" + fmt("%.2f", centroid) + " exp_iou=" + fmt("%.2f", expiou);
  return r;
}

Outcome noise_distribution(double& seconds) {
  Outcome r;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_atom = 0, worst_ks = 0, mean0 = 0;
  for (int mu = 0; mu <= 3; ++mu) {
    NoiseConfig cfg;
    cfg.mu = mu;
    cfg.seed = 1000 + static_cast<std::uint64_t>(mu);
    CounterRng rng(cfg.seed);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_noise_factor(cfg, rng);
    const double atom = static_cast<double>(std::count(xs.begin(), xs.end(), 0.0)) / static_cast<double>(xs.size());
    worst_atom = std::max(worst_atom, std::abs(atom - oracle::phi(-mu)));
    worst_ks = std::max(worst_ks, oracle::ks_positive_part(xs, mu, cfg.clip_high));
    if (mu == 0) {
      double s = 0;
      for (double x : xs) s += x;
      mean0 = s / static_cast<double>(xs.size());
    }
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.require(worst_atom <= 0.01, "atom at 0 off by more than 0.01");
  r.require(worst_ks < 0.01, "KS statistic >= 0.01");
  r.require(std::abs(mean0 - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 0.01, "mean at mu=0 off");
  r.require(seconds < 5.0, "runtime above 5 s");
  r.detail += (r.detail.empty() ? "" : "; ") + std::string("max|atom-phi|=") + fmt("%.4f", worst_atom) +
              " maxKS=" + fmt("%.4f", worst_ks) + " mean0=" + fmt("%.4f", mean0);
  return r;
}

Outcome geometry_oracle(double&) {
  Outcome r;
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> pos(0, 60);
  std::uniform_int_distribution<int> size(1, 40);
  double worst_iou = 0, worst_exp = 0;
  for (int i = 0; i < 10000; ++i) {
    int x = pos(gen), y = pos(gen);
    const Box a(x, y, x + size(gen), y + size(gen));
    x = pos(gen), y = pos(gen);
    const Box b(x, y, x + size(gen), y + size(gen));
    worst_iou = std::max(worst_iou, std::abs(iou(a, b) - oracle::iou_unit_cells(a, b)));
    worst_exp = std::max(worst_exp, static_cast<double>(std::abs(
                                        static_cast<long double>(exp_iou(a, b, 0.1)) -
                                        oracle::exp_iou_extended(a, b, 0.1L))));
  }
  const double worked = exp_iou(Box(0, 0, 10, 10), Box(5, 5, 15, 15), 0.1);
  r.require(worst_iou <= 1e-12, "iou differs from unit-cell count");
  r.require(worst_exp <= 1e-12, "exp_iou differs from extended-precision value");
  r.require(std::abs(worked - 0.31796) <= 1e-5, "worked example off");
  r.detail += (r.detail.empty() ? "" : "; ") + std::string("worked=") + fmt("%.6f", worked) +
              " max_err_iou=" + fmt("%.1e", worst_iou) + " max_err_exp=" + fmt("%.1e", worst_exp);
  return r;
}

Outcome nms_oracle(double&) {
  Outcome r;
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> pos(0, 300);
  std::uniform_real_distribution<double> size(5, 80);
  std::uniform_int_distribution<int> coarse(0, 20);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::vector<Detection> dets;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = pos(gen), y = pos(gen);
      dets.push_back({"img", Box(x, y, x + size(gen), y + size(gen)), coarse(gen) / 20.0});
    }
    const double thr = static_cast<double>(gen() % 11) / 10.0;
    const auto kept = nms(dets, thr, 300);
    const auto ref = oracle::nms_reference(dets, thr, 300);
    bool same = kept.size() == ref.size();
    for (std::size_t i = 0; same && i < ref.size(); ++i) {
      same = kept[i].box == dets[ref[i]].box && kept[i].score == dets[ref[i]].score;
    }
    mismatches += same ? 0 : 1;
  }
  r.require(mismatches == 0, std::to_string(mismatches) + " instances differ from reference");
  return r;
}

Outcome froc_oracle(double&) {
  Outcome r;
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> coord(0, 80);
  std::uniform_int_distribution<int> size(5, 30);
  std::uniform_int_distribution<int> score(1, 6);
  std::size_t mismatches = 0, duplicate_changes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> images;
    for (std::size_t i = 0, n = 1 + gen() % 5; i < n; ++i) images.push_back("img" + std::to_string(i));
    std::vector<Annotation> gts;
    for (std::size_t l = 0, n = 1 + gen() % 6; l < n; ++l) {
      const int x = coord(gen), y = coord(gen);
      gts.push_back({images[gen() % images.size()], "l" + std::to_string(l), Box(x, y, x + size(gen), y + size(gen)),
                     100, 100, ""});
    }
    std::vector<Detection> dets;
    for (std::size_t d = 0, n = gen() % 11; d < n; ++d) {
      const int x = coord(gen), y = coord(gen);
      dets.push_back({images[gen() % images.size()], Box(x, y, x + size(gen), y + size(gen)), score(gen) / 6.0});
    }
    const auto curve = froc_curve(dets, gts, images);
    if (curve.points != oracle::froc_enumeration(dets, gts, images.size(), 2.0).points) ++mismatches;

    const auto labels = classify_detections(dets, gts, images);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (labels[d].outcome != MarkOutcome::TruePositive) continue;
      auto extra = dets;
      extra.push_back({dets[d].image_id, gts[*labels[d].lesion].box, std::nextafter(dets[d].score, -1.0)});
      const auto after = froc_curve(extra, gts, images);
      if (after.points != curve.points || afroc(after) != afroc(curve)) ++duplicate_changes;
    }
  }
  const std::vector<std::string> two{"a", "b"};
  const std::vector<Annotation> gts{{"a", "l1", Box(10, 10, 30, 30), 100, 100, ""},
                                    {"b", "l2", Box(10, 10, 30, 30), 100, 100, ""}};
  const std::vector<Detection> worked{{"a", Box(15, 15, 25, 25), 0.9}, {"b", Box(60, 60, 80, 80), 0.5}};
  const std::vector<Detection> perfect{{"a", Box(15, 15, 25, 25), 0.9}, {"b", Box(15, 15, 25, 25), 0.7}};
  const double worked_afroc = afroc(froc_curve(worked, gts, two));
  const double perfect_afroc = afroc(froc_curve(perfect, gts, two));
  r.require(mismatches == 0, std::to_string(mismatches) + " curves differ from enumeration");
  r.require(duplicate_changes == 0, std::to_string(duplicate_changes) + " duplicate marks changed the curve");
  r.require(worked_afroc == 1.0, "worked example AFROC != 1");
  r.require(perfect_afroc == 2.0, "perfect detector AFROC != 2");
  r.detail += (r.detail.empty() ? "" : "; ") + std::string("worked=") + fmt("%.3f", worked_afroc) +
              " perfect=" + fmt("%.3f", perfect_afroc);
  return r;
}

Outcome bootstrap_checks(double& seconds) {
  Outcome r;
  synth::CorpusConfig cc;
  cc.images = 200;
  const auto gts = synth::make_corpus(cc);
  const auto dets = synth::make_detections(gts, synth::DetectorConfig{});
  CaseMap cases;
  for (const auto& a : gts) cases[a.case_id].push_back(a.image_id);

  BootstrapConfig cfg;
  cfg.seed = 42;
  const auto t0 = std::chrono::steady_clock::now();
  const auto serial = bootstrap_afroc(dets, gts, cases, cfg);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto again = bootstrap_afroc(dets, gts, cases, cfg);
  cfg.threads = 4;
  const auto parallel = bootstrap_afroc(dets, gts, cases, cfg);
  const auto same = [](const BootstrapSummary& a, const BootstrapSummary& b) {
    return a.resampled_afroc == b.resampled_afroc && a.mean_afroc == b.mean_afroc && a.ci_low == b.ci_low &&
           a.ci_high == b.ci_high && a.band.low == b.band.low && a.band.high == b.band.high;
  };
  r.require(same(serial, again), "rerun differs");
  r.require(same(serial, parallel), "serial and parallel differ");

  std::vector<Annotation> flat;
  std::vector<Detection> flat_dets;
  CaseMap flat_cases;
  for (int c = 0; c < 20; ++c) {
    const std::string img = "img" + std::to_string(c);
    flat.push_back({img, "l", Box(10, 10, 30, 30), 100, 100, "c" + std::to_string(c)});
    flat_dets.push_back({img, Box(15, 15, 25, 25), 0.9});
    flat_dets.push_back({img, Box(60, 60, 70, 70), 0.3});
    flat_cases["c" + std::to_string(c)] = {img};
  }
  BootstrapConfig flat_cfg;
  flat_cfg.resample_size = 20;
  const auto degenerate = bootstrap_afroc(flat_dets, flat, flat_cases, flat_cfg);
  r.require(degenerate.ci_low == degenerate.mean_afroc && degenerate.ci_high == degenerate.mean_afroc,
            "zero-variance CI not degenerate");
  r.require(serial.ci_low <= serial.mean_afroc && serial.mean_afroc <= serial.ci_high, "mean outside CI");
  r.require(seconds < 5.0, "1000 x 200 bootstrap above 5 s");
  r.detail += (r.detail.empty() ? "" : "; ") + std::string("AFROC mean=") + fmt("%.3f", serial.mean_afroc) +
              " CI=[" + fmt("%.3f", serial.ci_low) + "," + fmt("%.3f", serial.ci_high) + "]";
  return r;
}

Outcome loss_checks(double&) {
  Outcome r;
  const std::vector<LossSample> one{{1, 0.5, {{0.5, 0, 0, 0}, {0, 0, 0, 0}}}};
  const double worked = joint_loss(one, LossConfig{}, 8.3);
  r.require(std::abs(worked - (std::numbers::ln2 + 8.3 * 0.125)) <= 1e-9, "worked example off");
  r.require(std::abs(worked - 1.73065) <= 1e-5, "worked example != 1.73065");

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  std::uniform_real_distribution<double> off(-2.5, 2.5);
  const double h = 1e-5;
  double worst = 0;
  for (int point = 0; point < 100;) {
    std::vector<LossSample> s(4);
    bool near_kink = false;
    for (auto& x : s) {
      x.true_label = static_cast<int>(gen() % 2);
      x.predicted_prob = prob(gen);
      for (int k = 0; k < 4; ++k) {
        x.regression.offsets[k] = off(gen);
        x.regression.targets[k] = off(gen);
        near_kink |= std::abs(std::abs(x.regression.offsets[k] - x.regression.targets[k]) - 1.0) < 1e-3;
      }
    }
    if (near_kink) continue;
    ++point;
    const auto g = joint_loss_gradient(s, LossConfig{}, 8.3);
    const auto fd = [&](const std::function<void(std::vector<LossSample>&, double)>& perturb) {
      auto p = s, m = s;
      perturb(p, h);
      perturb(m, -h);
      return (joint_loss(p, LossConfig{}, 8.3) - joint_loss(m, LossConfig{}, 8.3)) / (2 * h);
    };
    const auto rel = [](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1.0}); };
    for (std::size_t i = 0; i < s.size(); ++i) {
      worst = std::max(worst, rel(g.d_prob[i], fd([i](auto& v, double d) { v[i].predicted_prob += d; })));
      for (std::size_t k = 0; k < 4; ++k) {
        worst = std::max(worst, rel(g.d_offsets[i][k], fd([i, k](auto& v, double d) { v[i].regression.offsets[k] += d; })));
      }
    }
  }
  r.require(worst < 1e-5, "gradient relative error " + fmt("%.2e", worst));

  std::vector<LossSample> negatives(6);
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    negatives[i] = {0, 0.1 + 0.1 * static_cast<double>(i), {{2, -3, 1, 0.5}, {0, 0, 0, 0}}};
  }
  r.require(joint_loss(negatives, LossConfig{}, 8.3) == joint_loss(negatives, LossConfig{}, 0.0),
            "all-negative batch has a regression term");
  r.detail += (r.detail.empty() ? "" : "; ") + std::string("worked=") + fmt("%.9f", worked) +
              " max_rel_grad_err=" + fmt("%.1e", worst);
  return r;
}

Outcome mining_checks(double&) {
  Outcome r;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unit(0, 1);
  std::size_t bad_pools = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ScoredProposal> props;
    for (std::size_t i = 0, n = 1 + gen() % 150; i < n; ++i) {
      props.push_back(ScoredProposal::make(Box(0, 0, 1, 1), unit(gen) < 0.3 ? 1 : 0, unit(gen)));
    }
    const auto pool = build_pool(props);
    bool ok = true;
    for (int label : {1, 0}) {
      std::vector<double> lo, hi;
      double mean = 0;
      std::size_t count = 0;
      for (const auto& p : props) {
        if (p.true_label == label) mean += (p.mining_score - mean) / static_cast<double>(++count);
      }
      if (count == 0) continue;
      for (const auto& p : props) {
        if (p.true_label == label) (p.mining_score >= mean ? hi : lo).push_back(p.mining_score);
      }
      std::sort(lo.rbegin(), lo.rend());
      std::sort(hi.rbegin(), hi.rend());
      lo.resize(std::min<std::size_t>(lo.size(), 25));
      hi.resize(std::min<std::size_t>(hi.size(), 25));
      const auto& easy = label == 1 ? pool.easy_pos : pool.easy_neg;
      const auto& hard = label == 1 ? pool.hard_pos : pool.hard_neg;
      const auto scores = [](const std::vector<ScoredProposal>& v) {
        std::vector<double> s;
        for (const auto& p : v) s.push_back(p.mining_score);
        std::sort(s.rbegin(), s.rend());
        return s;
      };
      ok = ok && scores(easy) == lo && scores(hard) == hi;
    }
    bad_pools += ok ? 0 : 1;
  }
  r.require(bad_pools == 0, std::to_string(bad_pools) + " pools differ from recomputation");

  MiningPool pool;
  for (int i = 0; i < 100; ++i) {
    auto p = ScoredProposal::make(Box(i, 0, i + 1, 1), i % 2, 0.5);
    (i < 25 ? pool.easy_pos : i < 50 ? pool.hard_pos : i < 75 ? pool.easy_neg : pool.hard_neg).push_back(p);
  }
  std::vector<int> hits(100, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    for (const auto& p : sample_training_rois(pool, 4, seed)) ++hits[static_cast<std::size_t>(p.box.x1())];
  }
  double worst = 0;
  for (int h : hits) worst = std::max(worst, std::abs(h / 10000.0 - 0.04));
  r.require(worst <= 0.01, "selection frequency off by " + fmt("%.4f", worst));
  const auto a = sample_training_rois(pool, 4, 99);
  const auto b = sample_training_rois(pool, 4, 99);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].box == b[i].box;
  r.require(same, "sampling not deterministic");
  r.detail += (r.detail.empty() ? "" : "; ") + std::string("max|freq-0.04|=") + fmt("%.4f", worst);
  return r;
}

Outcome pipeline_reproducibility(double& seconds) {
  Outcome r;
  const auto t0 = std::chrono::steady_clock::now();
  const auto first = scratch("run1");
  const auto second = scratch("run2");
  run_pipeline(first, 200);
  run_pipeline(second, 200);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    const auto name = entry.path().filename();
    const auto ext = name.extension();
    if (ext != ".csv" && ext != ".svg" && ext != ".txt") continue;
    ++compared;
    if (!fs::exists(second / name) || io::read_file(entry.path()) != io::read_file(second / name)) {
      r.require(false, name.string() + " differs");
    }
  }
  r.require(compared >= 10, "too few artifacts compared");
  r.detail += (r.detail.empty() ? "" : "; ") + std::to_string(compared) + " artifacts byte-identical";
  fs::remove_all(first);
  fs::remove_all(second);
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*check)(double&);
  };
  const Criterion criteria[] = {
      {1, "census ordering", census_ordering},       {2, "noise-model distribution", noise_distribution},
      {3, "geometry oracle", geometry_oracle},       {4, "NMS oracle", nms_oracle},
      {5, "FROC oracle", froc_oracle},               {6, "bootstrap determinism", bootstrap_checks},
      {7, "loss correctness", loss_checks},          {8, "mining correctness", mining_checks},
      {9, "pipeline reproducibility", pipeline_reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    double timed = -1;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check(timed);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                timed >= 0 ? timed : wall);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
