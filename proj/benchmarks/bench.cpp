#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "noisydet/anchors.hpp"
#include "noisydet/froc.hpp"
#include "noisydet/noise.hpp"
#include "noisydet/synth.hpp"

namespace {

using namespace noisydet;

void BM_Iou(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> pos(0, 500);
  std::vector<Box> boxes;
  for (int i = 0; i < 1024; ++i) {
    const double x = pos(gen), y = pos(gen);
    boxes.emplace_back(x, y, x + 10 + pos(gen) / 5, y + 10 + pos(gen) / 5);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou(boxes[i & 1023], boxes[(i * 7 + 3) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Iou);

void BM_Nms(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> pos(0, 600);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<Detection> dets;
  for (int i = 0; i < state.range(0); ++i) {
    const double x = pos(gen), y = pos(gen);
    dets.push_back({"img", Box(x, y, x + 20 + 100 * unit(gen), y + 20 + 100 * unit(gen)), unit(gen)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(nms(dets, 0.7, 300));
}
BENCHMARK(BM_Nms)->Arg(200)->Arg(2000);

void BM_Census(benchmark::State& state) {
  synth::CorpusConfig cc;
  cc.images = static_cast<std::size_t>(state.range(0));
  const auto corpus = synth::make_corpus(cc);
  NoiseConfig nc;
  nc.mu = 3;
  const std::vector<NoiseLevelDataset> levels{{"clean", corpus}, {"mu3", inject_noise_dataset(corpus, nc)}};
  const auto images = images_of(corpus);
  const std::vector<MatchCriterion> criteria{MatchCriterion::iou(), MatchCriterion::centroid(),
                                             MatchCriterion::exp_iou()};
  for (auto _ : state) benchmark::DoNotOptimize(positive_census(levels, images, criteria, AnchorConfig{}, 1));
}
BENCHMARK(BM_Census)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  synth::CorpusConfig cc;
  const auto gts = synth::make_corpus(cc);
  const auto dets = synth::make_detections(gts, synth::DetectorConfig{});
  CaseMap cases;
  for (const auto& a : gts) cases[a.case_id].push_back(a.image_id);
  BootstrapConfig cfg;
  cfg.n_resamples = 1000;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_afroc(dets, gts, cases, cfg));
}
BENCHMARK(BM_Bootstrap)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
