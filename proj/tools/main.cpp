#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace cli = noisydet::cli;

int main(int argc, char** argv) {
  CLI::App app{"noisydet: bounding-box noise simulation, anchor-label census and FROC evaluation"};
  app.require_subcommand(1);

  cli::InjectNoiseOptions inject;
  auto* inject_cmd = app.add_subcommand("inject-noise", "Enlarge annotation boxes with clamped multiplicative noise");
  inject_cmd->add_option("--input", inject.input, "Clean dataset CSV")->required();
  inject_cmd->add_option("--output", inject.output, "Noisy dataset CSV")->required();
  inject_cmd->add_option("--mu", inject.mu, "Mean of the noise factor")->required();
  inject_cmd->add_option("--seed", inject.seed, "RNG seed")->required();
  inject_cmd->add_option("--clip-high", inject.clip_high, "Exclusive upper clip of the factor")->capture_default_str();
  inject_cmd->add_option("--max-fraction", inject.max_fraction, "Max box side as fraction of image side")
      ->capture_default_str();

  cli::CensusOptions census;
  auto* census_cmd = app.add_subcommand("census", "Average positive anchors per lesion per criterion and noise level");
  census_cmd->add_option("--annotations", census.annotations, "LEVEL=PATH dataset(s)")->required();
  census_cmd->add_option("--criteria", census.criteria, "Comma list of iou,centroid,exp_iou")->capture_default_str();
  census_cmd->add_option("--t-upper", census.t_upper)->capture_default_str();
  census_cmd->add_option("--t-lower", census.t_lower)->capture_default_str();
  census_cmd->add_option("--beta", census.beta)->capture_default_str();
  census_cmd->add_option("--stride", census.stride)->capture_default_str();
  census_cmd->add_flag("--keep-cross-boundary", census.keep_cross_boundary,
                       "Match anchors that extend past the image border");
  census_cmd->add_option("--out", census.out, "Census CSV; the SVG chart is written next to it")->required();

  cli::PlotCensusOptions plot;
  auto* plot_cmd = app.add_subcommand("plot-census", "Render a census CSV as an SVG bar chart");
  plot_cmd->add_option("--input", plot.input)->required();
  plot_cmd->add_option("--output", plot.output)->required();

  cli::EvalFrocOptions froc;
  std::size_t bootstrap = 1000;
  auto* froc_cmd = app.add_subcommand("eval-froc", "FROC curve, AFROC and case-bootstrap interval");
  froc_cmd->add_option("--detections", froc.detections)->required();
  froc_cmd->add_option("--ground-truth", froc.ground_truth)->required();
  froc_cmd->add_option("--fp-cut", froc.fp_cut)->capture_default_str();
  auto* bootstrap_opt = froc_cmd->add_option("--bootstrap", bootstrap, "Bootstrap resamples (default 1000)")
                            ->expected(0, 1)
                            ->default_str("1000");
  froc_cmd->add_option("--cases", froc.cases, "Cases per bootstrap resample")->capture_default_str();
  froc_cmd->add_option("--seed", froc.seed)->capture_default_str();
  froc_cmd->add_option("--out", froc.out, "Output prefix")->capture_default_str();

  cli::MineOptions mine;
  auto* mine_cmd = app.add_subcommand("mine", "Hard-sample-mining pool and ROI sampling");
  mine_cmd->add_option("--proposals", mine.proposals)->required();
  mine_cmd->add_option("--output", mine.output)->required();
  mine_cmd->add_option("--seed", mine.seed)->required();
  mine_cmd->add_option("--n", mine.n)->capture_default_str();
  mine_cmd->add_option("--cap", mine.cap)->capture_default_str();

  cli::NmsOptions nms;
  auto* nms_cmd = app.add_subcommand("nms", "Greedy non-maximum suppression");
  nms_cmd->add_option("--detections", nms.detections)->required();
  nms_cmd->add_option("--output", nms.output)->required();
  nms_cmd->add_option("--threshold", nms.threshold)->required();
  nms_cmd->add_option("--max", nms.max)->capture_default_str();

  cli::SynthOptions synth;
  std::string synth_detections;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic one-lesion-per-image corpus");
  synth_cmd->add_option("--output", synth.output)->required();
  synth_cmd->add_option("--detections", synth_detections, "Also write toy detections here");
  synth_cmd->add_option("--images", synth.images)->capture_default_str();
  synth_cmd->add_option("--images-per-case", synth.images_per_case)->capture_default_str();
  synth_cmd->add_option("--image-size", synth.image_size)->capture_default_str();
  synth_cmd->add_option("--diameter-scale", synth.diameter_scale)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--detector-seed", synth.detector_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  return cli::guarded(
      [&] {
        if (*inject_cmd) cli::inject_noise(inject, std::cout);
        if (*census_cmd) cli::census(census, std::cout);
        if (*plot_cmd) cli::plot_census(plot, std::cout);
        if (*froc_cmd) {
          if (bootstrap_opt->count() > 0) froc.bootstrap = bootstrap;
          cli::eval_froc(froc, std::cout);
        }
        if (*mine_cmd) cli::mine(mine, std::cout);
        if (*nms_cmd) cli::nms(nms, std::cout);
        if (*synth_cmd) {
          if (!synth_detections.empty()) synth.detections = synth_detections;
          cli::synth(synth, std::cout);
        }
      },
      std::cerr);
}
