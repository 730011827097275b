#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "noisydet/anchors.hpp"
#include "noisydet/froc.hpp"
#include "noisydet/io.hpp"
#include "noisydet/mining.hpp"
#include "noisydet/noise.hpp"
#include "noisydet/parallel.hpp"
#include "noisydet/svg.hpp"
#include "noisydet/synth.hpp"

namespace noisydet::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kDiameterBin = 10.0;
constexpr double kFactorBin = 0.25;

std::vector<Annotation> load_dataset(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  try {
    return io::read_dataset(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

std::vector<Detection> load_detections(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  try {
    return io::read_detections(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ostringstream os;
  writer(os);
  io::write_file(path, os.str());
}

io::Provenance provenance_header(std::string command) {
  return {{"tool", "noisydet"}, {"command", std::move(command)}};
}

void echo(std::ostream& out, const io::Provenance& p) { io::write_provenance(out, p); }

double diameter(const Box& b) { return (b.width() + b.height()) / 2.0; }

struct Histogram {
  double bin = 1.0;
  std::vector<std::size_t> counts;

  void add(double value) {
    const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(value / bin)));
    if (k >= counts.size()) counts.resize(k + 1, 0);
    ++counts[k];
  }
};

void write_histograms(std::ostream& os, const std::vector<std::pair<std::string, Histogram>>& series,
                      const io::Provenance& provenance) {
  io::write_provenance(os, provenance);
  os << "level,bin_low,bin_high,count\n";
  std::size_t bins = 0;
  for (const auto& [_, h] : series) bins = std::max(bins, h.counts.size());
  for (const auto& [level, h] : series) {
    for (std::size_t k = 0; k < bins; ++k) {
      const std::size_t c = k < h.counts.size() ? h.counts[k] : 0;
      os << level << ',' << io::format_number(h.bin * static_cast<double>(k)) << ','
         << io::format_number(h.bin * static_cast<double>(k + 1)) << ',' << c << '\n';
    }
  }
}

double mean_diameter(std::span<const Annotation> annotations) {
  if (annotations.empty()) return 0.0;
  double s = 0.0;
  for (const auto& a : annotations) s += diameter(a.box);
  return s / static_cast<double>(annotations.size());
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

fs::path diameter_histogram_path(const fs::path& output) { return fs::path(output.string() + ".diameters.csv"); }
fs::path factor_histogram_path(const fs::path& output) { return fs::path(output.string() + ".factors.csv"); }

void inject_noise(const InjectNoiseOptions& options, std::ostream& out) {
  if (!(options.mu >= 0.0) || !std::isfinite(options.mu)) {
    throw UsageError("--mu must be a finite value >= 0 (noise is enlargement-only)");
  }
  if (!(options.clip_high > 0.0)) throw UsageError("--clip-high must be positive");
  if (!(options.max_fraction > 0.0 && options.max_fraction <= 1.0)) throw UsageError("--max-fraction must lie in (0, 1]");

  NoiseConfig config;
  config.mu = options.mu;
  config.clip_high = options.clip_high;
  config.max_image_fraction = options.max_fraction;
  config.seed = options.seed;

  const auto clean = load_dataset(options.input);
  std::vector<NoiseDraw> draws;
  const auto noisy = inject_noise_dataset(clean, config, &draws, resolve_threads());

  io::Provenance prov = provenance_header("inject-noise");
  prov.insert(prov.end(), {{"input", options.input.filename().string()},
                           {"mu", io::format_number(config.mu)},
                           {"sigma", io::format_number(config.sigma)},
                           {"clip_low", io::format_number(config.clip_low)},
                           {"clip_high", io::format_number(config.clip_high)},
                           {"max_image_fraction", io::format_number(config.max_image_fraction)},
                           {"seed", std::to_string(config.seed)},
                           {"rng", "splitmix64-counter, draws (n_w, n_h) per annotation in input order"}});

  write_with(options.output, [&](std::ostream& os) { io::write_dataset(os, noisy, prov); });

  const std::string level = "mu=" + io::format_number(config.mu);
  Histogram clean_d{kDiameterBin, {}};
  Histogram noisy_d{kDiameterBin, {}};
  for (const auto& a : clean) clean_d.add(diameter(a.box));
  for (const auto& a : noisy) noisy_d.add(diameter(a.box));
  write_with(diameter_histogram_path(options.output),
             [&](std::ostream& os) { write_histograms(os, {{"clean", clean_d}, {level, noisy_d}}, prov); });

  Histogram factors{kFactorBin, {}};
  for (const auto& d : draws) {
    factors.add(d.width_factor);
    factors.add(d.height_factor);
  }
  write_with(factor_histogram_path(options.output),
             [&](std::ostream& os) { write_histograms(os, {{level, factors}}, prov); });

  echo(out, prov);
  out << "annotations=" << noisy.size() << " mean_diameter_in=" << fixed3(mean_diameter(clean))
      << " mean_diameter_out=" << fixed3(mean_diameter(noisy)) << '\n';
}

void census(const CensusOptions& options, std::ostream& out) {
  if (options.annotations.empty()) throw UsageError("--annotations needs at least one LEVEL=PATH");
  std::vector<MatchCriterion> criteria;
  for (const auto& name : split_list(options.criteria)) {
    const auto kind = parse_criterion_kind(name);
    if (!kind) throw UsageError("unknown criterion '" + name + "'; expected one of {iou, centroid, exp_iou}");
    MatchCriterion c{*kind, options.t_upper, options.t_lower, options.beta};
    try {
      c.validate();
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    criteria.push_back(c);
  }
  if (criteria.empty()) throw UsageError("--criteria is empty; expected a list of {iou, centroid, exp_iou}");

  AnchorConfig anchors;
  anchors.stride = options.stride;
  anchors.cross_boundary = options.keep_cross_boundary ? CrossBoundaryPolicy::Keep : CrossBoundaryPolicy::Ignore;

  io::Provenance prov = provenance_header("census");
  std::vector<NoiseLevelDataset> datasets;
  std::vector<Annotation> all;
  for (const auto& spec : options.annotations) {
    const auto eq = spec.find('=');
    const std::string level = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
    const fs::path path = eq == std::string::npos ? fs::path(spec) : fs::path(spec.substr(eq + 1));
    if (level.empty()) throw UsageError("empty noise-level label in '" + spec + "'");
    datasets.push_back({level, load_dataset(path)});
    all.insert(all.end(), datasets.back().annotations.begin(), datasets.back().annotations.end());
    prov.emplace_back("level." + level, path.filename().string());
  }
  const auto images = images_of(all);

  prov.insert(prov.end(), {{"criteria", options.criteria},
                           {"t_upper", io::format_number(options.t_upper)},
                           {"t_lower", io::format_number(options.t_lower)},
                           {"beta", io::format_number(options.beta)},
                           {"scales", "128,256,512"},
                           {"ratios", "1:1,0.7:1.4,1.4:0.7"},
                           {"stride", io::format_number(anchors.stride)},
                           {"cross_boundary", options.keep_cross_boundary ? "keep" : "ignore"}});

  const auto rows = positive_census(datasets, images, criteria, anchors, resolve_threads());

  fs::path svg_path = options.out;
  svg_path.replace_extension(".svg");
  write_with(options.out, [&](std::ostream& os) { io::write_census(os, rows, prov); });
  io::write_file(svg_path, svg::render_census(rows));

  echo(out, prov);
  for (const auto& r : rows) {
    out << r.criterion << ' ' << r.level << ' ' << fixed3(r.positives_per_lesion) << " (" << r.positives << '/'
        << r.lesions << ")\n";
  }
}

void plot_census(const PlotCensusOptions& options, std::ostream& out) {
  std::istringstream in(io::read_file(options.input));
  const auto rows = io::read_census(in);
  io::write_file(options.output, svg::render_census(rows));
  out << "rows=" << rows.size() << '\n';
}

void eval_froc(const EvalFrocOptions& options, std::ostream& out) {
  if (!(options.fp_cut > 0.0)) throw UsageError("--fp-cut must be positive");
  if (options.bootstrap && (*options.bootstrap == 0 || options.cases == 0)) {
    throw UsageError("--bootstrap and --cases must be positive");
  }

  const auto detections = load_detections(options.detections);
  const auto truth = load_dataset(options.ground_truth);
  std::vector<std::string> images;
  for (const auto& info : images_of(truth)) images.push_back(info.image_id);
  if (truth.empty()) throw ValidationError("ground truth has zero lesions; sensitivity is undefined");

  const FrocCurve curve = froc_curve(detections, truth, images, options.fp_cut);
  const double area = afroc(curve);

  io::Provenance prov = provenance_header("eval-froc");
  prov.insert(prov.end(), {{"detections", options.detections.filename().string()},
                           {"ground_truth", options.ground_truth.filename().string()},
                           {"fp_cut", io::format_number(options.fp_cut)},
                           {"matching", "centroid inside ground truth; duplicate marks ignored"},
                           {"images", std::to_string(images.size())},
                           {"lesions", std::to_string(truth.size())}});

  std::optional<BootstrapSummary> summary;
  if (options.bootstrap) {
    CaseMap cases;
    for (const auto& a : truth) {
      if (a.case_id.empty()) {
        throw ValidationError("--bootstrap needs case_id on every ground-truth row (image " + a.image_id + ")");
      }
      auto& list = cases[a.case_id];
      if (std::find(list.begin(), list.end(), a.image_id) == list.end()) list.push_back(a.image_id);
    }
    BootstrapConfig bc;
    bc.n_resamples = *options.bootstrap;
    bc.resample_size = options.cases;
    bc.seed = options.seed;
    bc.fp_cut = options.fp_cut;
    bc.threads = resolve_threads();
    summary = bootstrap_afroc(detections, truth, cases, bc);
    prov.insert(prov.end(), {{"bootstrap", std::to_string(bc.n_resamples)},
                             {"cases", std::to_string(bc.resample_size)},
                             {"seed", std::to_string(bc.seed)},
                             {"ci", "percentile 2.5/97.5"}});
  }

  std::string line = "AFROC=" + fixed3(area);
  if (summary) line += " CI=[" + fixed3(summary->ci_low) + "," + fixed3(summary->ci_high) + "]";

  const fs::path base = options.out;
  write_with(fs::path(base.string() + ".csv"), [&](std::ostream& os) { io::write_curve(os, curve, prov); });
  io::write_file(fs::path(base.string() + ".svg"), svg::render_froc(curve, summary ? &summary->band : nullptr));
  write_with(fs::path(base.string() + ".summary.txt"), [&](std::ostream& os) {
    io::write_provenance(os, prov);
    if (summary) os << "# bootstrap_mean=" << io::format_number(summary->mean_afroc) << '\n';
    os << line << '\n';
  });

  echo(out, prov);
  out << line << '\n';
}

void mine(const MineOptions& options, std::ostream& out) {
  if (options.n == 0) throw UsageError("--n must be at least 1");
  std::istringstream in(io::read_file(options.proposals));
  std::vector<io::Proposal> records;
  try {
    records = io::read_proposals(in);
  } catch (const ValidationError& e) {
    throw ValidationError(options.proposals.filename().string() + ": " + e.what());
  }

  std::vector<ScoredProposal> proposals;
  proposals.reserve(records.size());
  for (const auto& r : records) proposals.push_back(r.proposal);
  const MiningPool pool = build_pool(proposals, options.cap);
  const auto picked = sample_training_rois(pool, options.n, options.seed);

  // Records identical in box, label and probability are interchangeable, so
  // the first match supplies the image id.
  std::vector<io::Proposal> selected;
  for (const auto& p : picked) {
    auto it = std::find_if(records.begin(), records.end(), [&](const io::Proposal& r) {
      return r.proposal.box == p.box && r.proposal.true_label == p.true_label &&
             r.proposal.predicted_prob == p.predicted_prob;
    });
    selected.push_back({it != records.end() ? it->image_id : std::string{}, p});
  }

  const auto mean = [](const std::optional<double>& m) { return m ? io::format_number(*m) : std::string("undefined"); };
  io::Provenance prov = provenance_header("mine");
  prov.insert(prov.end(), {{"proposals", options.proposals.filename().string()},
                           {"seed", std::to_string(options.seed)},
                           {"n", std::to_string(options.n)},
                           {"cap", std::to_string(options.cap)},
                           {"S_P", mean(pool.mean_pos_score)},
                           {"S_N", mean(pool.mean_neg_score)},
                           {"easy_pos", std::to_string(pool.easy_pos.size())},
                           {"hard_pos", std::to_string(pool.hard_pos.size())},
                           {"easy_neg", std::to_string(pool.easy_neg.size())},
                           {"hard_neg", std::to_string(pool.hard_neg.size())},
                           {"selected", std::to_string(selected.size())}});

  write_with(options.output, [&](std::ostream& os) { io::write_proposals(os, selected, prov); });
  echo(out, prov);
}

void nms(const NmsOptions& options, std::ostream& out) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");
  const auto detections = load_detections(options.detections);
  const auto kept = noisydet::nms(detections, options.threshold, options.max);

  io::Provenance prov = provenance_header("nms");
  prov.insert(prov.end(), {{"detections", options.detections.filename().string()},
                           {"threshold", io::format_number(options.threshold)},
                           {"max", std::to_string(options.max)},
                           {"input", std::to_string(detections.size())},
                           {"kept", std::to_string(kept.size())}});
  write_with(options.output, [&](std::ostream& os) { io::write_detections(os, kept, prov); });
  echo(out, prov);
}

void synth(const SynthOptions& options, std::ostream& out) {
  if (options.images == 0) throw UsageError("--images must be positive");
  synth::CorpusConfig cc;
  cc.images = options.images;
  cc.images_per_case = options.images_per_case;
  cc.image_width = options.image_size;
  cc.image_height = options.image_size;
  cc.diameter_scale = options.diameter_scale;
  cc.seed = options.seed;
  const auto corpus = synth::make_corpus(cc);

  io::Provenance prov = provenance_header("synth");
  prov.insert(prov.end(), {{"images", std::to_string(cc.images)},
                           {"images_per_case", std::to_string(cc.images_per_case)},
                           {"image_size", io::format_number(options.image_size)},
                           {"diameter", "log-uniform [30,150] x " + io::format_number(cc.diameter_scale)},
                           {"seed", std::to_string(cc.seed)}});
  write_with(options.output, [&](std::ostream& os) { io::write_dataset(os, corpus, prov); });

  if (options.detections) {
    synth::DetectorConfig dc;
    dc.seed = options.detector_seed;
    const auto dets = synth::make_detections(corpus, dc);
    io::Provenance dprov = prov;
    dprov.emplace_back("detector_seed", std::to_string(dc.seed));
    write_with(*options.detections, [&](std::ostream& os) { io::write_detections(os, dets, dprov); });
  }
  echo(out, prov);
  out << "lesions=" << corpus.size() << '\n';
}

}  // namespace noisydet::cli
