// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "chanclip/bench.hpp"
#include "chanclip/channelmap.hpp"
#include "chanclip/error.hpp"
#include "chanclip/evalharness.hpp"
#include "chanclip/ingest.hpp"
#include "chanclip/montage.hpp"
#include "chanclip/parallel.hpp"
#include "chanclip/synth.hpp"

namespace chanclip::cli {

namespace {

namespace fs = std::filesystem;

/// Flag combination rejected after parsing; reported like a parse error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: not given on the command line
  bool verbose = false;

  std::size_t resolved_threads() const {
    return resolve_threads(threads == 0 ? std::nullopt : std::optional<std::size_t>(threads));
  }
};

struct SpatialFlags {
  std::size_t resize_min = 0;
  std::size_t resize_max = 0;
  std::size_t crop = 0;
  std::string crop_mode;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--resize-min", resize_min, "Shorter side lower bound (default: --crop)");
    cmd->add_option("--resize-max", resize_max, "Shorter side upper bound (default: --resize-min)");
    cmd->add_option("--crop", crop, "Square crop size; omit to keep native frame size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--crop-mode", crop_mode, "random | center (default: random in train mode)")
        ->check(CLI::IsMember({"random", "center"}));
  }

  std::optional<SpatialSpec> resolve(SampleMode mode) const {
    if (crop == 0) {
      if (resize_min != 0 || resize_max != 0 || !crop_mode.empty()) {
        throw UsageError("--resize-min/--resize-max/--crop-mode require --crop");
      }
      return std::nullopt;
    }
    SpatialSpec spec;
    spec.crop_size = crop;
    spec.resize_shorter_min = resize_min != 0 ? resize_min : crop;
    spec.resize_shorter_max = resize_max != 0 ? resize_max : spec.resize_shorter_min;
    if (crop_mode.empty()) {
      spec.mode = mode == SampleMode::kTrain ? CropMode::kRandomCrop : CropMode::kCenterCrop;
    } else {
      spec.mode = crop_mode == "random" ? CropMode::kRandomCrop : CropMode::kCenterCrop;
    }
    try {
      spec.validate();
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
    return spec;
  }
};

const CLI::Validator& strategy_name() {
  static const CLI::Validator v(
      [](std::string& s) {
        try {
          parse_strategy(s);
          return std::string();
        } catch (const ArgumentError& e) {
          return std::string(e.what());
        }
      },
      "STRATEGY");
  return v;
}

void check_frames(Strategy s, std::size_t t) {
  if (t < min_frames(s)) {
    throw UsageError(std::string(to_string(s)) + " requires --frames >= " +
                     std::to_string(min_frames(s)));
  }
}

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names, std::size_t t) {
  std::vector<Strategy> out;
  for (const auto& n : names) {
    out.push_back(parse_strategy(n));
    check_frames(out.back(), t);
  }
  return out;
}

bool safe_clip_id(const std::string& id) {
  return !id.empty() && id != "." && id != ".." && id.find('/') == std::string::npos &&
         id.find('\\') == std::string::npos;
}

// ---------------------------------------------------------------------------
// transform

struct TransformOptions {
  std::string manifest;
  std::string out_dir;
  std::string strategy = "TC";
  std::size_t frames = 8;
  std::string mode = "test";
  SpatialFlags spatial;
};

int cmd_transform(const GlobalOptions& g, const TransformOptions& o, std::ostream& out,
                  std::ostream& err) {
  const auto strategy = parse_strategy(o.strategy);
  check_frames(strategy, o.frames);
  const auto mode = parse_sample_mode(o.mode);
  const auto spatial = o.spatial.resolve(mode);
  const SampleSpec spec{o.frames, mode, g.seed};

  const fs::path manifest(o.manifest);
  const auto records = read_manifest(manifest);
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!safe_clip_id(r.clip_id)) throw FormatError("clip id '" + r.clip_id + "' is not a valid file name");
    if (!seen.insert(r.clip_id).second) throw FormatError("duplicate clip id '" + r.clip_id + "'");
  }

  const fs::path out_dir(o.out_dir);
  const bool existed = fs::exists(out_dir);
  fs::create_directories(out_dir);
  const fs::path base = manifest.parent_path();

  std::vector<std::string> errors(records.size());
  std::vector<char> written(records.size(), 0);
  parallel_for(records.size(), g.resolved_threads(), [&](std::size_t i) {
    const auto& rec = records[i];
    try {
      const auto source = open_frame_dir(base / rec.relative_dir, rec);
      Rng rng = Rng::for_clip(g.seed, rec.clip_id);
      const auto clip = transform_clip(source, strategy, spec, spatial, rng);
      written[i] = 1;
      write_tensor_file(clip, out_dir / (rec.clip_id + ".cten"));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  const bool failed = std::any_of(errors.begin(), errors.end(), [](const auto& e) { return !e.empty(); });
  if (failed) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!errors[i].empty()) err << "error: clip " << records[i].clip_id << ": " << errors[i] << '\n';
    }
    std::error_code ec;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (written[i]) fs::remove(out_dir / (records[i].clip_id + ".cten"), ec);
    }
    if (!existed) fs::remove(out_dir, ec);
    return kExitFailure;
  }

  std::ofstream index(out_dir / "index.csv", std::ios::binary | std::ios::trunc);
  index << "clip_id,label,path\n";
  for (const auto& rec : records) {
    index << rec.clip_id << ',';
    if (rec.label) index << *rec.label;
    index << ',' << rec.clip_id << ".cten\n";
  }
  index.close();
  if (!index) throw IoError("failed to write " + (out_dir / "index.csv").string());
  if (g.verbose) out << "wrote " << records.size() << " clips to " << out_dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// render

struct RenderOptions {
  std::string manifest;
  std::string clip_id;
  std::vector<std::string> strategies;
  std::string out;
  std::size_t frames = 8;
  std::string mode = "test";
  SpatialFlags spatial;
};

int cmd_render(const GlobalOptions& g, const RenderOptions& o, std::ostream& out) {
  const auto strategies = parse_strategies(o.strategies, o.frames);
  const auto mode = parse_sample_mode(o.mode);
  const auto spatial = o.spatial.resolve(mode);
  const SampleSpec spec{o.frames, mode, g.seed};

  const fs::path manifest(o.manifest);
  const auto records = read_manifest(manifest);
  const auto it = std::find_if(records.begin(), records.end(),
                               [&](const auto& r) { return r.clip_id == o.clip_id; });
  if (it == records.end()) throw ArgumentError("clip '" + o.clip_id + "' not in manifest");
  const auto source = open_frame_dir(manifest.parent_path() / it->relative_dir, *it);

  std::vector<ClipU8> rows;
  for (auto s : strategies) {
    Rng rng = Rng::for_clip(g.seed, source.id);
    rows.push_back(transform_clip(source, s, spec, spatial, rng));
  }
  const auto montage = render_montage(rows);
  save_frame(montage, o.out);
  if (g.verbose) {
    out << "montage " << montage.width() << "x" << montage.height() << " -> " << o.out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  std::string out_dir;
  std::size_t per_class = 0;
  SynthConfig cfg;
  std::string motion = "traverse";
};

int cmd_synth(const GlobalOptions& g, SynthOptions o, std::ostream& out) {
  o.cfg.seed = g.seed;
  o.cfg.motion = o.motion == "wrap" ? SynthMotion::kWrap : SynthMotion::kTraverse;
  try {
    o.cfg.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const auto manifest = generate_dataset(o.cfg, o.per_class, o.out_dir, g.resolved_threads());
  out << manifest.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string data_dir;
  std::vector<std::string> strategies = {"RGB", "TC_PLUS2", "GRAY_ST"};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  TrainConfig train;
  bool auto_synth = false;
  std::size_t train_per_class = 1000;
  std::size_t test_per_class = 250;
  std::string metrics;
  SpatialFlags spatial;
};

int cmd_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out, std::ostream& err) {
  const auto strategies = parse_strategies(o.strategies, o.train.model_frames);
  const auto spatial = o.spatial.resolve(SampleMode::kTrain);
  const std::size_t threads = g.resolved_threads();
  const fs::path data_dir(o.data_dir);
  const fs::path train_manifest = data_dir / "train" / "manifest.csv";
  const fs::path test_manifest = data_dir / "test" / "manifest.csv";

  if (o.auto_synth) {
    SynthConfig cfg;
    if (!fs::exists(train_manifest)) {
      cfg.seed = derive_seed(g.seed, 1);
      generate_dataset(cfg, o.train_per_class, data_dir / "train", threads);
    }
    if (!fs::exists(test_manifest)) {
      cfg.seed = derive_seed(g.seed, 2);
      generate_dataset(cfg, o.test_per_class, data_dir / "test", threads);
    }
  }
  const auto train_clips = load_labeled_clips(train_manifest, threads);
  const auto test_clips = load_labeled_clips(test_manifest, threads);

  struct Run {
    Strategy strategy;
    std::uint64_t seed;
    std::vector<std::string> rows;
    double accuracy = 0.0;
    std::string error;
  };
  std::vector<Run> runs;
  for (auto s : strategies) {
    for (auto seed : o.seeds) runs.push_back({s, seed, {}, 0.0, {}});
  }

  parallel_for(runs.size(), threads, [&](std::size_t r) {
    auto& run = runs[r];
    TrainConfig cfg = o.train;
    cfg.seed = run.seed;
    cfg.spatial = spatial;
    try {
      train(train_clips, run.strategy, cfg, [&](std::size_t epoch, double loss, const LinearModel& m) {
        run.accuracy = evaluate(m, test_clips, run.strategy, cfg.model_frames, spatial, 1);
        run.rows.push_back(std::string(to_string(run.strategy)) + ',' + std::to_string(run.seed) +
                           ',' + std::to_string(epoch) + ',' + fixed(loss, 6) + ',' +
                           fixed(run.accuracy, 4));
      });
    } catch (const TrainingError& e) {
      run.error = e.what();
    }
  });

  const fs::path metrics = o.metrics.empty() ? data_dir / "metrics.csv" : fs::path(o.metrics);
  std::ofstream mout(metrics, std::ios::binary | std::ios::trunc);
  if (!mout) throw IoError("cannot open " + metrics.string() + " for writing");
  mout << "strategy,seed,epoch,train_loss,test_accuracy\n";
  for (const auto& run : runs) {
    for (const auto& row : run.rows) mout << row << '\n';
  }
  mout.close();
  if (!mout) throw IoError("failed to write " + metrics.string());

  struct Row {
    Strategy strategy;
    double mean = 0.0;
    std::size_t count = 0;
  };
  std::vector<Row> table;
  for (auto s : strategies) {
    if (std::any_of(table.begin(), table.end(), [&](const Row& r) { return r.strategy == s; })) continue;
    Row row{s};
    for (const auto& run : runs) {
      if (run.strategy == s && run.error.empty()) {
        row.mean += run.accuracy;
        ++row.count;
      }
    }
    if (row.count > 0) row.mean /= static_cast<double>(row.count);
    table.push_back(row);
  }
  std::stable_sort(table.begin(), table.end(), [](const Row& a, const Row& b) { return a.mean > b.mean; });

  out << "strategy       mean_accuracy  runs\n";
  for (const auto& row : table) {
    std::string name(to_string(row.strategy));
    name.resize(std::max<std::size_t>(name.size(), 14), ' ');
    out << name << ' ' << fixed(row.mean, 4) << "         " << row.count << '\n';
  }
  bool failed = false;
  for (const auto& run : runs) {
    if (!run.error.empty()) {
      err << "error: " << to_string(run.strategy) << " seed " << run.seed << ": " << run.error << '\n';
      failed = true;
    }
  }
  out << "metrics: " << metrics.string() << '\n';
  return failed ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::string manifest;
  std::vector<std::string> strategies;
  std::size_t frames = 8;
  std::size_t repeat = 5;
  std::size_t min_time_ms = 50;
  SpatialFlags spatial;
};

int cmd_bench(const GlobalOptions& g, const BenchOptions& o, std::ostream& out) {
  std::vector<Strategy> strategies;
  if (o.strategies.empty()) {
    for (auto s : kAllStrategies) {
      if (o.frames >= min_frames(s)) strategies.push_back(s);
    }
  } else {
    strategies = parse_strategies(o.strategies, o.frames);
  }
  const auto spatial = o.spatial.resolve(SampleMode::kTest);
  const SampleSpec spec{o.frames, SampleMode::kTest, g.seed};
  const auto sources = open_manifest(o.manifest);
  if (sources.empty()) throw EmptySourceError("manifest lists no clips");
  const std::size_t threads = g.resolved_threads();
  const std::string how = o.repeat == 1 ? "single" : "median";

  for (auto s : strategies) {
    std::vector<double> clips_per_s;
    std::vector<double> mb_per_s;
    std::size_t output_bytes = 0;
    for (std::size_t r = 0; r < o.repeat; ++r) {
      std::vector<std::size_t> bytes(sources.size());
      const auto start = std::chrono::steady_clock::now();
      parallel_for(sources.size(), threads, [&](std::size_t i) {
        Rng rng = Rng::for_clip(g.seed, sources[i].id);
        bytes[i] = transform_clip(sources[i], s, spec, spatial, rng).data().size();
      });
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      output_bytes = 0;
      for (auto b : bytes) output_bytes += b;
      clips_per_s.push_back(static_cast<double>(sources.size()) / secs);
      mb_per_s.push_back(static_cast<double>(output_bytes) / secs / 1e6);
    }

    const auto& first = sources.front();
    Rng rng = Rng::for_clip(g.seed, first.id);
    const auto prepared = prepare_source_frames(
        first.frame_count(), [&](std::size_t i) { return load_frame(first.frame_paths[i]); }, s,
        spec, spatial, rng);
    const auto cmp = compare_gather_to_copy(build_index_map(s, o.frames), prepared.front(), o.repeat,
                                            std::chrono::milliseconds(o.min_time_ms));

    out << "strategy " << to_string(s) << "  frames " << o.frames << "  clips " << sources.size()
        << "  output_bytes " << output_bytes << '\n';
    out << "  pipeline  " << how << ' ' << fixed(median(clips_per_s), 1) << " clips/s  "
        << fixed(median(mb_per_s), 1) << " MB/s\n";
    out << "  gather    " << how << ' ' << fixed(cmp.gather_median / 1e6, 1) << " MB/s\n";
    out << "  memcpy    " << how << ' ' << fixed(cmp.copy_median / 1e6, 1) << " MB/s\n";
    out << "  gather/memcpy " << fixed(cmp.ratio(), 3) << '\n';
  }
  return kExitOk;
}

void print_usage(const CLI::App& app, std::ostream& err) {
  const CLI::App* target = &app;
  for (const auto* sub : app.get_subcommands()) target = sub;
  err << target->help();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Channel-sampling video clip preprocessing", "chanclip");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Global seed");
  app.add_option("--threads", g.threads, "Worker threads (fallback: CHANCLIP_THREADS, then 1)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", g.verbose, "Print progress");

  TransformOptions t;
  auto* transform = app.add_subcommand("transform", "Write one .cten clip per manifest entry");
  transform->add_option("--manifest", t.manifest, "Manifest CSV")->required();
  transform->add_option("--out-dir", t.out_dir, "Output directory")->required();
  transform->add_option("--strategy", t.strategy, "Channel strategy")->check(strategy_name());
  transform->add_option("--frames,-T", t.frames, "Model frame count T")->check(CLI::PositiveNumber);
  transform->add_option("--mode", t.mode, "train | test")->check(CLI::IsMember({"train", "test"}));
  t.spatial.add_to(transform);

  RenderOptions r;
  auto* render = app.add_subcommand("render", "Render a strategy comparison montage (PPM)");
  render->add_option("--manifest", r.manifest, "Manifest CSV")->required();
  render->add_option("--clip-id", r.clip_id, "Clip to render")->required();
  render->add_option("--strategies", r.strategies, "Comma-separated strategies, one row each")
      ->required()
      ->delimiter(',')
      ->check(strategy_name());
  render->add_option("--out", r.out, "Output .ppm")->required();
  render->add_option("--frames,-T", r.frames, "Model frame count T")->check(CLI::PositiveNumber);
  render->add_option("--mode", r.mode, "train | test")->check(CLI::IsMember({"train", "test"}));
  r.spatial.add_to(render);

  SynthOptions s;
  auto* synth = app.add_subcommand("synth", "Generate the moving-square dataset");
  synth->add_option("--out-dir", s.out_dir, "Output directory")->required();
  synth->add_option("--per-class", s.per_class, "Clips per class")->required()->check(CLI::PositiveNumber);
  synth->add_option("--frames-per-clip", s.cfg.frames_per_clip)->check(CLI::PositiveNumber);
  synth->add_option("--height", s.cfg.height)->check(CLI::PositiveNumber);
  synth->add_option("--width", s.cfg.width)->check(CLI::PositiveNumber);
  synth->add_option("--object-size", s.cfg.object_size)->check(CLI::PositiveNumber);
  synth->add_option("--object-intensity", s.cfg.object_intensity);
  synth->add_option("--noise-max", s.cfg.noise_max);
  synth->add_option("--speeds", s.cfg.speeds, "Comma-separated pixels/frame")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  synth->add_option("--motion", s.motion, "traverse | wrap")->check(CLI::IsMember({"traverse", "wrap"}));

  EvalOptions e;
  auto* eval = app.add_subcommand("eval", "Train and evaluate the per-frame linear classifier");
  eval->add_option("--data-dir", e.data_dir, "Directory with train/ and test/ manifests")->required();
  eval->add_option("--strategies", e.strategies, "Comma-separated strategies")
      ->delimiter(',')
      ->check(strategy_name());
  eval->add_option("--seeds", e.seeds, "Comma-separated training seeds")->delimiter(',');
  eval->add_option("--lr", e.train.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber);
  eval->add_option("--epochs", e.train.epochs)->check(CLI::PositiveNumber);
  eval->add_option("--batch-size", e.train.batch_size)->check(CLI::PositiveNumber);
  eval->add_option("--frames,-T", e.train.model_frames, "Model frame count T")->check(CLI::PositiveNumber);
  eval->add_flag("--auto-synth", e.auto_synth, "Generate the dataset when missing");
  eval->add_option("--train-per-class", e.train_per_class)->check(CLI::PositiveNumber);
  eval->add_option("--test-per-class", e.test_per_class)->check(CLI::PositiveNumber);
  eval->add_option("--metrics", e.metrics, "Metrics CSV (default: <data-dir>/metrics.csv)");
  e.spatial.add_to(eval);

  BenchOptions b;
  auto* bench = app.add_subcommand("bench", "Measure pipeline and gather throughput");
  bench->add_option("--manifest", b.manifest, "Manifest CSV")->required();
  bench->add_option("--strategy,--strategies", b.strategies, "Strategies (default: all)")
      ->delimiter(',')
      ->check(strategy_name());
  bench->add_option("--frames,-T", b.frames, "Model frame count T")->check(CLI::PositiveNumber);
  bench->add_option("--repeat", b.repeat, "Measurements per strategy")->check(CLI::PositiveNumber);
  bench->add_option("--min-time-ms", b.min_time_ms, "Minimum timed duration per gather sample")
      ->check(CLI::PositiveNumber);
  b.spatial.add_to(bench);

  std::vector<std::string> argv_store(args.begin(), args.end());
  if (argv_store.empty()) argv_store.emplace_back("chanclip");
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    print_usage(app, out);
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& pe) {
    err << "error: " << pe.what() << "\n\n";
    print_usage(app, err);
    return kExitUsage;
  }

  try {
    if (*transform) return cmd_transform(g, t, out, err);
    if (*render) return cmd_render(g, r, out);
    if (*synth) return cmd_synth(g, s, out);
    if (*eval) return cmd_eval(g, e, out, err);
    if (*bench) return cmd_bench(g, b, out);
  } catch (const UsageError& ue) {
    err << "error: " << ue.what() << "\n\n";
    print_usage(app, err);
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace chanclip::cli
