#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "vccgm/evalsuite.hpp"
#include "vccgm/synth.hpp"
#include "vccgm/trainer.hpp"

namespace vccgm::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

double snap_to_grid(double y, std::int64_t n_labels) {
  double pos = std::clamp(y, 0.0, 1.0) * static_cast<double>(n_labels - 1);
  return snap_unit(std::nearbyint(pos) / static_cast<double>(n_labels - 1));
}

std::vector<double> default_modes(ImbalanceSpec::Pattern p) {
  switch (p) {
    case ImbalanceSpec::Pattern::unimodal: return {0.5};
    case ImbalanceSpec::Pattern::bimodal: return {0.25, 0.75};
    case ImbalanceSpec::Pattern::trimodal: return {0.2, 0.5, 0.8};
  }
  return {0.5};
}

void write_label_histogram(const fs::path& path, const Dataset& ds) {
  auto lo = *std::min_element(ds.labels.begin(), ds.labels.end());
  auto hi = *std::max_element(ds.labels.begin(), ds.labels.end());
  if (!(lo < hi)) hi = lo + 1.0;
  LabelIndex idx = build_index(ds.labels, lo, hi);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  os << "label,count\n";
  char buf[64];
  for (std::int64_t i = 0; i < idx.num_distinct(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g,%lld\n",
                  idx.denormalize(idx.distinct()[static_cast<std::size_t>(i)]),
                  static_cast<long long>(idx.counts()[static_cast<std::size_t>(i)]));
    os << buf;
  }
}

std::string run_label(const std::string& path) {
  fs::path p(path);
  std::string name = p.filename().string();
  if (name.empty()) name = p.parent_path().filename().string();
  if (name.empty()) name = path;
  std::replace(name.begin(), name.end(), ',', '_');
  return name;
}

}  // namespace

int cmd_synth_data(const SynthArgs& args) {
  if (args.out.empty()) throw UsageError("synth-data: --out is required");
  ImbalanceSpec::Pattern pattern{};
  bool balanced = args.pattern == "balanced";
  if (!balanced) pattern = ImbalanceSpec::parse_pattern(args.pattern);

  ToyFamily family = ToyFamily::parse(args.family, args.base_std, args.std_slope);
  std::int64_t per_label = args.per_label > 0 ? args.per_label : args.peak;
  ToyDataset full = make_toy_dataset(args.n_labels, per_label, family, args.seed);

  ToyDataset out_ds = full;
  if (!balanced) {
    std::vector<double> modes = args.modes.empty() ? default_modes(pattern) : args.modes;
    for (double& m : modes) m = snap_to_grid(m, args.n_labels);

    LabelIndex idx = build_index(full.data.labels, 0.0, 1.0);
    std::vector<double> raw_labels(idx.distinct().begin(), idx.distinct().end());
    for (double& y : raw_labels) y *= args.raw_span;
    std::vector<double> raw_modes = modes;
    for (double& m : raw_modes) m *= args.raw_span;

    ImbalanceSpec spec;
    spec.pattern = pattern;
    spec.modes = raw_modes;
    spec.decay_rate = args.decay;
    spec.peak_count = args.peak;
    spec.noise_std = args.noise_std;
    spec.sum_kernels = args.sum_kernels;

    std::uint64_t count_seed = Rng::splitmix64(args.seed ^ 0xc0117ULL);
    std::vector<std::int64_t> counts =
        spec.modes.size() == 1 ? unimodal_counts(raw_labels, raw_modes[0], spec, count_seed)
                               : multimodal_counts(raw_labels, raw_modes, spec, count_seed);
    out_ds = subsample(full, counts, Rng::splitmix64(args.seed ^ 0x5b5e7ULL));
  }

  fs::path out(args.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  bool as_csv = args.csv || out.extension() == ".csv";
  if (as_csv)
    save_dataset_csv(out_ds.data, out);
  else
    save_dataset_binary(out_ds.data, out);

  fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  write_label_histogram(dir / "label_histogram.csv", out_ds.data);

  json cfg{{"pattern", args.pattern},     {"n_labels", args.n_labels},
           {"per_label", per_label},      {"family", args.family},
           {"decay", args.decay},         {"peak", args.peak},
           {"noise_std", args.noise_std}, {"raw_span", args.raw_span},
           {"sum_kernels", args.sum_kernels}};
  RunManifest man;
  man.command = "synth-data";
  man.config_digest = fnv1a64_hex(cfg.dump());
  man.seed = args.seed;
  man.outputs = {out.filename().string(), "label_histogram.csv"};
  write_manifest(dir, man);

  std::cout << "wrote " << out_ds.data.n() << " samples (d=" << out_ds.data.d << ") to "
            << out.string() << "\n";
  return 0;
}

int cmd_inspect_vicinity(const InspectArgs& args) {
  if (args.data.empty() || args.out.empty())
    throw UsageError("inspect-vicinity: --data and --out are required");
  Dataset ds = load_dataset(args.data);
  double rmin = std::isnan(args.raw_min)
                    ? *std::min_element(ds.labels.begin(), ds.labels.end())
                    : args.raw_min;
  double rmax = std::isnan(args.raw_max)
                    ? *std::max_element(ds.labels.begin(), ds.labels.end())
                    : args.raw_max;
  LabelIndex idx = build_index(ds.labels, rmin, rmax);

  std::vector<double> centers = args.centers;
  if (centers.empty()) {
    if (args.n_centers < 2) throw UsageError("inspect-vicinity: need at least 2 centers");
    centers = default_centers(args.n_centers);
  }

  fs::path out(args.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out, std::ios::trunc);
  if (!os) throw DataError("cannot open '" + out.string() + "' for writing");
  os << "y_c,n_av,kappa_l,kappa_r,kappa,nu,n_c\n";
  char buf[160];
  for (std::int64_t n_av : args.n_av_list) {
    for (double y_c : centers) {
      VicinityParams p = build_adaptive(idx, y_c, n_av, args.decay_exponent);
      std::snprintf(buf, sizeof(buf), "%.9g,%lld,%.9g,%.9g,%.9g,%.9g,%lld\n", y_c,
                    static_cast<long long>(n_av), p.kappa_left, p.kappa_right, p.kappa, p.nu,
                    static_cast<long long>(p.n_c));
      os << buf;
    }
  }
  os.flush();

  json cfg{{"n_av", args.n_av_list},
           {"n_centers", centers.size()},
           {"decay_exponent", args.decay_exponent}};
  RunManifest man;
  man.command = "inspect-vicinity";
  man.config_digest = fnv1a64_hex(cfg.dump());
  man.inputs = {args.data};
  man.outputs = {out.filename().string()};
  write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), man);
  return 0;
}

namespace {

TrainConfig apply_overrides(TrainConfig cfg, const TrainArgs& args) {
  if (args.steps >= 1) cfg.steps = static_cast<std::int64_t>(args.steps);
  if (args.batch_size >= 1) cfg.batch_size = static_cast<std::int64_t>(args.batch_size);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.n_av >= 1) cfg.n_av = static_cast<std::int64_t>(args.n_av);
  if (!std::isnan(args.sigma)) cfg.sigma = args.sigma;
  if (!std::isnan(args.kappa)) cfg.kappa = args.kappa;
  if (args.learning_rate > 0) cfg.learning_rate = args.learning_rate;
  if (args.num_d_steps >= 1) cfg.num_d_steps = static_cast<std::int64_t>(args.num_d_steps);
  if (!args.vicinity_mode.empty()) cfg.vicinity_mode = parse_vicinity_mode(args.vicinity_mode);
  if (!args.loss_form.empty()) cfg.loss_form = parse_adv_form(args.loss_form);
  if (args.lambda_reg_d >= 0) cfg.weights.lambda_reg_d = args.lambda_reg_d;
  if (args.lambda_dre_d >= 0) cfg.weights.lambda_dre_d = args.lambda_dre_d;
  if (args.lambda_reg_g >= 0) cfg.weights.lambda_reg_g = args.lambda_reg_g;
  if (args.lambda_f_g >= 0) cfg.weights.lambda_f_g = args.lambda_f_g;
  cfg.validate();
  return cfg;
}

int run_one_training(const TrainConfig& cfg, const Dataset& ds, const fs::path& dir,
                     const std::string& data_path) {
  Trainer trainer(cfg, ds);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "effective_config.json", std::ios::trunc);
    os << trainer.config().to_json() << "\n";
  }
  TrainResult result = trainer.train(dir);

  RunManifest man;
  man.command = "train";
  man.config_digest = fnv1a64_hex(trainer.config().to_json());
  man.seed = cfg.seed;
  man.inputs = {data_path};
  man.outputs = {"training_log.csv", "effective_config.json"};
  if (!result.aborted) man.outputs.push_back("final_ema.bin");
  write_manifest(dir, man);

  if (result.aborted) {
    std::cerr << "training aborted at step " << result.completed_steps << ": "
              << result.abort_reason << "\n";
    return 4;
  }
  std::cout << "trained " << result.completed_steps << " steps -> " << dir.string();
  if (result.log_clamp_events > 0)
    std::cout << " (log clamp events: " << result.log_clamp_events << ")";
  std::cout << "\n";
  return 0;
}

}  // namespace

int cmd_train(const TrainArgs& args) {
  if (args.data.empty() || args.out.empty())
    throw UsageError("train: --data and --out are required");
  TrainConfig base;
  if (!args.config.empty()) {
    if (!fs::exists(args.config))
      throw UsageError("train: config file '" + args.config + "' does not exist");
    base = TrainConfig::from_json(read_file(args.config));
  }
  base = apply_overrides(base, args);
  Dataset ds = load_dataset(args.data);

  if (args.ablation.empty()) return run_one_training(base, ds, args.out, args.data);

  if (args.ablation != "table3")
    throw UsageError("train: unknown ablation preset '" + args.ablation + "'");
  VicinityMode av_mode;
  if (args.ablation_vicinity == "soft")
    av_mode = VicinityMode::soft_av;
  else if (args.ablation_vicinity == "hybrid")
    av_mode = VicinityMode::hybrid_av;
  else
    throw UsageError("train: --ablation-vicinity must be soft or hybrid");

  // Four-row block: baseline, +AV, +AV+Reg, +AV+Reg+DRE.
  struct Row {
    const char* name;
    bool av;
    bool reg;
    bool dre;
  };
  const Row rows[] = {{"baseline", false, false, false},
                      {"av", true, false, false},
                      {"av_reg", true, true, false},
                      {"av_reg_dre", true, true, true}};
  int rc = 0;
  for (const Row& row : rows) {
    TrainConfig cfg = base;
    cfg.vicinity_mode = row.av ? av_mode : VicinityMode::soft;
    if (!row.reg) {
      cfg.weights.lambda_reg_d = 0.0;
      cfg.weights.lambda_reg_g = 0.0;
    }
    if (!row.dre) {
      cfg.weights.lambda_dre_d = 0.0;
      cfg.weights.lambda_f_g = 0.0;
    }
    std::cout << "[ablation] " << row.name << "\n";
    int one = run_one_training(cfg, ds, fs::path(args.out) / row.name, args.data);
    rc = rc == 0 ? one : rc;
  }
  return rc;
}

int cmd_eval(const EvalArgs& args) {
  if (args.ckpt.empty() || args.data.empty() || args.out.empty())
    throw UsageError("eval: --ckpt, --data and --out are required");

  Checkpoint ckpt = load_checkpoint(args.ckpt);
  CheckpointMeta meta = parse_checkpoint_meta(ckpt.meta_json);
  const ParamStore* gen = nullptr;
  if (ckpt.sections.count("ema"))
    gen = &ckpt.sections.at("ema");
  else if (ckpt.sections.count("gen"))
    gen = &ckpt.sections.at("gen");
  else
    throw DataError("checkpoint holds no generator section");

  Dataset ds = load_dataset(args.data);
  std::vector<double> norm(ds.labels.size());
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    double y = (ds.labels[i] - meta.raw_min) / (meta.raw_max - meta.raw_min);
    if (y < -1e-9 || y > 1.0 + 1e-9)
      throw OutOfRange("eval: dataset label outside the checkpoint's label range");
    norm[i] = snap_unit(std::clamp(y, 0.0, 1.0));
  }

  SurrogateConfig scfg;
  scfg.max_steps = args.surrogate_steps;
  scfg.seed = Rng::splitmix64(args.seed ^ 0x52260ULL);
  SurrogateResult surrogate = train_surrogate_regressor(ds, meta.raw_min, meta.raw_max, scfg);

  EvalConfig cfg;
  cfg.centers = default_centers(args.n_centers);
  cfg.window_radius = args.window_radius;
  cfg.n_fake_per_center = args.n_fake;
  cfg.seed = args.seed;
  cfg.label_scale = meta.raw_max - meta.raw_min;

  ModelSampler sampler(*gen, meta.gen);
  EvalReport report = evaluate(sampler, ds, norm, surrogate_regressor_fn(surrogate.params), cfg);
  report.checkpoint_id = args.ckpt;

  fs::path out(args.out);
  fs::path report_path = out.extension() == ".csv" ? out : out / "report.csv";
  fs::path dir = report_path.has_parent_path() ? report_path.parent_path() : fs::path(".");
  fs::create_directories(dir);
  write_report_csv(report_path, report);

  json summary;
  summary["checkpoint"] = args.ckpt;
  summary["mean_fd"] = report.mean_fd;
  summary["mean_label_score"] = report.mean_label_score;
  summary["mean_diversity"] = report.mean_diversity;
  summary["n_centers"] = report.centers.size();
  summary["n_skipped"] = report.n_skipped;
  summary["n_fake_per_center"] = report.n_fake_per_center;
  summary["window_radius"] = report.window_radius;
  summary["label_scale"] = cfg.label_scale;
  summary["surrogate_val_mae"] = surrogate.val_mae;
  summary["surrogate_reached_target"] = surrogate.reached_target;
  if (!surrogate.reached_target)
    summary["warnings"] = {"surrogate regressor missed its validation MAE target"};
  {
    std::ofstream os(dir / "summary.json", std::ios::trunc);
    os << summary.dump(2) << "\n";
  }

  json cfg_echo{{"n_centers", args.n_centers},
                {"window_radius", args.window_radius},
                {"n_fake", args.n_fake},
                {"surrogate_steps", args.surrogate_steps}};
  RunManifest man;
  man.command = "eval";
  man.config_digest = fnv1a64_hex(cfg_echo.dump());
  man.seed = args.seed;
  man.inputs = {args.ckpt, args.data};
  man.outputs = {report_path.filename().string(), "summary.json"};
  write_manifest(dir, man);

  std::cout << "mean_fd=" << report.mean_fd << " mean_label_score=" << report.mean_label_score
            << " mean_diversity=" << report.mean_diversity << " (skipped " << report.n_skipped
            << " centers)\n";
  return 0;
}

int cmd_report(const ReportArgs& args) {
  if (args.runs.empty() || args.out.empty())
    throw UsageError("report: at least one run directory and --out are required");

  struct Row {
    std::string name;
    bool present = false;
    EvalReport report;
  };
  std::vector<Row> rows;
  for (const std::string& run : args.runs) {
    Row row;
    row.name = run_label(run);
    fs::path report_path = fs::path(run) / "report.csv";
    if (fs::exists(report_path)) {
      row.report = load_report_csv(report_path);
      row.present = true;
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.present != b.present) return a.present;
    if (!a.present) return false;
    return a.report.mean_fd < b.report.mean_fd;
  });

  fs::path dir(args.out);
  fs::create_directories(dir);
  char buf[256];
  {
    std::ofstream os(dir / "summary.csv", std::ios::trunc);
    os << "run,mean_fd,mean_label_score,mean_diversity,n_centers,n_skipped\n";
    for (const Row& r : rows) {
      if (!r.present) continue;
      std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%zu,%lld\n", r.name.c_str(),
                    r.report.mean_fd, r.report.mean_label_score, r.report.mean_diversity,
                    r.report.centers.size(), static_cast<long long>(r.report.n_skipped));
      os << buf;
    }
  }
  {
    std::ofstream os(dir / "summary.md", std::ios::trunc);
    os << "# Run comparison\n\n";
    os << "| run | mean fd | mean label score | mean diversity | centers | skipped |\n";
    os << "|---|---|---|---|---|---|\n";
    for (const Row& r : rows) {
      if (!r.present) continue;
      std::snprintf(buf, sizeof(buf), "| %s | %.6g | %.6g | %.6g | %zu | %lld |\n",
                    r.name.c_str(), r.report.mean_fd, r.report.mean_label_score,
                    r.report.mean_diversity, r.report.centers.size(),
                    static_cast<long long>(r.report.n_skipped));
      os << buf;
    }
    bool any_absent = false;
    for (const Row& r : rows) any_absent = any_absent || !r.present;
    if (any_absent) {
      os << "\nMissing reports:\n\n";
      for (const Row& r : rows)
        if (!r.present) os << "- " << r.name << " (no report.csv)\n";
    }
  }
  {
    // long-format, plot-ready: one line per (run, center)
    std::ofstream os(dir / "curves.csv", std::ios::trunc);
    os << "run,center,fd,label_score,diversity\n";
    for (const Row& r : rows) {
      if (!r.present) continue;
      for (std::size_t i = 0; i < r.report.centers.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g\n", r.name.c_str(),
                      r.report.centers[i], r.report.fd[i], r.report.label_score[i],
                      r.report.diversity[i]);
        os << buf;
      }
    }
  }

  RunManifest man;
  man.command = "report";
  man.config_digest = fnv1a64_hex(json(args.runs).dump());
  man.inputs = args.runs;
  man.outputs = {"summary.csv", "summary.md", "curves.csv"};
  write_manifest(dir, man);
  std::cout << "report over " << rows.size() << " run(s) -> " << dir.string() << "\n";
  return 0;
}

}  // namespace vccgm::cli
