#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace vccgm::cli {

struct SynthArgs {
  std::string pattern = "unimodal";  // unimodal|bimodal|trimodal|balanced
  std::int64_t n_labels = 99;
  std::int64_t per_label = 0;  // 0: peak count
  std::string family = "circle2";
  double base_std = 0.05;
  double std_slope = 0.05;
  double decay = 0.1;          // per raw label unit
  std::int64_t peak = 49;
  double noise_std = 5.0;
  double raw_span = 90.0;      // raw units per normalized unit for distances
  std::vector<double> modes;   // normalized positions; defaults per pattern
  bool sum_kernels = false;
  bool csv = false;
  std::uint64_t seed = 1;
  std::string out;
};
int cmd_synth_data(const SynthArgs& args);

struct InspectArgs {
  std::string data;
  std::vector<std::int64_t> n_av_list{30};
  std::int64_t n_centers = 101;
  std::vector<double> centers;  // explicit centers override the grid
  int decay_exponent = 2;
  double raw_min = std::numeric_limits<double>::quiet_NaN();
  double raw_max = std::numeric_limits<double>::quiet_NaN();
  std::string out;
};
int cmd_inspect_vicinity(const InspectArgs& args);

struct TrainArgs {
  std::string config;  // JSON file; empty: defaults
  std::string data;
  std::string out;
  std::string ablation;           // empty or "table3"
  std::string ablation_vicinity = "hybrid";  // soft|hybrid
  // flag overrides (NaN / -1 / empty: keep config value)
  double steps = -1;
  double batch_size = -1;
  double seed = -1;
  double n_av = -1;
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double learning_rate = -1;
  double num_d_steps = -1;
  std::string vicinity_mode;
  std::string loss_form;
  double lambda_reg_d = -1, lambda_dre_d = -1, lambda_reg_g = -1, lambda_f_g = -1;
};
int cmd_train(const TrainArgs& args);

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string out;  // report CSV path, or a directory
  std::int64_t n_centers = 101;
  double window_radius = 0.0;  // 0: 2 / n_centers
  std::int64_t n_fake = 200;
  std::uint64_t seed = 1;
  std::int64_t surrogate_steps = 4000;
};
int cmd_eval(const EvalArgs& args);

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
};
int cmd_report(const ReportArgs& args);

}  // namespace vccgm::cli
