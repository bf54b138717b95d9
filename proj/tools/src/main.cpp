#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "vccgm/errors.hpp"

// Exit codes: 0 success, 2 usage, 3 data error, 4 numerical abort.
int main(int argc, char** argv) {
  CLI::App app{"conditional generation on scalar labels with adaptive vicinities"};
  app.require_subcommand(1);

  vccgm::cli::SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth-data", "generate a toy dataset with an "
                                                     "imbalanced label profile");
  synth_cmd->add_option("--pattern", synth.pattern, "unimodal|bimodal|trimodal|balanced")
      ->check(CLI::IsMember({"unimodal", "bimodal", "trimodal", "balanced"}));
  synth_cmd->add_option("--n-labels", synth.n_labels, "grid size over [0,1]");
  synth_cmd->add_option("--per-label", synth.per_label, "samples per label before subsampling "
                                                        "(default: peak)");
  synth_cmd->add_option("--family", synth.family, "circle2|line1|helix3");
  synth_cmd->add_option("--base-std", synth.base_std, "conditional stddev at y=0");
  synth_cmd->add_option("--std-slope", synth.std_slope, "stddev slope in y");
  synth_cmd->add_option("--decay", synth.decay, "count decay rate per raw label unit");
  synth_cmd->add_option("--peak", synth.peak, "peak per-label count");
  synth_cmd->add_option("--noise-std", synth.noise_std, "count perturbation stddev (0 = off)");
  synth_cmd->add_option("--raw-span", synth.raw_span, "raw label units spanned by [0,1]");
  synth_cmd->add_option("--modes", synth.modes, "mode positions in [0,1]")->delimiter(',');
  synth_cmd->add_flag("--sum-kernels", synth.sum_kernels, "sum mode kernels instead of max");
  synth_cmd->add_flag("--csv", synth.csv, "write CSV instead of binary");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("--out", synth.out, "output dataset file")->required();

  vccgm::cli::InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect-vicinity", "sweep adaptive vicinities over "
                                                             "a center grid");
  inspect_cmd->add_option("--data", inspect.data, "dataset file")->required();
  inspect_cmd->add_option("--nav", inspect.n_av_list, "minimum effective sample counts")->delimiter(',');
  inspect_cmd->add_option("--centers", inspect.n_centers, "number of grid centers");
  inspect_cmd->add_option("--center-list", inspect.centers, "explicit centers in [0,1]")->delimiter(',');
  inspect_cmd->add_option("--decay-exponent", inspect.decay_exponent, "1 or 2");
  inspect_cmd->add_option("--raw-min", inspect.raw_min, "label range lower bound");
  inspect_cmd->add_option("--raw-max", inspect.raw_max, "label range upper bound");
  inspect_cmd->add_option("--out", inspect.out, "output CSV")->required();

  vccgm::cli::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a generator on a dataset");
  train_cmd->add_option("--config", train.config, "JSON config file");
  train_cmd->add_option("--data", train.data, "dataset file")->required();
  train_cmd->add_option("--out", train.out, "output directory")->required();
  train_cmd->add_option("--ablation", train.ablation, "preset: table3");
  train_cmd->add_option("--ablation-vicinity", train.ablation_vicinity, "soft|hybrid");
  train_cmd->add_option("--steps", train.steps, "override: generator steps");
  train_cmd->add_option("--batch-size", train.batch_size, "override: batch size");
  train_cmd->add_option("--seed", train.seed, "override: seed");
  train_cmd->add_option("--n-av", train.n_av, "override: minimum effective samples");
  train_cmd->add_option("--sigma", train.sigma, "override: label noise stddev");
  train_cmd->add_option("--kappa", train.kappa, "override: fixed vicinity radius");
  train_cmd->add_option("--lr", train.learning_rate, "override: learning rate");
  train_cmd->add_option("--num-d-steps", train.num_d_steps, "override: D updates per G update");
  train_cmd->add_option("--vicinity-mode", train.vicinity_mode,
                        "override: hard|soft|soft_av|hybrid_av");
  train_cmd->add_option("--loss-form", train.loss_form, "override: vanilla|hinge");
  train_cmd->add_option("--lambda-reg-d", train.lambda_reg_d, "override");
  train_cmd->add_option("--lambda-dre-d", train.lambda_dre_d, "override");
  train_cmd->add_option("--lambda-reg-g", train.lambda_reg_g, "override");
  train_cmd->add_option("--lambda-f-g", train.lambda_f_g, "override");

  vccgm::cli::EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint against a dataset");
  eval_cmd->add_option("--ckpt", eval.ckpt, "checkpoint file")->required();
  eval_cmd->add_option("--data", eval.data, "dataset file")->required();
  eval_cmd->add_option("--out", eval.out, "report CSV path or output directory")->required();
  eval_cmd->add_option("--centers", eval.n_centers, "number of evaluation centers");
  eval_cmd->add_option("--window-radius", eval.window_radius,
                       "real-sample window radius (0 = 2/centers)");
  eval_cmd->add_option("--n-fake", eval.n_fake, "fakes per center");
  eval_cmd->add_option("--seed", eval.seed, "RNG seed");
  eval_cmd->add_option("--surrogate-steps", eval.surrogate_steps,
                       "training cap for the label regressor");

  vccgm::cli::ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "aggregate eval reports across runs");
  report_cmd->add_option("runs", report.runs, "run directories containing report.csv")
      ->required();
  report_cmd->add_option("--out", report.out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (*synth_cmd) return vccgm::cli::cmd_synth_data(synth);
    if (*inspect_cmd) return vccgm::cli::cmd_inspect_vicinity(inspect);
    if (*train_cmd) return vccgm::cli::cmd_train(train);
    if (*eval_cmd) return vccgm::cli::cmd_eval(eval);
    if (*report_cmd) return vccgm::cli::cmd_report(report);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const vccgm::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const vccgm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const vccgm::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
