#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mosm/commands.hpp"
#include "mosm/errors.hpp"

namespace cli = mosm::cli;

int main(int argc, char** argv) {
  CLI::App app{"Multi-output spectral mixture Gaussian processes"};
  app.require_subcommand(1);

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate the three-channel synthetic benchmark");
  simulate->add_option("--config", sim.config, "Synthetic config JSON");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--seed", sim.seed, "Override the config seed");

  cli::TrainOptions tr;
  auto* train = app.add_subcommand("train", "Fit a model to a training CSV");
  train->add_option("--data", tr.train_csv, "Training CSV")->required();
  train->add_option("--config", tr.config, "Model config JSON");
  train->add_option("--out", tr.model_out, "Output model JSON")->required();
  train->add_option("--mode", tr.mode, "mosm, csm, sm-lmc or igp");
  train->add_option("--components", tr.components, "Mixture size Q");
  train->add_option("--iters", tr.iters, "Maximum optimizer iterations");
  train->add_option("--seed", tr.seed, "Initialization seed");
  train->add_option("--restarts", tr.restarts, "Number of restarts");
  train->add_option("--optimizer", tr.optimizer, "lbfgs or adam");
  train->add_option("--init", tr.init, "periodogram or uniform");

  cli::PredictOptions pr;
  auto* predict = app.add_subcommand("predict", "Posterior mean and std at query points");
  predict->add_option("--model", pr.model, "Model JSON")->required();
  predict->add_option("--query", pr.query, "Query CSV")->required();
  predict->add_option("--out", pr.out, "Output CSV")->required();
  predict->add_flag("--include-noise", pr.include_noise, "Add observation noise to the std");

  cli::EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Per-channel MAE of predictions");
  evaluate->add_option("--predictions", ev.predictions, "Prediction CSV")->required();
  evaluate->add_option("--truth", ev.truth, "Truth CSV")->required();
  evaluate->add_option("--out", ev.out, "Output CSV (default stdout)");
  evaluate->add_option("--model", ev.model, "Model JSON, adds normalized MAE");

  cli::SpectraOptions sp;
  auto* spectra = app.add_subcommand("spectra", "Cross-spectral density and kernel of a channel pair");
  spectra->add_option("--model", sp.model, "Model JSON")->required();
  spectra->add_option("--i", sp.channel_i, "First channel (1-based)")->required();
  spectra->add_option("--j", sp.channel_j, "Second channel (1-based)")->required();
  spectra->add_option("--omega-min", sp.omega_min);
  spectra->add_option("--omega-max", sp.omega_max);
  spectra->add_option("--omega-count", sp.omega_count);
  spectra->add_option("--tau-min", sp.tau_min);
  spectra->add_option("--tau-max", sp.tau_max);
  spectra->add_option("--tau-count", sp.tau_count);
  spectra->add_option("--out", sp.out_prefix, "Output prefix")->required();

  cli::SplitOptions sl;
  auto* split = app.add_subcommand("split", "Sensor-failure split of a CSV");
  split->add_option("--data", sl.input, "Input CSV")->required();
  split->add_option("--channel", sl.channel, "Failed channel (1-based)")->required();
  split->add_option("--fraction", sl.fraction, "Fraction hidden at the end of the channel");
  split->add_option("--subsample", sl.subsample, "Training rows kept");
  split->add_option("--seed", sl.seed, "Subsample seed");
  split->add_option("--train-out", sl.train_out)->required();
  split->add_option("--test-out", sl.test_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kConfigError;
  }

  try {
    if (*simulate) {
      cli::cmd_simulate(sim);
    } else if (*train) {
      const auto summary = cli::cmd_train(tr);
      std::cerr << "restarts:";
      for (double v : summary.fit.restart_nll) std::cerr << ' ' << v;
      std::cerr << "\nbest restart " << summary.fit.best_restart << ", nll " << summary.fit.initial_nll
                << " -> " << summary.fit.final_nll;
      if (!summary.fit.trace.empty() && summary.fit.trace.back().jitter > 0.0) {
        std::cerr << " (jitter " << summary.fit.trace.back().jitter << ")";
      }
      std::cerr << '\n';
    } else if (*predict) {
      cli::cmd_predict(pr);
    } else if (*evaluate) {
      cli::cmd_evaluate(ev);
    } else if (*spectra) {
      cli::cmd_spectra(sp);
    } else if (*split) {
      cli::cmd_split(sl);
    }
  } catch (const mosm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const mosm::ParameterDomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const mosm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return cli::kDataError;
  } catch (const mosm::ChannelRangeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return cli::kDataError;
  } catch (const mosm::IllConditionedError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return cli::kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kFailure;
  }
  return cli::kOk;
}
