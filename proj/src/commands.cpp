#include "mosm/commands.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mosm/errors.hpp"
#include "mosm/kernel_io.hpp"
#include "mosm/synth.hpp"

namespace mosm::cli {

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::string csv_of(const Dataset& d) {
  std::ostringstream s;
  write_csv(s, d);
  return s.str();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name, const fs::path& source) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return static_cast<int>(c);
    }
    throw DataError("'" + source.string() + "' has no column '" + name + "'");
  }
};

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      t.header.push_back(cell);
    }
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + cell + "'");
      }
    }
    if (row.size() != t.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": wrong number of fields");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_simulate(const SimulateOptions& opts) {
  SynthConfig cfg = opts.config.empty() ? SynthConfig{} : SynthConfig::from_json(read_json(opts.config));
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();
  const SynthData data = make_synthetic(cfg);

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) throw DataError("cannot create output directory '" + opts.out_dir.string() + "'");

  write_text(opts.out_dir / "train.csv", csv_of(data.train));
  write_text(opts.out_dir / "test.csv", csv_of(data.test));
  std::ostringstream truth;
  write_truth_csv(truth, data.truth);
  write_text(opts.out_dir / "truth.csv", truth.str());
  write_text(opts.out_dir / "config.resolved.json", cfg.to_json().dump(2) + "\n");
}

// ---------------------------------------------------------------------------

nlohmann::json ModelConfig::to_json() const {
  return {{"mode", to_string(mode)},
          {"components", components},
          {"channels", channels},
          {"max_iters", train.max_iters},
          {"tolerance", train.tolerance},
          {"optimizer", to_string(train.optimizer)},
          {"seed", train.seed},
          {"restarts", train.restarts},
          {"init", to_string(train.init)},
          {"learning_rate", train.learning_rate}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("model config must be a JSON object");
  try {
    ModelConfig c;
    c.mode = parse_constraint_mode(doc.value("mode", to_string(c.mode)));
    c.components = doc.value("components", c.components);
    c.channels = doc.value("channels", c.channels);
    c.train.max_iters = doc.value("max_iters", c.train.max_iters);
    c.train.tolerance = doc.value("tolerance", c.train.tolerance);
    c.train.optimizer = parse_optimizer(doc.value("optimizer", to_string(c.train.optimizer)));
    c.train.seed = doc.value("seed", c.train.seed);
    c.train.restarts = doc.value("restarts", c.train.restarts);
    c.train.init = parse_init(doc.value("init", to_string(c.train.init)));
    c.train.learning_rate = doc.value("learning_rate", c.train.learning_rate);
    if (c.components < 1) throw ConfigError("components must be positive");
    c.train.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model config: ") + e.what());
  }
}

namespace {

nlohmann::json dataset_json(const Dataset& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < d.size(); ++r) {
    std::vector<double> x(static_cast<std::size_t>(d.input_dim()));
    for (int c = 0; c < d.input_dim(); ++c) x[static_cast<std::size_t>(c)] = d.locations(r, c);
    rows.push_back({{"x", x}, {"channel", d.channels[static_cast<std::size_t>(r)] + 1}, {"y", d.values[r]}});
  }
  return {{"input_dim", d.input_dim()}, {"rows", rows}};
}

Dataset dataset_from_json(const nlohmann::json& doc) {
  const int n = doc.at("input_dim").get<int>();
  const auto& rows = doc.at("rows");
  Dataset d;
  d.locations.resize(static_cast<Eigen::Index>(rows.size()), n);
  d.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto x = rows[r].at("x").get<std::vector<double>>();
    if (static_cast<int>(x.size()) != n) throw ConfigError("stored training row has the wrong dimension");
    for (int c = 0; c < n; ++c) d.locations(static_cast<Eigen::Index>(r), c) = x[static_cast<std::size_t>(c)];
    d.channels.push_back(rows[r].at("channel").get<int>() - 1);
    d.values[static_cast<Eigen::Index>(r)] = rows[r].at("y").get<double>();
  }
  return d;
}

}  // namespace

TrainSummary cmd_train(const TrainOptions& opts) {
  ModelConfig cfg = opts.config.empty() ? ModelConfig{} : ModelConfig::from_json(read_json(opts.config));
  if (opts.mode) cfg.mode = parse_constraint_mode(*opts.mode);
  if (opts.components) cfg.components = *opts.components;
  if (opts.iters) cfg.train.max_iters = *opts.iters;
  if (opts.seed) cfg.train.seed = *opts.seed;
  if (opts.restarts) cfg.train.restarts = *opts.restarts;
  if (opts.optimizer) cfg.train.optimizer = parse_optimizer(*opts.optimizer);
  if (opts.init) cfg.train.init = parse_init(*opts.init);
  if (cfg.components < 1) throw ConfigError("components must be positive");
  cfg.train.validate();

  const Dataset raw = load_csv(opts.train_csv);
  if (raw.empty()) throw DataError("training file has no rows");
  if (cfg.channels == 0) cfg.channels = raw.channel_count();
  const auto [train_n, state] = normalize(raw, std::nullopt, cfg.channels);

  const MosmKernel k0 = initialize(train_n, cfg.components, cfg.train.seed, cfg.channels, cfg.mode, cfg.train.init);
  FitResult fitted = fit(train_n, k0, cfg.train);

  nlohmann::json trace = nlohmann::json::array();
  for (const auto& e : fitted.trace) trace.push_back({{"iteration", e.iteration}, {"nll", e.nll}, {"jitter", e.jitter}});
  const nlohmann::json doc = {{"kernel", kernel_to_json(fitted.kernel)},
                              {"normalization", state.to_json()},
                              {"config", cfg.to_json()},
                              {"initial_nll", fitted.initial_nll},
                              {"final_nll", fitted.final_nll},
                              {"restart_nll", fitted.restart_nll},
                              {"best_restart", fitted.best_restart},
                              {"trace", trace},
                              {"train_data", dataset_json(raw)}};
  if (!opts.model_out.parent_path().empty()) fs::create_directories(opts.model_out.parent_path());
  write_text(opts.model_out, doc.dump(2) + "\n");
  std::ostringstream tcsv;
  write_trace_csv(tcsv, fitted.trace);
  write_text(fs::path(opts.model_out.string() + ".trace.csv"), tcsv.str());

  return TrainSummary{cfg, std::move(fitted), state};
}

StoredModel load_model(const fs::path& path) {
  const nlohmann::json doc = read_json(path);
  try {
    StoredModel m;
    m.kernel = kernel_from_json(doc.at("kernel"));
    m.normalization = NormalizationState::from_json(doc.at("normalization"));
    m.train = dataset_from_json(doc.at("train_data"));
    m.config = ModelConfig::from_json(doc.at("config"));
    if (m.normalization.mean.size() != m.kernel.channels()) {
      throw ConfigError("normalization state does not match kernel channel count");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed model file '" + path.string() + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------

void cmd_predict(const PredictOptions& opts) {
  const StoredModel stored = load_model(opts.model);
  const Dataset queries = load_query_csv(opts.query);
  if (queries.empty()) throw DataError("query file has no rows");
  if (queries.input_dim() != stored.kernel.input_dim()) {
    throw DataError("query input dimension does not match the model");
  }
  queries.validate(stored.kernel.channels());

  const GpModel model(stored.kernel, stored.normalization.apply(stored.train));
  const MarginalPosterior post = model.marginal(queries, opts.include_noise);

  std::ostringstream out;
  out.precision(17);
  for (int d = 0; d < queries.input_dim(); ++d) out << 'x' << d + 1 << ',';
  out << "channel,mean,std\n";
  for (int r = 0; r < queries.size(); ++r) {
    const int c = queries.channels[static_cast<std::size_t>(r)];
    for (int d = 0; d < queries.input_dim(); ++d) out << queries.locations(r, d) << ',';
    const double mean = stored.normalization.invert(c, post.mean[r]);
    const double sd = std::sqrt(post.variance[r]) * stored.normalization.stddev[c];
    out << c + 1 << ',' << mean << ',' << sd << '\n';
  }
  write_text(opts.out, out.str());
}

// ---------------------------------------------------------------------------

std::vector<ChannelMae> cmd_evaluate(const EvaluateOptions& opts) {
  const Table pred = read_table(opts.predictions);
  const Dataset truth = load_csv(opts.truth);
  const int pc = pred.column("channel", opts.predictions);
  const int pm = pred.column("mean", opts.predictions);
  const int n = truth.input_dim();
  std::vector<int> px;
  for (int d = 0; d < n; ++d) px.push_back(pred.column("x" + std::to_string(d + 1), opts.predictions));

  std::map<std::vector<double>, double> by_key;
  for (const auto& row : pred.rows) {
    std::vector<double> key{row[static_cast<std::size_t>(pc)]};
    for (int c : px) key.push_back(row[static_cast<std::size_t>(c)]);
    by_key[key] = row[static_cast<std::size_t>(pm)];
  }

  std::optional<NormalizationState> norm;
  if (!opts.model.empty()) norm = load_model(opts.model).normalization;

  std::map<int, std::vector<std::pair<double, double>>> per_channel;  // truth, estimate
  for (int r = 0; r < truth.size(); ++r) {
    const int c = truth.channels[static_cast<std::size_t>(r)];
    std::vector<double> key{static_cast<double>(c + 1)};
    for (int d = 0; d < n; ++d) key.push_back(truth.locations(r, d));
    const auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw DataError("truth row " + std::to_string(r + 2) + " has no matching prediction");
    }
    per_channel[c].push_back({truth.values[r], it->second});
  }

  std::vector<ChannelMae> report;
  for (const auto& [c, pairs] : per_channel) {
    Vector t(static_cast<Eigen::Index>(pairs.size())), e(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      t[static_cast<Eigen::Index>(k)] = pairs[k].first;
      e[static_cast<Eigen::Index>(k)] = pairs[k].second;
    }
    ChannelMae row;
    row.channel = c + 1;
    row.count = static_cast<int>(pairs.size());
    row.mae = mae(t, e);
    if (norm) {
      if (c >= norm->stddev.size()) throw DataError("truth channel not present in the model");
      row.normalized_mae = row.mae / norm->stddev[c];
    }
    report.push_back(row);
  }

  std::ostringstream out;
  out.precision(17);
  out << "channel,n,mae" << (norm ? ",mae_normalized" : "") << '\n';
  for (const auto& r : report) {
    out << r.channel << ',' << r.count << ',' << r.mae;
    if (r.normalized_mae) out << ',' << *r.normalized_mae;
    out << '\n';
  }
  if (opts.out.empty()) {
    std::cout << out.str();
  } else {
    write_text(opts.out, out.str());
  }
  return report;
}

// ---------------------------------------------------------------------------

void cmd_spectra(const SpectraOptions& opts) {
  const StoredModel stored = load_model(opts.model);
  const MosmKernel& k = stored.kernel;
  const int i = opts.channel_i - 1;
  const int j = opts.channel_j - 1;
  if (i < 0 || j < 0 || i >= k.channels() || j >= k.channels()) {
    throw ConfigError("channel pair outside the model's channels");
  }
  if (opts.omega_count < 2 || opts.tau_count < 2) throw ConfigError("grids need at least two points");

  // Grids run along the first input axis.
  std::ostringstream dens;
  dens.precision(17);
  dens << "omega,re,im\n";
  Vector w = Vector::Zero(k.input_dim());
  for (int t = 0; t < opts.omega_count; ++t) {
    w[0] = opts.omega_min + (opts.omega_max - opts.omega_min) * t / (opts.omega_count - 1);
    const auto s = cross_density(k, i, j, w);
    dens << w[0] << ',' << s.real() << ',' << s.imag() << '\n';
  }
  std::ostringstream kern;
  kern.precision(17);
  kern << "tau,k\n";
  Vector tau = Vector::Zero(k.input_dim());
  for (int t = 0; t < opts.tau_count; ++t) {
    tau[0] = opts.tau_min + (opts.tau_max - opts.tau_min) * t / (opts.tau_count - 1);
    kern << tau[0] << ',' << mosm_kernel(k, i, j, tau) << '\n';
  }
  write_text(fs::path(opts.out_prefix.string() + "_density.csv"), dens.str());
  write_text(fs::path(opts.out_prefix.string() + "_kernel.csv"), kern.str());
}

// ---------------------------------------------------------------------------

void cmd_split(const SplitOptions& opts) {
  const Dataset data = load_csv(opts.input);
  auto [train, test] = mask_failure(data, opts.channel - 1, opts.fraction);
  if (opts.subsample) {
    if (*opts.subsample > train.size()) throw DataError("subsample larger than the training side");
    train = uniform_subsample(train, *opts.subsample, opts.seed);
  }
  save_csv(opts.train_out, train);
  save_csv(opts.test_out, test);
}

}  // namespace mosm::cli
