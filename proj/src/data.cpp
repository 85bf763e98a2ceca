#include "mosm/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mosm/errors.hpp"

namespace mosm {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw DataError(msg.str());
}

double parse_number(const std::string& cell, const std::string& source, int line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty()) fail(source, line, "cannot parse number '" + cell + "'");
  if (!std::isfinite(v)) fail(source, line, "non-finite value '" + cell + "'");
  return v;
}

int parse_channel(const std::string& cell, const std::string& source, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    fail(source, line, "cannot parse channel id '" + cell + "'");
  }
  if (v < 1) fail(source, line, "channel ids are 1-based, got " + cell);
  return v;
}

// Returns input dimension; `with_y` reports whether the trailing y column is present.
int parse_header(const std::string& line, const std::string& source, bool y_optional, bool& with_y) {
  const auto fields = split_fields(line);
  std::size_t idx = 0;
  while (idx < fields.size() && fields[idx] == "x" + std::to_string(idx + 1)) ++idx;
  const int n = static_cast<int>(idx);
  const bool ok_channel = n >= 1 && idx < fields.size() && fields[idx] == "channel";
  if (ok_channel && idx + 2 == fields.size() && fields[idx + 1] == "y") {
    with_y = true;
    return n;
  }
  if (ok_channel && y_optional && idx + 1 == fields.size()) {
    with_y = false;
    return n;
  }
  fail(source, 1, "unknown header '" + line + "' (expected x1,...,xn,channel,y)");
}

Dataset read_rows(std::istream& in, const std::string& source, bool y_optional) {
  std::string line;
  if (!std::getline(in, line)) fail(source, 1, "missing header");
  bool with_y = true;
  const int n = parse_header(trim(line), source, y_optional, with_y);
  const std::size_t width = static_cast<std::size_t>(n) + (with_y ? 2 : 1);

  std::vector<double> locs;
  std::vector<int> channels;
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      std::ostringstream msg;
      msg << "expected " << width << " fields, found " << fields.size();
      fail(source, line_no, msg.str());
    }
    for (int d = 0; d < n; ++d) locs.push_back(parse_number(fields[d], source, line_no));
    channels.push_back(parse_channel(fields[n], source, line_no) - 1);
    values.push_back(with_y ? parse_number(fields[n + 1], source, line_no) : 0.0);
  }

  Dataset data;
  const auto rows = static_cast<Eigen::Index>(channels.size());
  data.locations = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      locs.data(), rows, n);
  data.channels = std::move(channels);
  data.values = Eigen::Map<const Vector>(values.data(), rows);
  return data;
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& source) { return read_rows(in, source, false); }

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_rows(in, path.string(), false);
}

Dataset load_query_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_rows(in, path.string(), true);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto old = out.precision(17);
  for (int d = 0; d < data.input_dim(); ++d) out << 'x' << d + 1 << ',';
  out << "channel,y\n";
  for (int r = 0; r < data.size(); ++r) {
    for (int d = 0; d < data.input_dim(); ++d) out << data.locations(r, d) << ',';
    out << data.channels[static_cast<std::size_t>(r)] + 1 << ',' << data.values[r] << '\n';
  }
  out.precision(old);
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, data);
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

double NormalizationState::apply(int channel, double y) const {
  return (y - mean[channel]) / stddev[channel];
}

double NormalizationState::invert(int channel, double z) const {
  return z * stddev[channel] + mean[channel];
}

Dataset NormalizationState::apply(const Dataset& data) const {
  data.validate(static_cast<int>(mean.size()));
  Dataset out = data;
  for (int r = 0; r < out.size(); ++r) out.values[r] = apply(out.channels[static_cast<std::size_t>(r)], out.values[r]);
  return out;
}

Dataset NormalizationState::invert(const Dataset& data) const {
  data.validate(static_cast<int>(mean.size()));
  Dataset out = data;
  for (int r = 0; r < out.size(); ++r) out.values[r] = invert(out.channels[static_cast<std::size_t>(r)], out.values[r]);
  return out;
}

nlohmann::json NormalizationState::to_json() const {
  return {{"mean", std::vector<double>(mean.data(), mean.data() + mean.size())},
          {"std", std::vector<double>(stddev.data(), stddev.data() + stddev.size())}};
}

NormalizationState NormalizationState::from_json(const nlohmann::json& doc) {
  try {
    const auto m = doc.at("mean").get<std::vector<double>>();
    const auto s = doc.at("std").get<std::vector<double>>();
    if (m.size() != s.size()) throw ConfigError("normalization mean/std lengths differ");
    NormalizationState st;
    st.mean = Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size()));
    st.stddev = Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
    if ((st.stddev.array() <= 0.0).any()) throw ConfigError("normalization std must be positive");
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed normalization state: ") + e.what());
  }
}

std::pair<Dataset, NormalizationState> normalize(const Dataset& data,
                                                 const std::optional<NormalizationState>& state,
                                                 int channels) {
  if (state) return {state->apply(data), *state};
  const int m = channels > 0 ? channels : data.channel_count();
  data.validate(m);
  NormalizationState st;
  st.mean = Vector::Zero(m);
  st.stddev = Vector::Ones(m);
  for (int i = 0; i < m; ++i) {
    std::vector<double> ys;
    for (int r = 0; r < data.size(); ++r) {
      if (data.channels[static_cast<std::size_t>(r)] == i) ys.push_back(data.values[r]);
    }
    if (ys.empty()) continue;  // channel absent from the fitting set: identity
    const Eigen::Map<const Vector> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const double mu = y.mean();
    const double sd = std::sqrt((y.array() - mu).square().mean());
    if (!(sd > 0.0)) {
      throw DataError("channel " + std::to_string(i + 1) + " is constant; cannot normalize");
    }
    st.mean[i] = mu;
    st.stddev[i] = sd;
  }
  return {st.apply(data), st};
}

std::pair<Dataset, Dataset> mask_failure(const Dataset& data, int channel, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DataError("failure fraction must lie in (0, 1)");
  std::vector<int> rows;
  for (int r = 0; r < data.size(); ++r) {
    if (data.channels[static_cast<std::size_t>(r)] == channel) rows.push_back(r);
  }
  if (rows.empty()) throw DataError("channel " + std::to_string(channel + 1) + " has no observations");
  std::vector<int> by_location = rows;
  std::stable_sort(by_location.begin(), by_location.end(),
                   [&](int a, int b) { return data.locations(a, 0) < data.locations(b, 0); });
  const auto n_test = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(rows.size())));
  if (n_test == 0 || n_test >= rows.size()) throw DataError("sensor-failure split leaves an empty side");

  std::vector<char> is_test(static_cast<std::size_t>(data.size()), 0);
  for (std::size_t t = by_location.size() - n_test; t < by_location.size(); ++t) {
    is_test[static_cast<std::size_t>(by_location[t])] = 1;
  }
  std::vector<int> train_rows, test_rows;
  for (int r = 0; r < data.size(); ++r) (is_test[static_cast<std::size_t>(r)] ? test_rows : train_rows).push_back(r);
  return {data.select(train_rows), data.select(test_rows)};
}

Dataset uniform_subsample(const Dataset& data, int count, std::uint64_t seed) {
  if (count < 0 || count > data.size()) throw DataError("subsample size exceeds dataset size");
  std::vector<int> idx(static_cast<std::size_t>(data.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 gen(seed);
  // Partial Fisher-Yates: the first `count` slots are a uniform draw.
  for (int t = 0; t < count; ++t) {
    std::uniform_int_distribution<int> pick(t, data.size() - 1);
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick(gen))]);
  }
  idx.resize(static_cast<std::size_t>(count));
  return data.select(idx);
}

}  // namespace mosm
