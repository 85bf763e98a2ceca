#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mosm/data.hpp"
#include "mosm/errors.hpp"
#include "support.hpp"

using namespace mosm;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in, "test.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

Dataset line_channel(int count, int channel, int channels) {
  Dataset d;
  d.locations.resize(count, 1);
  d.values.resize(count);
  for (int r = 0; r < count; ++r) {
    d.locations(r, 0) = static_cast<double>((r * 37) % count);  // shuffled order
    d.values[r] = 0.1 * r;
    d.channels.push_back(r < channels ? r : channel);
  }
  return d;
}

}  // namespace

TEST_CASE("load a well-formed file") {
  const Dataset d = parse("x1,channel,y\n0.5,1,2.0\n1.5,2,-1\n2.5,1,3e-2\n");
  CHECK(d.size() == 3);
  CHECK(d.input_dim() == 1);
  CHECK(d.channels == std::vector<int>{0, 1, 0});
  CHECK(d.values[2] == 0.03);
  CHECK(d.locations(1, 0) == 1.5);

  const Dataset two = parse("x1,x2,channel,y\r\n1,2,3,4\r\n");
  CHECK(two.input_dim() == 2);
  CHECK(two.channels[0] == 2);
}

TEST_CASE("malformed files are rejected with a line number") {
  CHECK(error_of("x1,channel,y\n0,1,1\n1,1,nan\n").find("test.csv:3") != std::string::npos);
  CHECK(error_of("x1,channel,y\n0,1,inf\n").find(":2") != std::string::npos);
  CHECK(error_of("x1,channel,y\n0,0,1\n").find(":2") != std::string::npos);
  CHECK(error_of("x1,channel,y\n0,1.5,1\n").find(":2") != std::string::npos);
  CHECK(error_of("x1,channel,y\n0,1\n").find(":2") != std::string::npos);
  CHECK(error_of("x1,channel,y\n0,1,abc\n").find(":2") != std::string::npos);
  CHECK_FALSE(error_of("x,chan,y\n0,1,1\n").empty());
  CHECK_FALSE(error_of("").empty());
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("save and load round-trip") {
  std::mt19937_64 gen(51);
  const Dataset d = testing::random_dataset(gen, 3, 2, 17);
  const auto path = std::filesystem::temp_directory_path() / "mosm_roundtrip.csv";
  save_csv(path, d);
  const Dataset back = load_csv(path);
  CHECK(back.locations == d.locations);
  CHECK(back.values == d.values);
  CHECK(back.channels == d.channels);
  std::filesystem::remove(path);
}

TEST_CASE("query files may omit y") {
  const auto path = std::filesystem::temp_directory_path() / "mosm_query.csv";
  {
    std::ofstream out(path);
    out << "x1,channel\n0.5,1\n1.0,2\n";
  }
  const Dataset q = load_query_csv(path);
  CHECK(q.size() == 2);
  CHECK(q.channels[1] == 1);
  std::filesystem::remove(path);
}

TEST_CASE("normalization of standard data is nearly the identity") {
  Dataset d;
  d.locations = Matrix::Zero(4, 1);
  d.channels = {0, 0, 0, 0};
  d.values.resize(4);
  d.values << -1.0, 1.0, -1.0, 1.0;
  const auto [out, state] = normalize(d);
  CHECK(state.mean[0] == 0.0);
  CHECK(state.stddev[0] == 1.0);
  CHECK(out.values == d.values);
}

TEST_CASE("normalization is affine invariant and invertible") {
  std::mt19937_64 gen(52);
  const Dataset d = testing::random_dataset(gen, 3, 1, 30);
  Dataset scaled = d;
  scaled.values = 2.0 * d.values.array() + 5.0;
  const auto [a, sa] = normalize(d);
  const auto [b, sb] = normalize(scaled);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() <= 1e-12);

  const Dataset back = sa.invert(a);
  CHECK((back.values - d.values).cwiseAbs().maxCoeff() <= 1e-12);
  for (int c = 0; c < 3; ++c) {
    const Dataset rows = a.channel_rows(c);
    CHECK(std::abs(rows.values.mean()) <= 1e-12);
    CHECK((rows.values.array() - rows.values.mean()).square().mean() == doctest::Approx(1.0).epsilon(1e-12));
  }

  // A supplied state is applied unchanged.
  const auto [c, sc] = normalize(scaled, sa);
  CHECK(sc.mean == sa.mean);
  CHECK((c.values - sa.apply(scaled).values).cwiseAbs().maxCoeff() == 0.0);

  const NormalizationState rt = NormalizationState::from_json(sa.to_json());
  CHECK(rt.mean == sa.mean);
  CHECK(rt.stddev == sa.stddev);
}

TEST_CASE("constant channel cannot be normalized") {
  Dataset d;
  d.locations = Matrix::Zero(3, 1);
  d.channels = {0, 0, 1};
  d.values = Vector::Constant(3, 2.0);
  CHECK_THROWS_AS(normalize(d), DataError);
}

TEST_CASE("sensor failure splits at the location quantile") {
  const Dataset d = line_channel(100, 0, 0);
  const auto [train, test] = mask_failure(d, 0, 0.5);
  CHECK(train.size() == 50);
  CHECK(test.size() == 50);
  CHECK(train.locations.maxCoeff() < test.locations.minCoeff());
  CHECK(train.locations.maxCoeff() == 49.0);

  const auto [tr2, te2] = mask_failure(d, 0, 0.01);
  CHECK(tr2.size() == 99);
  CHECK(te2.size() == 1);
  CHECK(te2.locations(0, 0) == 99.0);
}

TEST_CASE("sensor failure partitions the data and spares other channels") {
  std::mt19937_64 gen(53);
  const Dataset d = testing::random_dataset(gen, 4, 1, 80);
  const auto [train, test] = mask_failure(d, 2, 0.5);
  CHECK(train.size() + test.size() == d.size());
  for (int c : test.channels) CHECK(c == 2);
  for (int c : {0, 1, 3}) CHECK(train.channel_rows(c).size() == d.channel_rows(c).size());

  std::multiset<std::pair<double, double>> all, split;
  for (int r = 0; r < d.size(); ++r) all.insert({d.locations(r, 0), d.values[r]});
  for (const Dataset* part : {&train, &test}) {
    for (int r = 0; r < part->size(); ++r) split.insert({part->locations(r, 0), part->values[r]});
  }
  CHECK(all == split);

  CHECK_THROWS_AS(mask_failure(d, 2, 0.0), DataError);
  CHECK_THROWS_AS(mask_failure(d, 2, 1.0), DataError);
  CHECK_THROWS_AS(mask_failure(d, 7, 0.5), DataError);
  CHECK_THROWS_AS(mask_failure(d.select({0, 1, 2}), 2, 0.5), DataError);
}

TEST_CASE("uniform subsample") {
  std::mt19937_64 gen(54);
  const Dataset d = testing::random_dataset(gen, 2, 1, 40);

  const Dataset all = uniform_subsample(d, 40, 3);
  std::vector<double> a(d.values.data(), d.values.data() + 40), b(all.values.data(), all.values.data() + 40);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);

  CHECK(uniform_subsample(d, 10, 9).values == uniform_subsample(d, 10, 9).values);
  CHECK_THROWS_AS(uniform_subsample(d, 41, 0), DataError);

  // Each row is kept with probability 1/2.
  Dataset index = d;
  for (int r = 0; r < 40; ++r) index.values[r] = r;
  std::vector<int> hits(40, 0);
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    const Dataset sub = uniform_subsample(index, 20, static_cast<std::uint64_t>(s));
    for (int r = 0; r < 20; ++r) ++hits[static_cast<std::size_t>(sub.values[r])];
  }
  for (int h : hits) CHECK(std::abs(h / static_cast<double>(draws) - 0.5) <= 0.02);
}
