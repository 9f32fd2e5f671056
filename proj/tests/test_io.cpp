#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "mahadet/io.hpp"

using namespace mahadet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mahadet_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

gda::FeatureMatrix random_features(Rng& rng, int n, int d, bool labels) {
  gda::FeatureMatrix data;
  data.values = rng.normal_matrix(n, d);
  if (labels) {
    std::vector<std::int32_t> l;
    for (int i = 0; i < n; ++i) l.push_back(static_cast<std::int32_t>(rng.index(3)));
    data.labels = std::move(l);
  }
  return data;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("binary round trip is bit exact") {
  TempDir tmp;
  Rng rng(3);
  const auto data = random_features(rng, 100, 8, true);
  const fs::path file = tmp.path / "feats.mdfv";

  io::write_features(file, data, io::Dtype::f64);
  const auto loaded = io::read_features(file);
  CHECK(loaded.rows() == 100);
  CHECK(loaded.cols() == 8);
  CHECK(std::memcmp(loaded.values.data(), data.values.data(), 100 * 8 * sizeof(double)) == 0);
  REQUIRE(loaded.labels.has_value());
  CHECK(*loaded.labels == *data.labels);

  // file-level round trip for both dtypes
  for (io::Dtype dtype : {io::Dtype::f64, io::Dtype::f32}) {
    const fs::path first = tmp.path / "first.mdfv";
    const fs::path second = tmp.path / "second.mdfv";
    io::write_features(first, data, dtype);
    io::write_features(second, io::read_features(first), dtype);
    CHECK(slurp(first) == slurp(second));
  }
}

TEST_CASE("binary format errors name the offset") {
  TempDir tmp;
  const fs::path bad_magic = tmp.path / "bad.mdfv";
  {
    std::ofstream out(bad_magic, std::ios::binary);
    out << "XXXXrest-of-file-ignored";
  }
  CHECK_THROWS_WITH_AS(io::read_features(bad_magic),
                       doctest::Contains("offset 0"), BadMagic);

  Rng rng(5);
  const auto data = random_features(rng, 10, 4, false);
  const fs::path good = tmp.path / "good.mdfv";
  io::write_features(good, data);
  std::string bytes = slurp(good);

  const fs::path truncated = tmp.path / "trunc.mdfv";
  {
    std::ofstream out(truncated, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 12));
  }
  CHECK_THROWS_AS(io::read_features(truncated), TruncatedFile);

  const fs::path wrong_dtype = tmp.path / "dtype.mdfv";
  {
    std::string mutated = bytes;
    mutated[24] = 9;  // dtype byte
    std::ofstream out(wrong_dtype, std::ios::binary);
    out.write(mutated.data(), static_cast<std::streamsize>(mutated.size()));
  }
  CHECK_THROWS_WITH_AS(io::read_features(wrong_dtype),
                       doctest::Contains("offset 24"), BadDtype);
}

TEST_CASE("csv round trip and errors") {
  TempDir tmp;
  Rng rng(7);
  const auto data = random_features(rng, 25, 5, true);
  const fs::path file = tmp.path / "feats.csv";
  io::write_features(file, data);
  const auto loaded = io::read_features(file);
  CHECK(loaded.rows() == 25);
  // %.17g survives the round trip bit-for-bit
  CHECK(std::memcmp(loaded.values.data(), data.values.data(), 25 * 5 * sizeof(double)) == 0);
  CHECK(*loaded.labels == *data.labels);

  const fs::path ragged = tmp.path / "ragged.csv";
  {
    std::ofstream out(ragged);
    out << "a,b\n1,2\n3\n";
  }
  CHECK_THROWS_WITH_AS(io::read_features(ragged), doctest::Contains("line 3"), RaggedCsv);

  const fs::path unlabeled = tmp.path / "plain.csv";
  {
    std::ofstream out(unlabeled);
    out << "f0,f1\n0.5,1.5\n2.5,3.5\n";
  }
  const auto plain = io::read_features(unlabeled);
  CHECK_FALSE(plain.labels.has_value());
  CHECK(plain.values(1, 1) == 3.5);
}

TEST_CASE("score files") {
  TempDir tmp;
  const fs::path file = tmp.path / "scores.csv";
  Vector scores(3);
  scores << -1.25, 0.0, 17.5;
  io::write_scores(file, scores);
  const auto loaded = io::read_scores(file);
  CHECK((loaded.scores - scores).norm() == 0.0);
  CHECK(loaded.is_positive.empty());

  const fs::path flagged = tmp.path / "flagged.csv";
  {
    std::ofstream out(flagged);
    out << "score,is_positive\n1.0,1\n-2.0,0\n3.5,1\n";
  }
  const auto with_flags = io::read_scores(flagged);
  CHECK(with_flags.is_positive == std::vector<int>{1, 0, 1});
}

TEST_CASE("gaussian model json round trip preserves scores") {
  Rng rng(9);
  gda::FeatureMatrix data;
  data.values = rng.normal_matrix(30, 4);
  std::vector<std::int32_t> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 3);
  data.labels = std::move(labels);
  const auto model = gda::fit(data);

  const auto j = io::gaussian_to_json(model);
  const auto restored = io::gaussian_from_json(j);
  CHECK((restored.means - model.means).cwiseAbs().maxCoeff() == 0.0);
  CHECK((restored.tied_cov - model.tied_cov).cwiseAbs().maxCoeff() == 0.0);
  CHECK(restored.precision.ridge_used == model.precision.ridge_used);
  CHECK(restored.class_counts == model.class_counts);

  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = rng.normal_vector(4);
    CHECK(gda::confidence_score(restored, x) == gda::confidence_score(model, x));
  }

  // json text round trip too
  const auto reparsed = io::gaussian_from_json(nlohmann::json::parse(j.dump()));
  CHECK((reparsed.means - model.means).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("refnet json round trip preserves the forward pass") {
  Rng rng(11);
  const auto net = refnet::make_random_refnet({5, 7, 3}, 13);
  const auto restored = io::refnet_from_json(nlohmann::json::parse(io::refnet_to_json(net).dump()));
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = rng.normal_vector(5);
    const auto a = refnet::forward_with_taps(net, x);
    const auto b = refnet::forward_with_taps(restored, x);
    CHECK((a.probs - b.probs).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("detector and incremental state json round trips") {
  ensemble::EnsembleDetector det;
  det.alphas = Vector(2);
  det.alphas << 0.125, -3.75;
  det.intercept = 1.0 / 3.0;
  det.eps = 0.0014;
  const auto restored =
      io::detector_from_json(nlohmann::json::parse(io::detector_to_json(det).dump()));
  CHECK((restored.alphas - det.alphas).cwiseAbs().maxCoeff() == 0.0);
  CHECK(restored.intercept == det.intercept);
  CHECK(restored.eps == det.eps);

  Rng rng(13);
  auto state = incremental::make_state(
      gda::from_parameters(rng.normal_matrix(3, 4), testutil::random_spd(4, rng), {5, 5, 5}, 1e-6));
  state = incremental::add_class(state, rng.normal_matrix(8, 4));
  const auto state_restored =
      io::state_from_json(nlohmann::json::parse(io::state_to_json(state).dump()));
  CHECK(state_restored.class_count_history == state.class_count_history);
  CHECK((state_restored.model.tied_cov - state.model.tied_cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config parsing, echo, and unknown keys") {
  const std::string text = R"(
# synthetic run
seed = 42
classes = 3
hidden = [16, 8]
eps_grid = [0, 0.01, 0.1]
learning_rate = 0.025
metrics = ["auroc", "aupr_in"]
)";
  const auto cfg = io::parse_config(text);
  CHECK(cfg.seed == 42);
  CHECK(cfg.classes == 3);
  CHECK(cfg.hidden == std::vector<int>{16, 8});
  CHECK(cfg.eps_grid == std::vector<double>{0.0, 0.01, 0.1});
  CHECK(cfg.learning_rate == 0.025);
  CHECK(cfg.metrics == std::vector<std::string>{"auroc", "aupr_in"});
  CHECK(cfg.epochs == 40);  // untouched default

  // canonical echo reparses to the same config
  const auto echoed = io::parse_config(io::echo_config(cfg));
  CHECK(echoed.seed == cfg.seed);
  CHECK(echoed.eps_grid == cfg.effective_eps_grid());
  CHECK(echoed.learning_rate == cfg.learning_rate);
  CHECK(echoed.metrics == cfg.metrics);

  CHECK_THROWS_WITH_AS(io::parse_config("bogus_key = 3\n"), doctest::Contains("bogus_key"),
                       ConfigError);
  CHECK_THROWS_AS(io::parse_config("seed 42\n"), ConfigError);
  CHECK_THROWS_WITH_AS(io::parse_config("metrics = [\"nope\"]\n"), doctest::Contains("nope"),
                       ConfigError);
}

TEST_CASE("report json carries all metrics") {
  metrics::EvalReport r;
  r.tnr_at_tpr95 = 0.5;
  r.auroc = 0.75;
  r.detection_accuracy = 0.8;
  r.aupr_in = 0.7;
  r.aupr_out = 0.9;
  r.num_positive = 10;
  r.num_negative = 20;
  const auto j = io::report_to_json(r);
  CHECK(j.at("metrics").at("auroc").get<double>() == 0.75);
  CHECK(j.at("counts").at("positive").get<int>() == 10);
  CHECK(j.at("version").get<int>() == 1);
}
