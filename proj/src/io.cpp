#include "mahadet/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mahadet/preprocess.hpp"

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian; big-endian hosts are unsupported");

namespace mahadet::io {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'M', 'D', 'F', 'V'};
constexpr std::uint32_t kFeatureVersion = 1;

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

class ByteReader {
 public:
  ByteReader(const std::string& data, std::string name)
      : data_(data), name_(std::move(name)) {}

  template <typename T>
  T take() {
    if (offset_ + sizeof(T) > data_.size()) {
      throw TruncatedFile(name_ + ": needed " + std::to_string(sizeof(T)) + " bytes at offset " +
                          std::to_string(offset_) + ", file has " + std::to_string(data_.size()));
    }
    T value;
    std::memcpy(&value, data_.data() + offset_, sizeof(T));
    offset_ += sizeof(T);
    return value;
  }

  void take_bytes(void* out, std::size_t count) {
    if (offset_ + count > data_.size()) {
      throw TruncatedFile(name_ + ": needed " + std::to_string(count) + " bytes at offset " +
                          std::to_string(offset_) + ", file has " + std::to_string(data_.size()));
    }
    std::memcpy(out, data_.data() + offset_, count);
    offset_ += count;
  }

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return data_.size() - offset_; }

 private:
  const std::string& data_;
  std::string name_;
  std::size_t offset_ = 0;
};

double parse_double(std::string_view token, const std::string& where) {
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw RaggedCsv(where + ": cannot parse number '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string format_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw IoError(what + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw IoError(what + ": ragged row " + std::to_string(i));
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw IoError(what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

gda::FeatureMatrix read_features(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_features_csv(path);
  const std::string bytes = read_all(path);
  ByteReader reader(bytes, path.string());

  char magic[4];
  reader.take_bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw BadMagic(path.string() + ": bad magic at offset 0, expected 'MDFV'");
  }
  const auto version = reader.take<std::uint32_t>();
  if (version != kFeatureVersion) {
    throw IoError(path.string() + ": unsupported version " + std::to_string(version));
  }
  const auto n = reader.take<std::uint64_t>();
  const auto d = reader.take<std::uint64_t>();
  const auto dtype = reader.take<std::uint8_t>();
  const auto has_labels = reader.take<std::uint8_t>();
  if (dtype != static_cast<std::uint8_t>(Dtype::f32) &&
      dtype != static_cast<std::uint8_t>(Dtype::f64)) {
    throw BadDtype(path.string() + ": dtype byte " + std::to_string(dtype) + " at offset 24");
  }
  if (has_labels > 1) {
    throw IoError(path.string() + ": has_labels byte " + std::to_string(has_labels) +
                  " at offset 25");
  }

  gda::FeatureMatrix data;
  data.values = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (dtype == static_cast<std::uint8_t>(Dtype::f64)) {
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::uint64_t j = 0; j < d; ++j) {
        data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            reader.take<double>();
      }
    }
  } else {
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::uint64_t j = 0; j < d; ++j) {
        data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            static_cast<double>(reader.take<float>());
      }
    }
  }
  if (has_labels == 1) {
    std::vector<std::int32_t> labels(n);
    for (std::uint64_t i = 0; i < n; ++i) labels[i] = reader.take<std::int32_t>();
    data.labels = std::move(labels);
  }
  if (reader.remaining() != 0) {
    throw IoError(path.string() + ": " + std::to_string(reader.remaining()) +
                  " trailing bytes at offset " + std::to_string(reader.offset()));
  }
  return data;
}

void write_features(const std::filesystem::path& path, const gda::FeatureMatrix& data,
                    Dtype dtype) {
  if (path.extension() == ".csv") {
    write_features_csv(path, data);
    return;
  }
  if (data.labels.has_value() &&
      static_cast<Eigen::Index>(data.labels->size()) != data.rows()) {
    throw DimMismatch("write_features: label count mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  auto put = [&out](const void* p, std::size_t count) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(count));
  };
  put(kMagic, 4);
  const std::uint32_t version = kFeatureVersion;
  put(&version, sizeof(version));
  const std::uint64_t n = static_cast<std::uint64_t>(data.rows());
  const std::uint64_t d = static_cast<std::uint64_t>(data.cols());
  put(&n, sizeof(n));
  put(&d, sizeof(d));
  const auto dtype_byte = static_cast<std::uint8_t>(dtype);
  const std::uint8_t has_labels = data.labels.has_value() ? 1 : 0;
  put(&dtype_byte, sizeof(dtype_byte));
  put(&has_labels, sizeof(has_labels));
  if (dtype == Dtype::f64) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const double v = data.values(i, j);
        put(&v, sizeof(v));
      }
    }
  } else {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const float v = static_cast<float>(data.values(i, j));
        put(&v, sizeof(v));
      }
    }
  }
  if (has_labels == 1) {
    for (std::int32_t label : *data.labels) put(&label, sizeof(label));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

gda::FeatureMatrix read_features_csv(const std::filesystem::path& path) {
  const std::string text = read_all(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TruncatedFile(path.string() + ": empty csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.empty() || (header.size() == 1 && header[0].empty())) {
    throw RaggedCsv(path.string() + ": empty header at line 1");
  }
  const bool has_labels = header.back() == "label";
  const std::size_t columns = header.size();
  const std::size_t feature_columns = columns - (has_labels ? 1 : 0);
  if (feature_columns == 0) throw RaggedCsv(path.string() + ": no feature columns");

  std::vector<double> values;
  std::vector<std::int32_t> labels;
  std::size_t line_number = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw RaggedCsv(path.string() + ": line " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(columns));
    }
    const std::string where = path.string() + ": line " + std::to_string(line_number);
    for (std::size_t j = 0; j < feature_columns; ++j) {
      values.push_back(parse_double(fields[j], where));
    }
    if (has_labels) {
      labels.push_back(static_cast<std::int32_t>(parse_double(fields.back(), where)));
    }
    ++rows;
  }

  gda::FeatureMatrix data;
  data.values = Matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(feature_columns));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < feature_columns; ++j) {
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          values[i * feature_columns + j];
    }
  }
  if (has_labels) data.labels = std::move(labels);
  return data;
}

void write_features_csv(const std::filesystem::path& path, const gda::FeatureMatrix& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (j > 0) out << ',';
    out << 'f' << j;
  }
  if (data.labels.has_value()) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_full(data.values(i, j));
    }
    if (data.labels.has_value()) out << ',' << (*data.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

ScoreFile read_scores(const std::filesystem::path& path) {
  const std::string text = read_all(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TruncatedFile(path.string() + ": empty score file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "score") {
    throw RaggedCsv(path.string() + ": first column must be 'score'");
  }
  const bool has_flag = header.size() > 1 && header[1] == "is_positive";
  if (header.size() > (has_flag ? 2u : 1u)) {
    throw RaggedCsv(path.string() + ": unexpected extra columns in score file");
  }

  ScoreFile file;
  std::vector<double> scores;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw RaggedCsv(path.string() + ": line " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    const std::string where = path.string() + ": line " + std::to_string(line_number);
    scores.push_back(parse_double(fields[0], where));
    if (has_flag) {
      file.is_positive.push_back(parse_double(fields[1], where) != 0.0 ? 1 : 0);
    }
  }
  file.scores = Eigen::Map<const Vector>(scores.data(), static_cast<Eigen::Index>(scores.size()));
  return file;
}

void write_scores(const std::filesystem::path& path, const Vector& scores) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "score\n";
  for (Eigen::Index i = 0; i < scores.size(); ++i) out << format_full(scores[i]) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

json gaussian_to_json(const gda::GaussianModel& model) {
  json j;
  j["version"] = 1;
  j["C"] = model.num_classes();
  j["d"] = model.dim();
  j["means"] = matrix_to_json(model.means);
  j["tied_cov"] = matrix_to_json(model.tied_cov);
  j["class_counts"] = model.class_counts;
  j["ridge_used"] = model.precision.ridge_used;
  return j;
}

gda::GaussianModel gaussian_from_json(const json& j) {
  const Matrix means = matrix_from_json(j.at("means"), "model means");
  const Matrix tied_cov = matrix_from_json(j.at("tied_cov"), "model tied_cov");
  const auto counts = j.at("class_counts").get<std::vector<std::int64_t>>();
  const double ridge = j.at("ridge_used").get<double>();
  if (j.at("C").get<Eigen::Index>() != means.rows() ||
      j.at("d").get<Eigen::Index>() != means.cols()) {
    throw IoError("model json: C/d fields disagree with the means array");
  }
  return gda::from_parameters_with_ridge(means, tied_cov, counts, ridge);
}

json models_to_json(const std::vector<gda::GaussianModel>& models) {
  json j;
  j["version"] = 1;
  j["layers"] = json::array();
  for (const auto& model : models) j["layers"].push_back(gaussian_to_json(model));
  return j;
}

std::vector<gda::GaussianModel> models_from_json(const json& j) {
  std::vector<gda::GaussianModel> models;
  for (const auto& layer : j.at("layers")) models.push_back(gaussian_from_json(layer));
  return models;
}

json refnet_to_json(const refnet::RefNet& net) {
  json j;
  j["version"] = 1;
  j["layer_sizes"] = net.layer_sizes();
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (const auto& w : net.weights) j["weights"].push_back(matrix_to_json(w));
  for (const auto& b : net.biases) j["biases"].push_back(vector_to_json(b));
  return j;
}

refnet::RefNet refnet_from_json(const json& j) {
  refnet::RefNet net;
  for (const auto& w : j.at("weights")) net.weights.push_back(matrix_from_json(w, "net weights"));
  for (const auto& b : j.at("biases")) net.biases.push_back(vector_from_json(b, "net biases"));
  if (net.weights.size() != net.biases.size() || net.weights.size() < 2) {
    throw IoError("net json: malformed layer lists");
  }
  const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
  if (sizes != net.layer_sizes()) throw IoError("net json: layer_sizes disagree with the weights");
  return net;
}

json detector_to_json(const ensemble::EnsembleDetector& detector) {
  json j;
  j["version"] = 1;
  j["alphas"] = vector_to_json(detector.alphas);
  j["intercept"] = detector.intercept;
  j["eps"] = detector.eps;
  json dims = json::array();
  for (const auto& model : detector.layer_models) dims.push_back(model.dim());
  j["layer_dims"] = std::move(dims);
  return j;
}

ensemble::EnsembleDetector detector_from_json(const json& j) {
  ensemble::EnsembleDetector detector;
  detector.alphas = vector_from_json(j.at("alphas"), "detector alphas");
  detector.intercept = j.at("intercept").get<double>();
  detector.eps = j.at("eps").get<double>();
  return detector;
}

json state_to_json(const incremental::IncrementalState& state) {
  json j = gaussian_to_json(state.model);
  j["class_count_history"] = state.class_count_history;
  j["rel_ridge"] = state.rel_ridge;
  return j;
}

incremental::IncrementalState state_from_json(const json& j) {
  incremental::IncrementalState state = incremental::make_state(
      gaussian_from_json(j), j.value("rel_ridge", linalg::kDefaultRelRidge));
  if (j.contains("class_count_history")) {
    state.class_count_history = j.at("class_count_history").get<std::vector<int>>();
  }
  return state;
}

json report_to_json(const metrics::EvalReport& report) {
  json j;
  j["version"] = 1;
  j["counts"] = {{"positive", report.num_positive}, {"negative", report.num_negative}};
  j["metrics"] = {{"tnr_at_tpr95", report.tnr_at_tpr95},
                  {"auroc", report.auroc},
                  {"detection_accuracy", report.detection_accuracy},
                  {"aupr_in", report.aupr_in},
                  {"aupr_out", report.aupr_out}};
  return j;
}

json load_json(const std::filesystem::path& path) {
  const std::string text = read_all(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError(path.string() + ": invalid json");
  return j;
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

// --- config -----------------------------------------------------------------

std::vector<double> RunConfig::effective_eps_grid() const {
  if (!eps_grid.empty()) return eps_grid;
  return {preprocess::kNoiseGrid.begin(), preprocess::kNoiseGrid.end()};
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> parse_list(const std::string& value, int line_number) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    throw ConfigError("config line " + std::to_string(line_number) + ": expected [list]");
  }
  std::vector<std::string> items;
  const std::string inner = value.substr(1, value.size() - 2);
  std::size_t start = 0;
  while (start <= inner.size()) {
    const std::size_t comma = inner.find(',', start);
    const std::string item =
        trim(comma == std::string::npos ? inner.substr(start)
                                        : inner.substr(start, comma - start));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

double config_number(const std::string& token, int line_number) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError("config line " + std::to_string(line_number) + ": bad number '" + token +
                      "'");
  }
  return value;
}

int config_int(const std::string& token, int line_number) {
  const double v = config_number(token, line_number);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("config line " + std::to_string(line_number) + ": expected integer, got '" +
                      token + "'");
  }
  return i;
}

std::string strip_quotes(const std::string& token, int line_number) {
  if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
    return token.substr(1, token.size() - 2);
  }
  if (!token.empty() && token.front() != '"') return token;
  throw ConfigError("config line " + std::to_string(line_number) + ": malformed string");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_number) + ": empty key or value");
    }

    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(config_number(value, line_number));
    } else if (key == "classes") {
      cfg.classes = config_int(value, line_number);
    } else if (key == "dim") {
      cfg.dim = config_int(value, line_number);
    } else if (key == "train_per_class") {
      cfg.train_per_class = config_int(value, line_number);
    } else if (key == "val_per_side") {
      cfg.val_per_side = config_int(value, line_number);
    } else if (key == "test_per_side") {
      cfg.test_per_side = config_int(value, line_number);
    } else if (key == "ood_shift") {
      cfg.ood_shift = config_number(value, line_number);
    } else if (key == "mean_radius") {
      cfg.mean_radius = config_number(value, line_number);
    } else if (key == "hidden") {
      cfg.hidden.clear();
      for (const auto& item : parse_list(value, line_number)) {
        cfg.hidden.push_back(config_int(item, line_number));
      }
    } else if (key == "epochs") {
      cfg.epochs = config_int(value, line_number);
    } else if (key == "batch_size") {
      cfg.batch_size = config_int(value, line_number);
    } else if (key == "learning_rate") {
      cfg.learning_rate = config_number(value, line_number);
    } else if (key == "momentum") {
      cfg.momentum = config_number(value, line_number);
    } else if (key == "eps_grid") {
      cfg.eps_grid.clear();
      for (const auto& item : parse_list(value, line_number)) {
        cfg.eps_grid.push_back(config_number(item, line_number));
      }
    } else if (key == "l2_grid") {
      cfg.l2_grid.clear();
      for (const auto& item : parse_list(value, line_number)) {
        cfg.l2_grid.push_back(config_number(item, line_number));
      }
    } else if (key == "outer_folds") {
      cfg.outer_folds = config_int(value, line_number);
    } else if (key == "inner_folds") {
      cfg.inner_folds = config_int(value, line_number);
    } else if (key == "rel_ridge") {
      cfg.rel_ridge = config_number(value, line_number);
    } else if (key == "metrics") {
      cfg.metrics.clear();
      for (const auto& item : parse_list(value, line_number)) {
        const std::string name = strip_quotes(item, line_number);
        bool known = false;
        for (const auto& k : metrics::kMetricKeys) known = known || k == name;
        if (!known) {
          throw ConfigError("config line " + std::to_string(line_number) + ": unknown metric '" +
                            name + "'");
        }
        cfg.metrics.push_back(name);
      }
    } else {
      throw ConfigError("config line " + std::to_string(line_number) + ": unknown key '" + key +
                        "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_all(path));
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto number = [](double v) { return format_full(v); };
  out << "seed = " << cfg.seed << '\n';
  out << "classes = " << cfg.classes << '\n';
  out << "dim = " << cfg.dim << '\n';
  out << "train_per_class = " << cfg.train_per_class << '\n';
  out << "val_per_side = " << cfg.val_per_side << '\n';
  out << "test_per_side = " << cfg.test_per_side << '\n';
  out << "ood_shift = " << number(cfg.ood_shift) << '\n';
  out << "mean_radius = " << number(cfg.mean_radius) << '\n';
  out << "hidden = [";
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    if (i > 0) out << ", ";
    out << cfg.hidden[i];
  }
  out << "]\n";
  out << "epochs = " << cfg.epochs << '\n';
  out << "batch_size = " << cfg.batch_size << '\n';
  out << "learning_rate = " << number(cfg.learning_rate) << '\n';
  out << "momentum = " << number(cfg.momentum) << '\n';
  out << "eps_grid = [";
  const auto grid = cfg.effective_eps_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) out << ", ";
    out << number(grid[i]);
  }
  out << "]\n";
  out << "l2_grid = [";
  for (std::size_t i = 0; i < cfg.l2_grid.size(); ++i) {
    if (i > 0) out << ", ";
    out << number(cfg.l2_grid[i]);
  }
  out << "]\n";
  out << "outer_folds = " << cfg.outer_folds << '\n';
  out << "inner_folds = " << cfg.inner_folds << '\n';
  out << "rel_ridge = " << number(cfg.rel_ridge) << '\n';
  out << "metrics = [";
  for (std::size_t i = 0; i < cfg.metrics.size(); ++i) {
    if (i > 0) out << ", ";
    out << '"' << cfg.metrics[i] << '"';
  }
  out << "]\n";
  return std::move(out).str();
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["classes"] = cfg.classes;
  j["dim"] = cfg.dim;
  j["train_per_class"] = cfg.train_per_class;
  j["val_per_side"] = cfg.val_per_side;
  j["test_per_side"] = cfg.test_per_side;
  j["ood_shift"] = cfg.ood_shift;
  j["mean_radius"] = cfg.mean_radius;
  j["hidden"] = cfg.hidden;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["momentum"] = cfg.momentum;
  j["eps_grid"] = cfg.effective_eps_grid();
  j["l2_grid"] = cfg.l2_grid;
  j["outer_folds"] = cfg.outer_folds;
  j["inner_folds"] = cfg.inner_folds;
  j["rel_ridge"] = cfg.rel_ridge;
  j["metrics"] = cfg.metrics;
  return j;
}

}  // namespace mahadet::io
