#include "urbangnss/sigclass.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace urbangnss {

namespace {

Eigen::Matrix3d readMatrix(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument(where + ": expected 3 rows");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != 3) throw std::invalid_argument(rw + ": expected 3 entries");
    for (int c = 0; c < 3; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw std::invalid_argument(rw + "[" + std::to_string(c) + "]: not a number");
      m(r, c) = v.get<double>();
      if (!(m(r, c) >= 0) || !std::isfinite(m(r, c))) {
        throw std::invalid_argument(rw + "[" + std::to_string(c) + "]: must be finite and nonnegative");
      }
    }
  }
  return m;
}

Eigen::Matrix3d normalizeRows(const Eigen::Matrix3d& m, const std::string& name) {
  Eigen::Matrix3d out = m;
  for (int r = 0; r < 3; ++r) {
    const double s = m.row(r).sum();
    if (!(s > 0)) throw std::invalid_argument("confusion matrix " + name + ": row " + std::to_string(r) + " is zero");
    out.row(r) /= s;
  }
  return out;
}

int sampleRow(const Eigen::Matrix3d& rates, int row, RandomStream& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (int k = 0; k < 2; ++k) {
    acc += rates(row, k);
    if (u < acc) return k;
  }
  return 2;
}

}  // namespace

ConfusionMatrix ConfusionMatrix::fromCounts(std::string name, const Eigen::Matrix3d& counts) {
  ConfusionMatrix cm;
  cm.rates_ = normalizeRows(counts, name);
  const Eigen::Vector3d totals = counts.rowwise().sum();
  cm.prior_ = totals / totals.sum();
  cm.name_ = std::move(name);
  return cm;
}

ConfusionMatrix ConfusionMatrix::fromProbabilities(std::string name, const Eigen::Matrix3d& rows) {
  ConfusionMatrix cm;
  cm.rates_ = normalizeRows(rows, name);
  cm.name_ = std::move(name);
  return cm;
}

ConfusionMatrix ConfusionMatrix::fromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("confusion matrix: expected an object");
  const std::string name = j.value("name", std::string("custom"));
  if (j.contains("counts")) return fromCounts(name, readMatrix(j.at("counts"), "counts"));
  if (j.contains("probabilities")) return fromProbabilities(name, readMatrix(j.at("probabilities"), "probabilities"));
  throw std::invalid_argument("confusion matrix: needs \"counts\" or \"probabilities\"");
}

ConfusionMatrix ConfusionMatrix::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open confusion matrix file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return fromJson(j);
}

nlohmann::json ConfusionMatrix::toJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({rates_(r, 0), rates_(r, 1), rates_(r, 2)});
  return {{"name", name_}, {"probabilities", rows}};
}

Eigen::Matrix3d ConfusionMatrix::posterior() const {
  // Joint P(actual, predicted), then normalize each predicted column.
  const Eigen::Matrix3d joint = prior_.asDiagonal() * rates_;
  Eigen::Matrix3d post;
  for (int k = 0; k < 3; ++k) {
    const double s = joint.col(k).sum();
    if (s > 0) {
      post.row(k) = (joint.col(k) / s).transpose();
    } else {
      post.row(k).setConstant(1.0 / 3.0);
    }
  }
  return post;
}

double ConfusionMatrix::accuracy() const { return prior_.dot(rates_.diagonal()); }

ConfusionMatrix randomForestMatrix() {
  Eigen::Matrix3d m;
  m << 241, 154, 74, 333, 2588, 453, 185, 559, 210;
  return ConfusionMatrix::fromCounts("RF", m);
}

ConfusionMatrix gradientBoostingMatrix() {
  Eigen::Matrix3d m;
  m << 318, 110, 41, 323, 2569, 482, 341, 326, 287;
  return ConfusionMatrix::fromCounts("GBDT", m);
}

ConfusionMatrix supportVectorMatrix() {
  Eigen::Matrix3d m;
  m << 321, 58, 90, 518, 2070, 786, 261, 183, 510;
  return ConfusionMatrix::fromCounts("SVM", m);
}

std::array<ConfusionMatrix, 3> defaultClassifiers() {
  return {randomForestMatrix(), gradientBoostingMatrix(), supportVectorMatrix()};
}

ClassifierOutput noisyClassify(ReceptionCondition truth, const ConfusionMatrix& cm, RandomStream& rng, double lambda) {
  if (!(lambda >= 0 && lambda <= 1)) throw std::invalid_argument("noisyClassify: lambda must be in [0,1]");
  const int k = sampleRow(cm.rates(), classIndex(truth), rng);
  const Eigen::Matrix3d post = cm.posterior();
  ClassifierOutput out;
  out.predicted = conditionFromIndex(k);
  for (int j = 0; j < 3; ++j) out.probs[j] = lambda * post(k, j) + (j == k ? 1.0 - lambda : 0.0);
  return out;
}

std::optional<ReceptionCondition> unanimousVote(std::span<const ClassifierOutput, 3> outputs) {
  const auto c = outputs[0].predicted;
  if (outputs[1].predicted != c || outputs[2].predicted != c) return std::nullopt;
  return c;
}

std::optional<bool> unanimousBinaryVote(std::span<const ClassifierOutput, 3> outputs) {
  const bool los = isLos(outputs[0].predicted);
  if (isLos(outputs[1].predicted) != los || isLos(outputs[2].predicted) != los) return std::nullopt;
  return los;
}

VotePrediction predictVote(const std::array<ConfusionMatrix, 3>& cms, ReceptionCondition truth) {
  const int t = classIndex(truth);
  VotePrediction v;
  for (int k = 0; k < 3; ++k) {
    const double all = cms[0].rates()(t, k) * cms[1].rates()(t, k) * cms[2].rates()(t, k);
    v.retained += all;
    if (k == t) v.accuracy = all;
  }
  v.accuracy = v.retained > 0 ? v.accuracy / v.retained : 0.0;
  return v;
}

VotePrediction predictVote(const std::array<ConfusionMatrix, 3>& cms) {
  VotePrediction v;
  double correct = 0.0;
  for (int t = 0; t < 3; ++t) {
    const auto one = predictVote(cms, conditionFromIndex(t));
    v.retained += cms[0].prior()(t) * one.retained;
    correct += cms[0].prior()(t) * one.retained * one.accuracy;
  }
  v.accuracy = v.retained > 0 ? correct / v.retained : 0.0;
  return v;
}

VotePrediction predictBinaryVote(const std::array<ConfusionMatrix, 3>& cms, ReceptionCondition truth) {
  const int t = classIndex(truth);
  auto pLos = [&](const ConfusionMatrix& cm) { return cm.rates()(t, 1) + cm.rates()(t, 2); };
  double allLos = 1.0, allNlos = 1.0;
  for (const auto& cm : cms) {
    allLos *= pLos(cm);
    allNlos *= 1.0 - pLos(cm);
  }
  VotePrediction v;
  v.retained = allLos + allNlos;
  v.accuracy = v.retained > 0 ? (isLos(truth) ? allLos : allNlos) / v.retained : 0.0;
  return v;
}

}  // namespace urbangnss
