#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "urbangnss/reception.hpp"
#include "urbangnss/rng.hpp"

namespace urbangnss {

/// 3x3 confusion matrix, rows = actual class, columns = predicted class, in
/// ReceptionCondition index order (0 NLOS-only, 1 LOS-only, 2 LOS+NLOS).
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;

  /// Raw signal counts; the class prior is taken from the row totals.
  static ConfusionMatrix fromCounts(std::string name, const Eigen::Matrix3d& counts);
  /// Row-stochastic rates (each row normalized here); uniform class prior.
  static ConfusionMatrix fromProbabilities(std::string name, const Eigen::Matrix3d& rows);
  /// {"name": ..., "counts": [[...],[...],[...]]} or {"name": ..., "probabilities": ...}.
  static ConfusionMatrix fromJson(const nlohmann::json& j);
  static ConfusionMatrix load(const std::filesystem::path& path);
  nlohmann::json toJson() const;

  const std::string& name() const { return name_; }
  /// Row-normalized rates: rates()(actual, predicted).
  const Eigen::Matrix3d& rates() const { return rates_; }
  /// Class frequencies of the actual classes.
  const Eigen::Vector3d& prior() const { return prior_; }
  /// P(actual | predicted) as posterior()(predicted, actual).
  Eigen::Matrix3d posterior() const;
  double classAccuracy(ReceptionCondition c) const { return rates_(classIndex(c), classIndex(c)); }
  /// Prior-weighted accuracy.
  double accuracy() const;

 private:
  std::string name_;
  Eigen::Matrix3d rates_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d prior_ = Eigen::Vector3d::Constant(1.0 / 3.0);
};

/// The RF, GBDT and SVM matrices of the field classifiers.
ConfusionMatrix randomForestMatrix();
ConfusionMatrix gradientBoostingMatrix();
ConfusionMatrix supportVectorMatrix();
std::array<ConfusionMatrix, 3> defaultClassifiers();

struct ClassifierOutput {
  ReceptionCondition predicted = ReceptionCondition::LosOnly;
  std::array<double, 3> probs{0, 1, 0};

  /// P(LOS) = P(LOS-only) + P(LOS+NLOS).
  double pLos() const { return probs[1] + probs[2]; }
};

/// Simulated classifier: the prediction is drawn from the truth row of `cm`;
/// probs = (1 - lambda) * onehot(predicted) + lambda * P(actual | predicted).
ClassifierOutput noisyClassify(ReceptionCondition truth, const ConfusionMatrix& cm, RandomStream& rng,
                               double lambda = 0.3);

/// Common prediction of all three classifiers, nullopt when they disagree.
std::optional<ReceptionCondition> unanimousVote(std::span<const ClassifierOutput, 3> outputs);
/// Same vote after collapsing to LOS / NLOS; true means LOS.
std::optional<bool> unanimousBinaryVote(std::span<const ClassifierOutput, 3> outputs);

/// Closed-form voting statistics for independent classifiers.
struct VotePrediction {
  double retained = 0.0;  // P(all three agree)
  double accuracy = 0.0;  // P(agreed class is correct | all three agree)
};
VotePrediction predictVote(const std::array<ConfusionMatrix, 3>& cms, ReceptionCondition truth);
/// Averaged over the actual classes with the first matrix's prior.
VotePrediction predictVote(const std::array<ConfusionMatrix, 3>& cms);
VotePrediction predictBinaryVote(const std::array<ConfusionMatrix, 3>& cms, ReceptionCondition truth);

}  // namespace urbangnss
