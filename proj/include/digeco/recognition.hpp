#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "digeco/core.hpp"
#include "digeco/rng.hpp"

namespace digeco {

inline constexpr std::size_t kCharsPerComponent = 6;
inline constexpr std::size_t kBitsPerComponent = kCharsPerComponent * 8;
inline constexpr double kRecognitionThreshold = 0.90;
inline constexpr double kSimilarityThreshold = 0.10;

// Each tuple component as a 6-digit zero-padded decimal string, 8 bits per
// character, most significant bit first, tuples in canonical order.
struct EncodedDescription {
  std::vector<std::uint8_t> bits;
};

// `owner_components` is 2 * (owner's tuple count). Shorter descriptions are
// zero-padded, longer ones truncated.
EncodedDescription preprocess(const SemanticDescription& desc, std::size_t owner_components);
std::vector<double> as_input(const EncodedDescription& e);

// One hidden layer of sigmoid units, one sigmoid output, squared-error loss
// 0.5 (y - t)^2 trained by per-example gradient descent.
class Mlp {
 public:
  Mlp(std::size_t inputs, std::size_t hidden, double learning_rate, Rng& rng);
  // Zero-initialised weights.
  Mlp(std::size_t inputs, std::size_t hidden, double learning_rate);

  static std::size_t hidden_for(std::size_t inputs);

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }
  double learning_rate() const { return lr_; }

  // Throws ShapeMismatch if x has the wrong length.
  double forward(std::span<const double> x) const;
  double loss(std::span<const double> x, double target) const;
  // Gradient of the loss in parameters() order.
  std::vector<double> gradient(std::span<const double> x, double target) const;
  void train_step(std::span<const double> x, double target);

  // Parameter layout: input->hidden weights (input-major), hidden biases,
  // hidden->output weights, output bias.
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  double& w1(std::size_t input, std::size_t h) { return params_[input * hidden_ + h]; }
  double& b1(std::size_t h) { return params_[inputs_ * hidden_ + h]; }
  double& w2(std::size_t h) { return params_[(inputs_ + 1) * hidden_ + h]; }
  double& b2() { return params_.back(); }

 private:
  double forward_hidden(std::span<const double> x, std::vector<double>& z) const;

  std::size_t inputs_;
  std::size_t hidden_;
  double lr_;
  std::vector<double> params_;
};

struct TrainingExample {
  std::vector<double> x;
  double label = 0.0;
};
using TrainingSet = std::vector<TrainingExample>;

double mse(const Mlp& net, const TrainingSet& data);
// Shuffled per-example passes; returns the MSE after training.
double mlp_train(Mlp& net, const TrainingSet& data, int epochs, Rng& rng);

struct VariantParams {
  int variants = 50;
  int max_delta = 20;
  double threshold = kSimilarityThreshold;
};

// Perturbs a uniformly random number of components by +-U(1, max_delta),
// clamped to [1,100].
SemanticDescription make_variant(const SemanticDescription& own, int max_delta, Rng& rng);
// The owner (positive) plus labelled variants.
TrainingSet variant_training_set(const SemanticDescription& own, const VariantParams& p, Rng& rng);
// Appends copies of the positives, in order, until both classes are equal.
void balance_classes(TrainingSet& data);

class Recognizer {
 public:
  virtual ~Recognizer() = default;
  virtual bool similar(const SemanticDescription& other) const = 0;
  // Outcome feedback from a targeted migration; default ignores it.
  virtual void learn(const SemanticDescription& other, bool positive);
};

class DistanceRecognizer : public Recognizer {
 public:
  explicit DistanceRecognizer(SemanticDescription own, double threshold = kSimilarityThreshold)
      : own_(std::move(own)), threshold_(threshold) {}
  bool similar(const SemanticDescription& other) const override;

 private:
  SemanticDescription own_;
  double threshold_;
};

struct MlpParams {
  double learning_rate = 0.1;
  int epochs = 20;
  int online_steps = 5;  // gradient steps per learned outcome
  // Repeat positives until they match the negatives in number; variants
  // that change an id are negatives, so positives are otherwise scarce.
  bool balance_classes = true;
  VariantParams variants;
};

class MlpRecognizer : public Recognizer {
 public:
  MlpRecognizer(SemanticDescription own, const MlpParams& p, Rng& rng);
  bool similar(const SemanticDescription& other) const override;
  void learn(const SemanticDescription& other, bool positive) override;
  double score(const SemanticDescription& other) const;
  const Mlp& net() const { return net_; }

 private:
  SemanticDescription own_;
  std::size_t components_;
  MlpParams params_;
  Mlp net_;
};

bool recognize(const Recognizer& r, const SemanticDescription& other);

}  // namespace digeco
