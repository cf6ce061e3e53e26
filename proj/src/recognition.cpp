#include "digeco/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace digeco {

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

void append_component(std::vector<std::uint8_t>& bits, int value) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", value);
  for (std::size_t c = 0; c < kCharsPerComponent; ++c) {
    const auto ch = static_cast<unsigned char>(buf[c]);
    for (int b = 7; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((ch >> b) & 1u));
  }
}

}  // namespace

EncodedDescription preprocess(const SemanticDescription& desc, std::size_t owner_components) {
  EncodedDescription e;
  e.bits.reserve(desc.size() * 2 * kBitsPerComponent);
  for (const auto& t : desc) {
    append_component(e.bits, t.id);
    append_component(e.bits, t.value);
  }
  e.bits.resize(owner_components * kBitsPerComponent, 0);
  return e;
}

std::vector<double> as_input(const EncodedDescription& e) {
  return std::vector<double>(e.bits.begin(), e.bits.end());
}

std::size_t Mlp::hidden_for(std::size_t inputs) {
  return static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(inputs)));
}

Mlp::Mlp(std::size_t inputs, std::size_t hidden, double learning_rate)
    : inputs_(inputs), hidden_(hidden), lr_(learning_rate), params_((inputs + 2) * hidden + 1, 0.0) {}

Mlp::Mlp(std::size_t inputs, std::size_t hidden, double learning_rate, Rng& rng)
    : Mlp(inputs, hidden, learning_rate) {
  for (auto& w : params_) w = rng.uniform01() - 0.5;
}

double Mlp::forward_hidden(std::span<const double> x, std::vector<double>& z) const {
  if (x.size() != inputs_) throw Error(Errc::ShapeMismatch, "input length does not match the network");
  z.assign(params_.begin() + static_cast<std::ptrdiff_t>(inputs_ * hidden_),
           params_.begin() + static_cast<std::ptrdiff_t>((inputs_ + 1) * hidden_));
  // Encoded descriptions are mostly zeros, so skip inactive inputs.
  for (std::size_t j = 0; j < inputs_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* w = &params_[j * hidden_];
    for (std::size_t h = 0; h < hidden_; ++h) z[h] += w[h] * xj;
  }
  double a = params_.back();
  const double* w2 = &params_[(inputs_ + 1) * hidden_];
  for (std::size_t h = 0; h < hidden_; ++h) {
    z[h] = sigmoid(z[h]);
    a += w2[h] * z[h];
  }
  return sigmoid(a);
}

double Mlp::forward(std::span<const double> x) const {
  std::vector<double> z;
  return forward_hidden(x, z);
}

double Mlp::loss(std::span<const double> x, double target) const {
  const double y = forward(x);
  return 0.5 * (y - target) * (y - target);
}

std::vector<double> Mlp::gradient(std::span<const double> x, double target) const {
  std::vector<double> z;
  const double y = forward_hidden(x, z);
  std::vector<double> g(params_.size(), 0.0);
  const double d_out = (y - target) * y * (1.0 - y);
  const double* w2 = &params_[(inputs_ + 1) * hidden_];
  for (std::size_t h = 0; h < hidden_; ++h) {
    const double d_h = d_out * w2[h] * z[h] * (1.0 - z[h]);
    for (std::size_t j = 0; j < inputs_; ++j) g[j * hidden_ + h] = d_h * x[j];
    g[inputs_ * hidden_ + h] = d_h;
    g[(inputs_ + 1) * hidden_ + h] = d_out * z[h];
  }
  g.back() = d_out;
  return g;
}

void Mlp::train_step(std::span<const double> x, double target) {
  std::vector<double> z;
  const double y = forward_hidden(x, z);
  const double d_out = (y - target) * y * (1.0 - y);
  double* w2 = &params_[(inputs_ + 1) * hidden_];
  double* b1 = &params_[inputs_ * hidden_];
  std::vector<double> d_h(hidden_);
  for (std::size_t h = 0; h < hidden_; ++h) {
    d_h[h] = d_out * w2[h] * z[h] * (1.0 - z[h]);
    w2[h] -= lr_ * d_out * z[h];
    b1[h] -= lr_ * d_h[h];
  }
  params_.back() -= lr_ * d_out;
  for (std::size_t j = 0; j < inputs_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    double* w = &params_[j * hidden_];
    const double s = lr_ * xj;
    for (std::size_t h = 0; h < hidden_; ++h) w[h] -= s * d_h[h];
  }
}

double mse(const Mlp& net, const TrainingSet& data) {
  if (data.empty()) return 0.0;
  double s = 0.0;
  for (const auto& ex : data) {
    const double e = net.forward(ex.x) - ex.label;
    s += e * e;
  }
  return s / static_cast<double>(data.size());
}

double mlp_train(Mlp& net, const TrainingSet& data, int epochs, Rng& rng) {
  if (data.empty()) throw Error(Errc::InvalidArgument, "empty training set");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int e = 0; e < epochs; ++e) {
    shuffle(order.begin(), order.end(), rng);
    for (auto i : order) net.train_step(data[i].x, data[i].label);
  }
  return mse(net, data);
}

SemanticDescription make_variant(const SemanticDescription& own, int max_delta, Rng& rng) {
  auto tuples = own.tuples();
  const std::size_t components = tuples.size() * 2;
  std::vector<std::size_t> idx(components);
  std::iota(idx.begin(), idx.end(), 0);
  shuffle(idx.begin(), idx.end(), rng);
  const auto count = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(components)));
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t c = idx[k];
    int& field = (c % 2 == 0) ? tuples[c / 2].id : tuples[c / 2].value;
    const int delta = static_cast<int>(rng.uniform_int(1, max_delta));
    field = std::clamp(field + (rng.bernoulli(0.5) ? delta : -delta), kMinComponent, kMaxComponent);
  }
  return SemanticDescription::canonicalize(std::move(tuples));
}

TrainingSet variant_training_set(const SemanticDescription& own, const VariantParams& p, Rng& rng) {
  const std::size_t comps = own.size() * 2;
  TrainingSet out;
  out.push_back({as_input(preprocess(own, comps)), 1.0});
  for (int v = 0; v < p.variants; ++v) {
    auto var = make_variant(own, p.max_delta, rng);
    const double label = description_difference(own, var) < p.threshold ? 1.0 : 0.0;
    out.push_back({as_input(preprocess(var, comps)), label});
  }
  return out;
}

void balance_classes(TrainingSet& data) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i].label > 0.5) pos.push_back(i);
  if (pos.empty()) return;
  const std::size_t neg = data.size() - pos.size();
  for (std::size_t i = pos.size(); i < neg; ++i) data.push_back(data[pos[i % pos.size()]]);
}

void Recognizer::learn(const SemanticDescription&, bool) {}

bool DistanceRecognizer::similar(const SemanticDescription& other) const {
  return description_difference(own_, other) < threshold_;
}

MlpRecognizer::MlpRecognizer(SemanticDescription own, const MlpParams& p, Rng& rng)
    : own_(std::move(own)),
      components_(own_.size() * 2),
      params_(p),
      net_(components_ * kBitsPerComponent, Mlp::hidden_for(components_ * kBitsPerComponent),
           p.learning_rate, rng) {
  auto data = variant_training_set(own_, p.variants, rng);
  if (p.balance_classes) balance_classes(data);
  mlp_train(net_, data, p.epochs, rng);
}

double MlpRecognizer::score(const SemanticDescription& other) const {
  return net_.forward(as_input(preprocess(other, components_)));
}

bool MlpRecognizer::similar(const SemanticDescription& other) const {
  return score(other) >= kRecognitionThreshold;
}

void MlpRecognizer::learn(const SemanticDescription& other, bool positive) {
  const auto x = as_input(preprocess(other, components_));
  for (int s = 0; s < params_.online_steps; ++s) net_.train_step(x, positive ? 1.0 : 0.0);
}

bool recognize(const Recognizer& r, const SemanticDescription& other) { return r.similar(other); }

}  // namespace digeco
