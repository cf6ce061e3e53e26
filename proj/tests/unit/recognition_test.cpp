#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "digeco/recognition.hpp"
#include "digeco/rng.hpp"

using namespace digeco;

namespace {
SemanticDescription desc(std::vector<AttributeTuple> t) { return SemanticDescription::canonicalize(std::move(t)); }

std::vector<std::uint8_t> char_bits(char c) {
  std::vector<std::uint8_t> b;
  for (int i = 7; i >= 0; --i) b.push_back((c >> i) & 1);
  return b;
}
}  // namespace

TEST(Encoding, SixDigitFieldsMostSignificantBitFirst) {
  auto e = preprocess(desc({{1, 25}}), 2);
  ASSERT_EQ(e.bits.size(), 2 * kBitsPerComponent);
  std::vector<std::uint8_t> expect;
  for (char c : std::string("000001000025")) {
    auto b = char_bits(c);
    expect.insert(expect.end(), b.begin(), b.end());
  }
  EXPECT_EQ(e.bits, expect);
}

TEST(Encoding, PadsAndTruncatesToOwnerLength) {
  auto d = desc({{1, 25}, {2, 7}});
  auto shorter = preprocess(d, 6);
  ASSERT_EQ(shorter.bits.size(), 6 * kBitsPerComponent);
  EXPECT_TRUE(std::all_of(shorter.bits.begin() + 4 * kBitsPerComponent, shorter.bits.end(),
                          [](auto b) { return b == 0; }));
  EXPECT_EQ(preprocess(d, 2).bits, preprocess(desc({{1, 25}}), 2).bits);
  EXPECT_EQ(as_input(preprocess(d, 4)).size(), 4 * kBitsPerComponent);
}

TEST(MlpTest, GradientMatchesCentralDifferences) {
  Rng rng(31);
  for (int net_i = 0; net_i < 20; ++net_i) {
    const std::size_t in = 2 + rng.index(6), hid = 1 + rng.index(5);
    Mlp net(in, hid, 0.1, rng);
    for (auto& w : net.parameters()) w = 2 * rng.uniform01() - 1;
    std::vector<double> x(in);
    for (auto& v : x) v = rng.uniform01();
    const double target = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const auto g = net.gradient(x, target);
    ASSERT_EQ(g.size(), net.parameters().size());
    double worst = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double h = 1e-5, keep = net.parameters()[k];
      net.parameters()[k] = keep + h;
      const double up = net.loss(x, target);
      net.parameters()[k] = keep - h;
      const double down = net.loss(x, target);
      net.parameters()[k] = keep;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[k]) / std::max({std::abs(fd), std::abs(g[k]), 1e-7}));
    }
    EXPECT_LT(worst, 1e-4) << "network " << net_i;
  }
}

TEST(MlpTest, ZeroWeightsOutputHalfAndShapeIsChecked) {
  Mlp net(4, 3, 0.1);
  std::vector<double> x = {1, 0, 1, 0}, wrong = {1, 0};
  EXPECT_DOUBLE_EQ(net.forward(x), 0.5);
  EXPECT_NEAR(net.loss(x, 1.0), 0.125, 1e-15);
  EXPECT_THROW(net.forward(wrong), Error);
}

TEST(MlpTest, TrainingLowersError) {
  Rng rng(2);
  auto own = desc({{1, 40}, {2, 60}, {3, 20}});
  auto data = variant_training_set(own, VariantParams{}, rng);
  balance_classes(data);
  Mlp net(data.front().x.size(), Mlp::hidden_for(data.front().x.size()), 0.1, rng);
  const double before = mse(net, data);
  const double after = mlp_train(net, data, 20, rng);
  EXPECT_LT(after, before);
}

TEST(Variants, LabelsFollowTheDifferenceThreshold) {
  Rng rng(3);
  auto own = desc({{1, 40}, {2, 60}, {3, 20}});
  VariantParams vp;
  auto data = variant_training_set(own, vp, rng);
  EXPECT_EQ(data.front().label, 1.0);
  EXPECT_EQ(data.size(), static_cast<std::size_t>(vp.variants) + 1);
  for (int i = 0; i < 200; ++i) {
    auto v = make_variant(own, 20, rng);
    for (const auto& t : v) {
      EXPECT_GE(t.value, 1);
      EXPECT_LE(t.value, 100);
    }
  }
  balance_classes(data);
  const auto pos = std::count_if(data.begin(), data.end(), [](auto& e) { return e.label == 1.0; });
  EXPECT_EQ(static_cast<std::size_t>(pos) * 2, data.size());
}

TEST(RecognizerTest, MlpRecognisesItsOwner) {
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    std::vector<AttributeTuple> raw;
    for (int i = 1; i <= 3 + t % 4; ++i) raw.push_back({i, static_cast<int>(1 + rng.index(100))});
    auto own = desc(raw);
    MlpRecognizer r(own, MlpParams{}, rng);
    EXPECT_GE(r.score(own), kRecognitionThreshold);
    EXPECT_TRUE(r.similar(own));
  }
}

TEST(RecognizerTest, DistanceThreshold) {
  auto own = desc({{1, 50}, {2, 50}, {3, 50}});
  DistanceRecognizer r(own);
  EXPECT_TRUE(r.similar(own));
  EXPECT_TRUE(r.similar(desc({{1, 60}, {2, 50}, {3, 50}})));
  EXPECT_FALSE(r.similar(desc({{1, 50}, {2, 50}, {4, 50}})));
}
