#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rml/rng.hpp"

using namespace rml;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, DeterministicAndStreamSeparated) {
  CounterRng a(7, 3, Stream::v_noise), b(7, 3, Stream::v_noise), c(7, 3, Stream::u_latent), d(7, 4, Stream::v_noise);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
}

TEST(CounterRng, UniformInOpenInterval) {
  CounterRng r(1, 0, Stream::generic);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(CounterRng, NormalMoments) {
  CounterRng r(2, 0, Stream::generic);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(CounterRng, ExponentialAndStudentT) {
  CounterRng r(5, 0, Stream::generic);
  const int n = 200000;
  double se = 0, st = 0;
  for (int i = 0; i < n; ++i) {
    se += r.exponential(1.0);
    st += r.student_t(5);
  }
  EXPECT_NEAR(se / n, 1.0, 4 / std::sqrt(n));
  EXPECT_NEAR(st / n, 0.0, 4 * std::sqrt(5.0 / 3.0 / n));
}

TEST(NormalCdf, Values) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_pdf(0.0), 0.3989422804014327, 1e-16);
}
