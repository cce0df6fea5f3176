#include <gtest/gtest.h>

#include <vector>

#include "nkarena/landscape.hpp"
#include "nkarena/nk_landscape.hpp"

using namespace nkarena;

namespace {

// Straightforward evaluator written from the definition, for comparison.
double reference_fitness(const NkLandscape& l, const Genotype& g) {
  const unsigned n = l.n(), k = l.k();
  double sum = 0.0;
  for (unsigned i = 0; i < n; ++i) {
    std::size_t index = 0;
    for (unsigned j = 0; j <= k; ++j) {
      if (g[(i + j) % n]) index |= std::size_t{1} << j;
    }
    sum += l.phi(i, index);
  }
  return sum / n;
}

}  // namespace

TEST(NkLandscape, RejectsInvalidParameters) {
  EXPECT_THROW(generate_nk(12, 12, 1), ParameterError);
  EXPECT_THROW(generate_nk(3, 0, 1), ParameterError);
  EXPECT_THROW(generate_nk(33, 2, 1), ParameterError);
  EXPECT_THROW(generate_nk(32, 21, 1), CapabilityError);
  EXPECT_THROW(NkLandscape(8, 1, 0, std::vector<double>(5)), ParameterError);
}

TEST(NkLandscape, DeterministicInSeed) {
  const auto a = generate_nk(12, 3, 11);
  const auto b = generate_nk(12, 3, 11);
  const auto c = generate_nk(12, 3, 12);
  EXPECT_TRUE(std::equal(a.tables().begin(), a.tables().end(), b.tables().begin()));
  EXPECT_EQ(a.global_max(), b.global_max());
  EXPECT_FALSE(std::equal(a.tables().begin(), a.tables().end(), c.tables().begin()));
}

TEST(NkLandscape, TablesAreUniformUnitInterval) {
  const auto l = generate_nk(16, 5, 3);
  double sum = 0.0;
  for (double v : l.tables()) {
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / l.tables().size(), 0.5, 0.02);
}

TEST(NkLandscape, MatchesReferenceEvaluator) {
  Philox rng(5);
  for (unsigned k : {0u, 1u, 3u, 7u, 11u}) {
    const auto l = generate_nk(12, k, 100 + k);
    for (int i = 0; i < 500; ++i) {
      const auto g = Genotype::random(12, rng);
      const double f = l.fitness(g);
      EXPECT_EQ(f, reference_fitness(l, g));
      EXPECT_GT(f, 0.0);
      EXPECT_LT(f, 1.0);
    }
  }
}

TEST(NkLandscape, LengthMismatchThrows) {
  const auto l = generate_nk(12, 2, 1);
  EXPECT_THROW(l.fitness(Genotype(11)), ParameterError);
}

TEST(NkLandscape, AdditiveAtKZero) {
  const auto l = generate_nk(12, 0, 8);
  const auto g = Genotype::from_string("101100111000");
  double sum = 0.0;
  for (unsigned i = 0; i < 12; ++i) sum += l.phi(i, g[i] ? 1 : 0);
  EXPECT_DOUBLE_EQ(l.fitness(g), sum / 12);
}

TEST(NkLandscape, KZeroOptimumIsPerSiteArgmax) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto l = generate_nk(12, 0, seed);
    const auto argmax = per_site_argmax(l);
    EXPECT_EQ(l.global_max(), argmax);
    EXPECT_EQ(l.global_max_fitness(), l.fitness(argmax));
    EXPECT_EQ(count_strict_local_maxima(l), 1u);
  }
}

TEST(NkLandscape, DynamicProgrammingMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto l = generate_nk(16, 4, 1000 + seed);
    const auto brute = global_maximum_bruteforce(l);
    ASSERT_EQ(brute.argmax.size(), 1u);
    EXPECT_EQ(l.global_max(), brute.argmax.front()) << "seed " << seed;
    EXPECT_EQ(l.global_max_fitness(), brute.fitness) << "seed " << seed;
  }
}

TEST(NkLandscape, DynamicProgrammingMatchesBruteForceAtN24) {
  const auto l = generate_nk(24, 2, 77);
  const auto brute = global_maximum_bruteforce(l);
  ASSERT_EQ(brute.argmax.size(), 1u);
  EXPECT_EQ(l.global_max(), brute.argmax.front());
  EXPECT_EQ(l.global_max_fitness(), brute.fitness);
}

TEST(NkLandscape, FullEpistasisMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto l = generate_nk(10, 9, seed);
    const auto brute = global_maximum_bruteforce(l);
    EXPECT_EQ(l.global_max(), brute.argmax.front());
    EXPECT_EQ(l.global_max_fitness(), brute.fitness);
  }
}

TEST(NkLandscape, TiedOptimumIsDetected) {
  // Constant tables: every genotype is optimal.
  NkLandscape flat(6, 1, 0, std::vector<double>(NkLandscape::table_size(6, 1), 0.5));
  EXPECT_GE(flat.global_maximum_dp().multiplicity, 2u);
  const auto generated = generate_nk(6, 1, 0);
  EXPECT_EQ(generated.global_maximum_dp().multiplicity, 1u);
}

TEST(NkLandscape, StatisticsFields) {
  const auto l = generate_nk(12, 3, 21);
  const auto stats = count_local_maxima(l);
  EXPECT_GE(stats.local_maxima_count, 1u);
  EXPECT_DOUBLE_EQ(stats.maxima_density, stats.local_maxima_count / 4096.0);
  EXPECT_DOUBLE_EQ(stats.alpha, 3.0 / 12.0);
}

TEST(NeighborCorrelation, EmptyOrMixedEnsembleThrows) {
  std::vector<NkLandscape> empty;
  EXPECT_THROW(neighbor_correlation(empty, 1000, 1), ParameterError);
  std::vector<NkLandscape> mixed{generate_nk(12, 3, 1), generate_nk(12, 4, 1)};
  EXPECT_THROW(neighbor_correlation(mixed, 1000, 1), ParameterError);
}

TEST(NeighborCorrelation, VanishesAtFullEpistasis) {
  std::vector<NkLandscape> ensemble;
  for (std::uint64_t s = 0; s < 50; ++s) ensemble.push_back(generate_nk(12, 11, s));
  EXPECT_NEAR(neighbor_correlation(ensemble, 100000, 4), 0.0, 0.02);
}

TEST(BruteForce, RefusesLargeN) { EXPECT_THROW(require_enumerable(31), CapabilityError); }
