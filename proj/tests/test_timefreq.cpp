#include "bplab/tilegen.hpp"
#include "bplab/timefreq.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace bplab;

namespace {

struct Setup {
  CollectionSpec spec;
  TileCollection s;
  PacketBank bank;
  SizeContext ctx;
  Setup(std::size_t count, std::uint64_t seed)
      : s(random_collection(spec, count, seed)), bank(s, spec.gx, spec.gy), ctx(s, bank) {}
};

}  // namespace

TEST_CASE("size of the zero function and of a singleton") {
  Setup st(60, 3);
  SampledFunction zero(128, 32, 1.0, 1.0);
  for (int i = 1; i <= 3; ++i) CHECK(*compute_size(st.ctx, zero, i).sigma[static_cast<std::size_t>(i - 1)] == 0.0);

  TileCollection one;
  one.tiles = {st.s.tiles[7]};
  PacketBank ob(one, st.spec.gx, st.spec.gy);
  SizeContext oc(one, ob);
  auto f = testing::packet_superposition(st.s, st.bank, 1, 9);
  auto p = ob.packet(0, 1);
  const double expect = std::abs(packet_coefficient(f, p.x, p.y)) / std::sqrt(to_double(one.tiles[0].area()));
  CHECK(std::abs(*compute_size(oc, f, 1).sigma[0] - expect) <= 1e-12 * expect);
}

TEST_CASE("size matches the definition-level oracle") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Setup st(60, seed);
    auto f = testing::packet_superposition(st.s, st.bank, 1, seed + 10);
    auto g = testing::random_trig(128, 32, 30, 6, seed);
    for (int i = 1; i <= 3; ++i) {
      for (const auto* u : {&f, &g}) {
        const double got = *compute_size(st.ctx, *u, i).sigma[static_cast<std::size_t>(i - 1)];
        const double ref = testing::brute_size(st.s, st.bank, *u, i);
        CHECK(std::abs(got - ref) <= 1e-12 * std::max(ref, 1e-300));
      }
    }
  }
}

TEST_CASE("size is monotone under removing tiles and its witness reproduces it") {
  Setup st(80, 4);
  auto f = testing::packet_superposition(st.s, st.bank, 1, 2);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<char> big(st.s.tiles.size()), small(st.s.tiles.size());
    for (std::size_t k = 0; k < big.size(); ++k) {
      big[k] = rng() % 4 != 0;
      small[k] = big[k] && rng() % 2;
    }
    const double a = *compute_size(st.ctx, f, 1, big).sigma[0];
    const double b = *compute_size(st.ctx, f, 1, small).sigma[0];
    CHECK(b <= a + 1e-15);
  }
  auto rep = compute_size(st.ctx, f, 1);
  REQUIRE(rep.witness[0].has_value());
  const Tree& t = *rep.witness[0];
  CHECK(t.type != 1);
  const auto e = st.ctx.energies(f, 1);
  double sum = 0;
  for (std::size_t s : t.members) {
    CHECK(st.ctx.in_tree(t.type, t.top, s));
    sum += e[s];
  }
  CHECK(std::abs(std::sqrt(sum / st.ctx.top_area(t.top)) - *rep.sigma[0]) <= 1e-12 * *rep.sigma[0]);
}

TEST_CASE("size rejects mixed scales and bad indices") {
  Setup st(20, 1);
  SampledFunction zero(128, 32, 1.0, 1.0);
  CHECK_THROWS_AS(compute_size(st.ctx, zero, 0), std::invalid_argument);
  CHECK_THROWS_AS(compute_size(st.ctx, zero, 1, std::vector<char>(3, 1)), std::invalid_argument);
  TileCollection mixed = st.s;
  CollectionSpec other = st.spec;
  other.y_scale = 3;
  auto extra = random_collection(other, 1, 2);
  mixed.tiles.push_back(extra.tiles[0]);
  PacketBank mb(mixed, st.spec.gx, st.spec.gy);
  CHECK_THROWS_AS(SizeContext(mixed, mb), std::invalid_argument);
}

TEST_CASE("size decomposition partitions the collection and contracts the size") {
  const auto cal = testing::load_calibration();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Setup st(100, seed);
    auto f = testing::packet_superposition(st.s, st.bank, 1, seed);
    auto d = size_decompose(st.ctx, f, 1);
    std::vector<int> seen(st.s.tiles.size(), 0);
    for (const auto& t : d.big)
      for (std::size_t s : t.members) ++seen[s];
    for (std::size_t s : d.small) ++seen[s];
    for (int c : seen) CHECK(c == 1);
    CHECK(d.residual_size < d.sigma / 2);
    CHECK(d.constant <= cal.regression_factor * cal.size_lemma_constant);
    // Each big tree really had size at least sigma / 2 when taken.
    std::vector<char> active(st.s.tiles.size(), 1);
    const auto e = st.ctx.energies(f, 1);
    for (const auto& t : d.big) {
      double sum = 0;
      for (std::size_t s : t.members) sum += e[s];
      CHECK(std::sqrt(sum / st.ctx.top_area(t.top)) >= d.sigma / 2 * (1 - 1e-12));
    }
  }
}

TEST_CASE("size decomposition of nothing") {
  Setup st(30, 2);
  SampledFunction zero(128, 32, 1.0, 1.0);
  auto d = size_decompose(st.ctx, zero, 2);
  CHECK(d.big.empty());
  CHECK(d.small.size() == st.s.tiles.size());
  CHECK(d.constant == 0);
  TileCollection none;
  PacketBank nb(none, st.spec.gx, st.spec.gy);
  SizeContext nc(none, nb);
  auto e = size_decompose(nc, zero, 1);
  CHECK(e.big.empty());
  CHECK(e.small.empty());
}

TEST_CASE("lambda bound agrees with the triple sum") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    std::array<double, 3> sigma{}, a{};
    for (int i = 0; i < 3; ++i) {
      sigma[i] = std::exp2(4 * testing::uniform(rng));
      a[i] = std::exp2(6 * testing::uniform(rng));
    }
    const double got = lambda_bound(sigma, a), ref = testing::lambda_bound_oracle(sigma, a, 50);
    CHECK(std::abs(got - ref) <= 1e-9 * ref);
  }
  CHECK(lambda_bound({1, 1, 1}, {0, 1, 1}) == 0);
  CHECK_THROWS_AS(lambda_bound({0, 1, 1}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(lambda_bound({1, 1, 1}, {-1, 1, 1}), std::invalid_argument);
}

TEST_CASE("single tree bound") {
  Setup st(60, 6);
  auto f = testing::packet_superposition(st.s, st.bank, 1, 3);
  auto rep = compute_size(st.ctx, f, 1);
  auto b = single_tree_bound(st.ctx, *rep.witness[0], f, 1, 2);
  CHECK(std::abs(b.size - *rep.sigma[0]) <= 1e-12 * b.size);
  CHECK(b.bound > 0);
  const auto cal = testing::load_calibration();
  CHECK(b.ratio <= cal.regression_factor * cal.single_tree_ratio);
  CHECK_THROWS_AS(single_tree_bound(st.ctx, *rep.witness[0], f, 1, 1), std::invalid_argument);
}

TEST_CASE("exceptional set removal") {
  BitGrid e = BitGrid::Constant(64, 64, true);
  auto none = exceptional_set(e, {}, 0.5);
  CHECK((none.residual == e).all());
  CHECK(none.major);
  CHECK(none.removed == 0);

  BitGrid sq = BitGrid::Zero(64, 64);
  sq.block(16, 16, 32, 32).setConstant(true);
  auto same = exceptional_set(sq, {sq}, 1.0, 1e3);
  CHECK(same.removed == 0);

  // Concentric squares, |F| = |E| / 16.
  BitGrid f = BitGrid::Zero(64, 64);
  f.block(28, 28, 8, 8).setConstant(true);
  const double c0 = testing::load_calibration().exceptional_c0;
  auto r = exceptional_set(sq, {f}, 1.0, c0);
  CHECK(r.major);
  CHECK(r.removed == static_cast<std::size_t>(1024 - r.residual.count()));
  CHECK((!r.residual && sq).count() == static_cast<Index>(r.removed));
  CHECK((r.residual && !sq).count() == 0);
  // Removal stays within the tripled square around F.
  BitGrid near = BitGrid::Zero(64, 64);
  near.block(20, 20, 24, 24).setConstant(true);
  CHECK(((!r.residual && sq) && !near).count() == 0);
  auto loose = exceptional_set(sq, {f}, 1.0, 2 * c0);
  CHECK(loose.removed <= r.removed);
  CHECK(((!loose.residual && sq) && r.residual).count() == 0);

  CHECK_THROWS_AS(exceptional_set(BitGrid::Zero(4, 4), {}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(exceptional_set(sq, {f}, 0), std::invalid_argument);
  CHECK_THROWS_AS(exceptional_set(sq, {BitGrid::Zero(4, 4)}, 0.5), std::invalid_argument);
}
