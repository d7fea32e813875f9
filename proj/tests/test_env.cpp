#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "stardeploy/env.hpp"
#include "stardeploy/error.hpp"

using namespace stardeploy;
constexpr double kPi = std::numbers::pi;

namespace {

EnvConfig small_config() {
  EnvConfig cfg;
  cfg.antennas = 2;
  cfg.elements = 4;
  cfg.users = 3;
  cfg.episode_length = 6;
  return cfg;
}

std::vector<double> random_action(std::size_t n, RandomStream& rng, double spread = 1.3) {
  std::vector<double> a(n);
  for (double& v : a) v = rng.uniform(-spread, spread);
  return a;
}

}  // namespace

TEST_CASE("dimensions for the default system") {
  EnvConfig cfg;
  CHECK(cfg.observation_size() == 554);
  CHECK(cfg.action_size() == 3 * 25 + 2 * 24 + 3);
  const ActionLayout lay(cfg);
  CHECK(lay.beta == 25);
  CHECK(lay.theta_r_sign == 50);
  CHECK(lay.bs_phase == 75);
  CHECK(lay.bs_amplitude == 99);
  CHECK(lay.orientation == lay.size - 1);
}

TEST_CASE("decoding the zero action") {
  const EnvConfig cfg = small_config();
  const auto d = decode_action(std::vector<double>(cfg.action_size(), 0.0), cfg);
  for (std::size_t n = 0; n < cfg.elements; ++n) {
    CHECK(d.elements.theta_t[n] == 0.0);
    CHECK(d.elements.beta[n] == 0.5);
    CHECK(d.elements.theta_r[n] == -kPi / 2);
  }
  CHECK(d.dx == 0.0);
  CHECK(d.dy == 0.0);
  CHECK(d.orientation.x() == 1.0);
  CHECK(d.orientation.y() == 0.0);
}

TEST_CASE("decoding details") {
  EnvConfig cfg = small_config();
  const ActionLayout lay(cfg);
  std::vector<double> a(cfg.action_size(), 0.0);
  a[lay.theta_t] = 0.25;
  a[lay.theta_r_sign] = 0.3;
  a[lay.x_move] = 2.0;  // clamped to +x_max
  a[lay.y_move] = -0.5;
  const auto d = decode_action(a, cfg);
  CHECK(d.elements.theta_t[0] == doctest::Approx(kPi / 4));
  CHECK(d.elements.theta_r[0] == doctest::Approx(kPi / 4 + kPi / 2));
  CHECK(d.dx == cfg.x_max);
  CHECK(d.dy == -0.5 * cfg.y_max);

  SUBCASE("over-budget beamformer is scaled onto the power limit") {
    // Unit amplitudes everywhere: ||W||_F^2 = M*K; choose P_max so it is 4x over.
    std::vector<double> full(cfg.action_size(), 0.0);
    for (std::size_t j = 0; j < cfg.antennas * cfg.users; ++j) full[lay.bs_amplitude + j] = 1.0;
    cfg.noise.p_max = static_cast<double>(cfg.antennas * cfg.users) / 4.0;
    const auto dd = decode_action(full, cfg);
    CHECK(dd.beamformer.total_power() == doctest::Approx(cfg.noise.p_max).epsilon(1e-14));
    CHECK(std::abs(dd.beamformer.w(0, 0)) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("within budget is left alone") {
    const auto dd = decode_action(std::vector<double>(cfg.action_size(), -0.8), cfg);
    CHECK(std::abs(dd.beamformer.w(1, 2)) == doctest::Approx(0.1).epsilon(1e-14));
  }
  CHECK_THROWS_AS(decode_action(std::vector<double>(3), cfg), DimensionError);
}

TEST_CASE("decoded actions are always feasible") {
  const EnvConfig cfg = small_config();
  RandomStream rng(10);
  for (int i = 0; i < 2000; ++i) {
    const auto d = decode_action(random_action(cfg.action_size(), rng), cfg);
    CHECK_NOTHROW(d.elements.validate());
    CHECK(d.beamformer.total_power() <= cfg.noise.p_max + 1e-9);
    CHECK(std::abs(std::hypot(d.orientation.x(), d.orientation.y()) - 1.0) < 1e-12);
    CHECK(std::abs(d.dx) <= cfg.x_max);
  }
}

TEST_CASE("state layout") {
  const EnvConfig cfg = small_config();
  RandomStream rng(3);
  ChannelRealization ch{CMatrix(4, 2), CMatrix(2, 3), CMatrix(4, 3)};
  const std::vector<Region> regions{Region::Reflection, Region::Transmission, Region::Reflection};

  SUBCASE("zero channels leave only the region bits") {
    const auto s = build_state(ch, regions, 1e6);
    REQUIRE(s.size() == cfg.observation_size());
    for (std::size_t i = 0; i + 3 < s.size(); ++i) CHECK(s[i] == 0.0);
    CHECK(s[s.size() - 3] == 1.0);
    CHECK(s[s.size() - 2] == 0.0);
    CHECK(s[s.size() - 1] == 1.0);
  }

  for (auto* m : {&ch.bs_ris, &ch.bs_users, &ch.ris_users}) {
    for (auto& v : m->data()) v = 1e-7 * rng.complex_normal();
  }
  SUBCASE("round trip") {
    const auto s = build_state(ch, regions, 1.0);  // scale 1 keeps the round trip exact
    const auto back = unflatten_state(s, 2, 4, 3, 1.0);
    CHECK(back.channels == ch);
    CHECK(back.regions == regions);
  }
  SUBCASE("permuting users permutes their blocks") {
    ChannelRealization swapped = ch;
    for (std::size_t m = 0; m < 2; ++m) std::swap(swapped.bs_users(m, 0), swapped.bs_users(m, 2));
    for (std::size_t n = 0; n < 4; ++n) std::swap(swapped.ris_users(n, 0), swapped.ris_users(n, 2));
    const std::vector<Region> swapped_regions{regions[2], regions[1], regions[0]};
    const auto a = unflatten_state(build_state(ch, regions, 1e6), 2, 4, 3, 1e6);
    const auto b = unflatten_state(build_state(swapped, swapped_regions, 1e6), 2, 4, 3, 1e6);
    for (std::size_t m = 0; m < 2; ++m) CHECK(a.channels.bs_users(m, 0) == b.channels.bs_users(m, 2));
    for (std::size_t n = 0; n < 4; ++n) CHECK(a.channels.ris_users(n, 2) == b.channels.ris_users(n, 0));
    CHECK(a.channels.bs_ris == b.channels.bs_ris);
  }
}

TEST_CASE("episode lifecycle") {
  EnvConfig cfg = small_config();
  Environment env(cfg);
  CHECK_THROWS_AS(env.step(std::vector<double>(cfg.action_size())), LifecycleError);

  const auto s1 = env.reset(17);
  Environment twin(cfg);
  CHECK(twin.reset(17) == s1);
  for (double b : std::vector<double>(s1.end() - 3, s1.end())) CHECK((b == 0.0 || b == 1.0));

  RandomStream rng(5);
  std::size_t steps = 0;
  Position3D prev = env.ris();
  while (!env.done()) {
    const auto a = random_action(cfg.action_size(), rng);
    const StepResult r = env.step(a);
    const StepResult r2 = twin.step(a);
    CHECK(r.reward == r2.reward);
    CHECK(r.observation == r2.observation);
    ++steps;

    CHECK(std::abs(r.info.ris.x - prev.x) <= cfg.x_max);
    CHECK(std::abs(r.info.ris.y - prev.y) <= cfg.y_max);
    prev = r.info.ris;

    // Reward recomputed from the geometry and matrices actually applied.
    const double check = sum_rate(env.channels(), r.info.regions, env.last_matrices(), env.last_beamformer(),
                                  cfg.noise);
    CHECK(r.reward == doctest::Approx(check).epsilon(1e-9));
    CHECK(r.info.regions == classify_regions(env.users(), cfg.bs, r.info.ris, r.info.orientation));
    double total = 0;
    for (double u : r.info.user_rates) total += u;
    CHECK(total == doctest::Approx(r.reward).epsilon(1e-12));
  }
  CHECK(steps == cfg.episode_length);
  CHECK_THROWS_AS(env.step(std::vector<double>(cfg.action_size())), LifecycleError);
}

TEST_CASE("scheme switches") {
  RandomStream rng(44);
  SUBCASE("frozen pose") {
    EnvConfig cfg = small_config();
    cfg.ris_movable = false;
    cfg.ris_rotatable = false;
    cfg.initial_orientation = 0.4;
    Environment env(cfg);
    for (std::uint64_t ep = 0; ep < 3; ++ep) {
      env.reset(ep);
      while (!env.done()) {
        const auto r = env.step(random_action(cfg.action_size(), rng));
        CHECK(r.info.ris == cfg.ris_initial);
        CHECK(r.info.orientation == Orientation2D::from_angle(0.4));
      }
    }
  }
  SUBCASE("no RIS: reward ignores every RIS entry") {
    EnvConfig cfg = small_config();
    cfg.ris_enabled = false;
    const ActionLayout lay(cfg);
    Environment a(cfg), b(cfg);
    a.reset(3);
    b.reset(3);
    while (!a.done()) {
      auto act = random_action(cfg.action_size(), rng);
      auto other = act;
      for (std::size_t i = 0; i < lay.bs_phase; ++i) other[i] = rng.uniform(-1, 1);
      other[lay.x_move] = rng.uniform(-1, 1);
      other[lay.y_move] = rng.uniform(-1, 1);
      other[lay.orientation] = rng.uniform(-1, 1);
      const auto ra = a.step(act), rb = b.step(other);
      CHECK(ra.reward == rb.reward);
      CHECK(ra.observation == rb.observation);
    }
  }
  SUBCASE("masking keeps the length") {
    EnvConfig cfg = small_config();
    cfg.ris_movable = false;
    auto act = random_action(cfg.action_size(), rng);
    mask_action(act, cfg);
    CHECK(act.size() == cfg.action_size());
    CHECK(act[ActionLayout(cfg).x_move] == 0.0);
  }
}
