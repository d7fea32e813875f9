#include "stardeploy/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stardeploy/error.hpp"

namespace stardeploy {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::size_t ChannelConfig::row_length(std::size_t n_elements) const {
  std::size_t nx = elements_per_row;
  if (nx == 0) {
    nx = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_elements))));
  }
  if (nx == 0 || n_elements % nx != 0) {
    throw ConfigError("channel: elements per row (" + std::to_string(nx) +
                      ") must divide the element count (" + std::to_string(n_elements) + ")");
  }
  return nx;
}

void ChannelConfig::validate(std::size_t n_elements) const {
  if (!(carrier_ghz > 0.0)) throw ConfigError("channel: carrier frequency must be > 0");
  if (!(rician_q >= 0.0)) throw ConfigError("channel: Rician factor must be >= 0");
  if (!(d_a() > 0.0) || !(d_e() > 0.0)) throw ConfigError("channel: spacings must be > 0");
  (void)row_length(n_elements);
}

LinkAngles angles(const Position3D& bs, const Position3D& ris) {
  const double d_h = horizontal_distance(bs, ris);
  if (!(d_h > 0.0)) {
    throw GeometryError("channel: BS and RIS share a horizontal position; angles undefined");
  }
  const double phi_a = std::asin(std::clamp((ris.y - bs.y) / d_h, -1.0, 1.0));
  // Elevation uses the full 3D separation so the arcsine stays in its domain
  // for steep geometries.
  const double psi_a = std::asin(std::clamp((ris.z - bs.z) / distance(bs, ris), -1.0, 1.0));
  return {phi_a, std::numbers::pi / 2.0 - phi_a, psi_a};
}

CVector steering_bs(std::size_t m_antennas, double phi_d, const ChannelConfig& cfg) {
  const double step = kTwoPi * cfg.d_a() * std::sin(phi_d) / cfg.wavelength();
  CVector a(m_antennas);
  for (std::size_t m = 0; m < m_antennas; ++m) a[m] = std::polar(1.0, step * static_cast<double>(m));
  return a;
}

CVector steering_ris(std::size_t n_elements, double phi_a, double psi_a, const ChannelConfig& cfg) {
  const std::size_t nx = cfg.row_length(n_elements);
  const double k = kTwoPi * cfg.d_e() / cfg.wavelength();
  const double row_term = std::sin(phi_a) * std::sin(psi_a);
  const double col_term = std::sin(phi_a) * std::cos(psi_a);
  CVector a(n_elements);
  for (std::size_t n = 0; n < n_elements; ++n) {
    const auto row = static_cast<double>(n / nx);
    const auto col = static_cast<double>(n % nx);
    a[n] = std::polar(1.0, k * (row * row_term + col * col_term));
  }
  return a;
}

double pathloss_los_db(double d, double f_c) {
  d = std::max(d, 1.0);
  return 22.0 * std::log10(d) + 28.0 + 20.0 * std::log10(f_c);
}

double pathloss_nlos_db(double d, double f_c, double z_tx) {
  d = std::max(d, 1.0);
  const double nlos = 36.7 * std::log10(d) + 22.7 + 26.0 * std::log10(f_c) - 0.3 * (z_tx - kUserHeight);
  return std::max(pathloss_los_db(d, f_c), nlos);
}

CMatrix synth_bs_ris(const ChannelConfig& cfg, std::size_t m_antennas, std::size_t n_elements,
                     const Position3D& bs, const Position3D& ris, RandomStream& rng) {
  const LinkAngles ang = angles(bs, ris);
  const CVector a_r = steering_ris(n_elements, ang.phi_a, ang.psi_a, cfg);
  const CVector a_b = steering_bs(m_antennas, ang.phi_d, cfg);

  const double amp = std::sqrt(db_to_gain(pathloss_los_db(distance(bs, ris), cfg.carrier_ghz)));
  const double q = cfg.rician_q;
  const double w_los = std::isinf(q) ? 1.0 : std::sqrt(q / (q + 1.0));
  const double w_nlos = std::isinf(q) ? 0.0 : std::sqrt(1.0 / (q + 1.0));

  CMatrix h(n_elements, m_antennas);
  for (std::size_t n = 0; n < n_elements; ++n) {
    for (std::size_t m = 0; m < m_antennas; ++m) {
      const cplx los = a_r[n] * std::conj(a_b[m]);
      const cplx scatter = rng.complex_normal();
      h(n, m) = amp * (w_los * los + w_nlos * scatter);
    }
  }
  return h;
}

CMatrix synth_rayleigh(const ChannelConfig& cfg, const Position3D& tx,
                       std::span<const Position3D> users, std::size_t rows, double z_tx,
                       RandomStream& rng) {
  CMatrix h(rows, users.size());
  for (std::size_t k = 0; k < users.size(); ++k) {
    const double amp =
        std::sqrt(db_to_gain(pathloss_nlos_db(distance(tx, users[k]), cfg.carrier_ghz, z_tx)));
    for (std::size_t r = 0; r < rows; ++r) h(r, k) = amp * rng.complex_normal();
  }
  return h;
}

ChannelRealization synth_channels(const ChannelConfig& cfg, std::size_t m_antennas,
                                  std::size_t n_elements, const Position3D& bs,
                                  const Position3D& ris, std::span<const Position3D> users,
                                  RandomStream& rng) {
  ChannelRealization ch;
  ch.bs_ris = synth_bs_ris(cfg, m_antennas, n_elements, bs, ris, rng);
  ch.bs_users = synth_rayleigh(cfg, bs, users, m_antennas, bs.z, rng);
  ch.ris_users = synth_rayleigh(cfg, ris, users, n_elements, ris.z, rng);
  return ch;
}

}  // namespace stardeploy
