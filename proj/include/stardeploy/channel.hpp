#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "stardeploy/cmatrix.hpp"
#include "stardeploy/geometry.hpp"
#include "stardeploy/random.hpp"

namespace stardeploy {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kUserHeight = 1.5;

struct ChannelConfig {
  double carrier_ghz = 5.0;
  double rician_q = 10.0;      // linear LoS/NLoS power ratio
  double antenna_spacing = 0;  // d_a in meters; <= 0 means half a wavelength
  double element_spacing = 0;  // d_e in meters; <= 0 means half a wavelength
  std::size_t elements_per_row = 0;  // N_x; 0 means sqrt(N)

  double wavelength() const { return kSpeedOfLight / (carrier_ghz * 1e9); }
  double d_a() const { return antenna_spacing > 0 ? antenna_spacing : 0.5 * wavelength(); }
  double d_e() const { return element_spacing > 0 ? element_spacing : 0.5 * wavelength(); }
  // Resolves N_x for an N-element panel; throws ConfigError if it does not divide N.
  std::size_t row_length(std::size_t n_elements) const;

  void validate(std::size_t n_elements) const;
};

/// Channels for one time slot.
///   bs_ris:    N x M, BS -> RIS
///   bs_users:  M x K, column k is user k's direct channel
///   ris_users: N x K, column k is user k's RIS channel
struct ChannelRealization {
  CMatrix bs_ris;
  CMatrix bs_users;
  CMatrix ris_users;

  friend bool operator==(const ChannelRealization&, const ChannelRealization&) = default;
};

struct LinkAngles {
  double phi_a;  // azimuth of arrival at the RIS
  double phi_d;  // azimuth of departure at the BS
  double psi_a;  // elevation of arrival at the RIS
};

LinkAngles angles(const Position3D& bs, const Position3D& ris);

CVector steering_bs(std::size_t m_antennas, double phi_d, const ChannelConfig& cfg);
CVector steering_ris(std::size_t n_elements, double phi_a, double psi_a, const ChannelConfig& cfg);

// Urban path loss in dB, distances clamped to >= 1 m. f_c in GHz.
double pathloss_los_db(double d, double f_c);
double pathloss_nlos_db(double d, double f_c, double z_tx);

inline double db_to_gain(double db) { return std::pow(10.0, -db / 10.0); }
inline double gain_to_db(double gain) { return -10.0 * std::log10(gain); }

CMatrix synth_bs_ris(const ChannelConfig& cfg, std::size_t m_antennas, std::size_t n_elements,
                     const Position3D& bs, const Position3D& ris, RandomStream& rng);

// rows x K Rayleigh channel from a transmitter at `tx` (height z_tx) to each user.
CMatrix synth_rayleigh(const ChannelConfig& cfg, const Position3D& tx,
                       std::span<const Position3D> users, std::size_t rows, double z_tx,
                       RandomStream& rng);

// Draws all three channels in a fixed order (BS->RIS, BS->users, RIS->users).
// The number of random draws depends only on the shapes.
ChannelRealization synth_channels(const ChannelConfig& cfg, std::size_t m_antennas,
                                  std::size_t n_elements, const Position3D& bs,
                                  const Position3D& ris, std::span<const Position3D> users,
                                  RandomStream& rng);

}  // namespace stardeploy
