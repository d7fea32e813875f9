#pragma once

#include <span>
#include <vector>

#include "stardeploy/channel.hpp"
#include "stardeploy/cmatrix.hpp"
#include "stardeploy/geometry.hpp"
#include "stardeploy/starris.hpp"

namespace stardeploy {

// BS precoder, M x K; column k serves user k.
struct Beamformer {
  CMatrix w;

  std::size_t antennas() const { return w.rows(); }
  std::size_t users() const { return w.cols(); }
  double total_power() const { return frobenius_norm2(w); }
  CVector column(std::size_t k) const { return w.column(k); }
};

// Thermal noise (-174 dBm/Hz) over `bandwidth_hz` plus a receiver noise figure, in watts.
double thermal_noise_watts(double bandwidth_hz, double noise_figure_db = 10.0);

struct NoiseModel {
  double sigma2 = thermal_noise_watts(1e6);
  double bandwidth_hz = 1e6;
  double p_max = 1.0;

  void validate() const;
};

// h_bk + h_rk * Theta_k * H_br, as a length-M row.
CVector effective_channel(std::span<const cplx> h_bk, std::span<const cplx> h_rk,
                          const DiagonalMatrix& theta, const CMatrix& bs_ris);

double sinr(std::size_t k, const Beamformer& bf, std::span<const CVector> effective,
            const NoiseModel& noise);

// Shannon rate in bits/s.
double rate(double gamma, double bandwidth_hz);

std::vector<CVector> effective_channels(const ChannelRealization& ch, std::span<const Region> regions,
                                        const StarMatrices& mats);

std::vector<double> user_rates(const ChannelRealization& ch, std::span<const Region> regions,
                               const StarMatrices& mats, const Beamformer& bf,
                               const NoiseModel& noise);

double sum_rate(const ChannelRealization& ch, std::span<const Region> regions,
                const StarMatrices& mats, const Beamformer& bf, const NoiseModel& noise);

double sum_rate(const ChannelRealization& ch, std::span<const Region> regions,
                const StarElements& elements, const Beamformer& bf, const NoiseModel& noise);

}  // namespace stardeploy
