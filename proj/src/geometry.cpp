#include "stardeploy/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "stardeploy/error.hpp"

namespace stardeploy {

double horizontal_distance(const Position3D& a, const Position3D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double distance(const Position3D& a, const Position3D& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

Orientation2D Orientation2D::from_angle(double phi) { return {std::cos(phi), std::sin(phi)}; }

Orientation2D Orientation2D::from_vector(double x, double y) {
  const double norm = std::hypot(x, y);
  if (!(norm > 1e-12) || !std::isfinite(norm)) {
    throw InvalidOrientation("orientation vector has (near) zero norm");
  }
  return {x / norm, y / norm};
}

double Orientation2D::angle() const { return std::atan2(y_, x_); }

void MobilityConfig::validate() const {
  if (!(square_side > 0.0)) throw ConfigError("mobility: square_side must be > 0");
  if (!(max_step >= 0.0)) throw ConfigError("mobility: max_step must be >= 0");
}

// With c = (x_ris + x_ori) y_ris - (y_ris + y_ori) x_ris = x_ori y_ris - y_ori x_ris,
// each factor y_ori x - x_ori y + c equals y_ori (x - x_ris) - x_ori (y - y_ris).
// The centered form negates exactly under ori -> -ori, so f(ori) == f(-ori) bitwise.
double region_discriminant(const Position3D& user, const Position3D& bs, const Position3D& ris,
                           const Orientation2D& ori) {
  const double side_bs = ori.y() * (bs.x - ris.x) - ori.x() * (bs.y - ris.y);
  const double side_user = ori.y() * (user.x - ris.x) - ori.x() * (user.y - ris.y);
  return side_bs * side_user;
}

Region classify_region(const Position3D& user, const Position3D& bs, const Position3D& ris,
                       const Orientation2D& ori) {
  return region_discriminant(user, bs, ris, ori) > 0.0 ? Region::Reflection
                                                       : Region::Transmission;
}

std::vector<Region> classify_regions(std::span<const Position3D> users, const Position3D& bs,
                                     const Position3D& ris, const Orientation2D& ori) {
  std::vector<Region> out;
  out.reserve(users.size());
  for (const auto& u : users) out.push_back(classify_region(u, bs, ris, ori));
  return out;
}

Position3D move_ris(const Position3D& ris, double dx, double dy, double x_max, double y_max) {
  return {ris.x + std::clamp(dx, -x_max, x_max), ris.y + std::clamp(dy, -y_max, y_max), ris.z};
}

double reflect_into(double v, double lo, double hi) {
  const double width = hi - lo;
  if (width <= 0.0) return lo;
  if (v >= lo && v <= hi) return v;
  double t = std::fmod(v - lo, 2.0 * width);
  if (t < 0.0) t += 2.0 * width;
  if (t > width) t = 2.0 * width - t;
  return std::clamp(lo + t, lo, hi);
}

std::vector<Position3D> step_users(std::span<const Position3D> users, const MobilityConfig& cfg,
                                   RandomStream& rng) {
  const double half = 0.5 * cfg.square_side;
  const double x_lo = cfg.center_x - half, x_hi = cfg.center_x + half;
  const double y_lo = cfg.center_y - half, y_hi = cfg.center_y + half;

  std::vector<Position3D> out;
  out.reserve(users.size());
  for (const auto& u : users) {
    // Always draw both axes so stream consumption is independent of max_step.
    const double sx = rng.uniform(-cfg.max_step, cfg.max_step);
    const double sy = rng.uniform(-cfg.max_step, cfg.max_step);
    out.push_back({reflect_into(u.x + sx, x_lo, x_hi), reflect_into(u.y + sy, y_lo, y_hi), u.z});
  }
  return out;
}

}  // namespace stardeploy
