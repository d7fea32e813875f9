#pragma once

#include <span>
#include <vector>

#include "stardeploy/random.hpp"

namespace stardeploy {

// Meters. Ground level is z = 0.
struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position3D&, const Position3D&) = default;
};

double horizontal_distance(const Position3D& a, const Position3D& b);
double distance(const Position3D& a, const Position3D& b);

/// Unit direction of the STAR-RIS panel in the horizontal plane.
///
/// Always normalized on construction; (x, y) = (cos phi, sin phi) where phi is
/// the angle between the panel and the x-axis.
class Orientation2D {
 public:
  Orientation2D() = default;

  static Orientation2D from_angle(double phi);
  // Normalizes (x, y); throws InvalidOrientation when the norm is ~0.
  static Orientation2D from_vector(double x, double y);

  double x() const { return x_; }
  double y() const { return y_; }
  double angle() const;

  Orientation2D operator-() const { return Orientation2D(-x_, -y_); }

  friend bool operator==(const Orientation2D&, const Orientation2D&) = default;

 private:
  Orientation2D(double x, double y) : x_(x), y_(y) {}
  double x_ = 1.0;
  double y_ = 0.0;
};

enum class Region { Reflection, Transmission };

enum class BoundaryMode { Reflect };

struct MobilityConfig {
  double square_side = 1000.0;  // service square, centered on `center`
  double max_step = 1.0;        // per axis, per time slot
  BoundaryMode boundary_mode = BoundaryMode::Reflect;
  double center_x = 0.0;
  double center_y = 0.0;

  void validate() const;
};

// Region test product. Each factor is the signed side of a point relative to
// the line through the RIS along `ori`; f > 0 means the user is on the same
// side as the base station.
double region_discriminant(const Position3D& user, const Position3D& bs, const Position3D& ris,
                           const Orientation2D& ori);

Region classify_region(const Position3D& user, const Position3D& bs, const Position3D& ris,
                       const Orientation2D& ori);

std::vector<Region> classify_regions(std::span<const Position3D> users, const Position3D& bs,
                                     const Position3D& ris, const Orientation2D& ori);

Position3D move_ris(const Position3D& ris, double dx, double dy, double x_max, double y_max);

// Folds a coordinate back into [lo, hi] by mirror reflection at the edges.
double reflect_into(double v, double lo, double hi);

// Bounded random walk: independent uniform per-axis steps in
// [-max_step, max_step], reflected at the service-square boundary.
std::vector<Position3D> step_users(std::span<const Position3D> users, const MobilityConfig& cfg,
                                   RandomStream& rng);

}  // namespace stardeploy
