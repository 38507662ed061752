#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "ksurf/ambient.hpp"
#include "ksurf/isometry.hpp"
#include "ksurf/surface.hpp"

namespace ksurf {

// Smooth scalar field on the reference plane: sum of a_i cos(k_i . xi + phi_i).
struct SmoothField {
  struct Mode {
    Vec2 k = Vec2::Zero();
    double amplitude = 0.0;
    double phase = 0.0;
  };
  std::vector<Mode> modes;

  double operator()(const Vec2& xi) const;
  bool zero() const { return modes.empty(); }
  static SmoothField random(std::mt19937_64& rng, int n_modes, double amplitude, double max_wavenumber);
};

// Surface patch parametrized over the reference disk. Orientation convention:
// d/da x d/db points along the outward normal.
class SurfacePatch {
 public:
  explicit SurfacePatch(AmbientModel model) : model_(std::move(model)) {}
  virtual ~SurfacePatch() = default;

  virtual Vec3 position(const Vec2& xi) const = 0;
  // Metric-unit outward normal; finite differences of the parametrization
  // unless a closed form is available.
  virtual Vec3 normal(const Vec2& xi) const;
  const AmbientModel& model() const { return model_; }

 protected:
  AmbientModel model_;
};

// Geodesic sphere of radius R (optionally radially perturbed) about `center`,
// cap of polar angle `cap_angle` around direction `axis`.
class SphereCapPatch : public SurfacePatch {
 public:
  SphereCapPatch(AmbientModel model, Vec3 center, double radius, double cap_angle, Vec3 axis = Vec3::UnitZ(),
                 SmoothField perturbation = {});
  Vec3 position(const Vec2& xi) const override;
  Vec3 normal(const Vec2& xi) const override;
  double radius() const { return radius_; }
  double cap_angle() const { return cap_angle_; }
  const Vec3& center() const { return center_; }
  // Unit (metric) direction at the center for reference point xi.
  Vec3 direction(const Vec2& xi) const;

 private:
  Vec3 center_;
  double radius_;
  double cap_angle_;
  Vec3 n_, e1_, e2_;
  SmoothField pert_;
};

// Horizontal horosphere z = height, patch of hyperbolic half-width `size`.
class HorospherePatch : public SurfacePatch {
 public:
  HorospherePatch(double height, double size, Vec2 offset = Vec2::Zero());
  Vec3 position(const Vec2& xi) const override;
  Vec3 normal(const Vec2& xi) const override;

 private:
  double height_, size_;
  Vec2 offset_;
};

// Equidistant surface at distance r (r = 0: totally geodesic) from the unit
// hemisphere |x| = 1, over the geodesic disk of radius `size` about (0,0,1),
// on the side away from the origin. Optional perturbation of r.
class EquidistantPatch : public SurfacePatch {
 public:
  EquidistantPatch(AmbientModel model, double r, double size, SmoothField perturbation = {});
  Vec3 position(const Vec2& xi) const override;
  Vec3 normal(const Vec2& xi) const override;
  Vec3 plane_point(const Vec2& xi) const;

 private:
  double r_, size_;
  SmoothField pert_;
};

// Tube of radius r around the vertical geodesic through the origin, patch of
// hyperbolic half-size `size` centered at height 1.
class TubePatch : public SurfacePatch {
 public:
  TubePatch(double r, double size);
  Vec3 position(const Vec2& xi) const override;
  Vec3 normal(const Vec2& xi) const override;

 private:
  double r_, size_;
};

// Image of a patch under an isometry of the hyperbolic model.
class TransformedPatch : public SurfacePatch {
 public:
  TransformedPatch(std::shared_ptr<const SurfacePatch> inner, Isometry g);
  Vec3 position(const Vec2& xi) const override;
  Vec3 normal(const Vec2& xi) const override;

 private:
  std::shared_ptr<const SurfacePatch> inner_;
  Isometry g_;
};

// Positions, normals and fitted frames pushed forward by g; the intrinsic
// parts of the forms are unchanged.
ImmersedSurface transform_surface(const AmbientModel& model, const ImmersedSurface& surf, const Isometry& g);

// Samples the patch at t * reference(v) for each mesh vertex.
ImmersedSurface sample_patch(const SurfacePatch& patch, std::shared_ptr<const DiskMesh> mesh, double t = 1.0);

}  // namespace ksurf
