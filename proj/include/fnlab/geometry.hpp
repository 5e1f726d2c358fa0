#pragma once

#include <memory>
#include <vector>

#include "fnlab/vec2.hpp"

namespace fnlab {

enum class DomainKind { Ball, Annulus, Ellipse, HalfGraph };

/// Bounded C^{1,1} domain described by its signed distance field (negative
/// inside). Ball/Annulus distances are exact; Ellipse and HalfGraph use
/// Newton/bisection projections accurate to ~1e-12.
class Domain {
public:
    static Domain ball(Vec2 center, double radius);
    static Domain annulus(Vec2 center, double r_in, double r_out);
    static Domain ellipse(Vec2 center, double a, double b);
    /// Region { |s-cx| < halfwidth, phi(s) < y-cy < top } with
    /// phi(s) = amp*cos(freq*(s-cx)). The two upper corners are not C^{1,1};
    /// curvature-sensitive operations restrict to the graph face.
    static Domain half_graph(Vec2 center, double amp, double freq, double halfwidth, double top);

    DomainKind kind() const { return kind_; }
    Aabb bounding_box() const;
    double signed_distance(Vec2 p) const;
    Vec2 project_to_boundary(Vec2 p) const;
    Vec2 outward_normal(Vec2 boundary_point) const;
    double diameter() const;
    double perimeter_estimate() const;
    /// Deterministic boundary sample points (parametric, proportional to face
    /// length). For HalfGraph, graph_face_only restricts to the curved face.
    std::vector<Vec2> sample_boundary(int count, bool graph_face_only = false) const;

    // parameters (meaningful fields depend on kind)
    Vec2 center() const { return c_; }
    double radius() const { return r1_; }
    double r_in() const { return r1_; }
    double r_out() const { return r2_; }
    double semi_a() const { return r1_; }
    double semi_b() const { return r2_; }
    double graph(double s) const;        ///< phi(s), HalfGraph only
    double graph_slope(double s) const;  ///< phi'(s)
    double curvature_bound() const;      ///< sup |D^2 phi| for HalfGraph

private:
    double graph_face_signed(Vec2 centered_query) const;

    DomainKind kind_ = DomainKind::Ball;
    Vec2 c_{0, 0};
    double r1_ = 1.0, r2_ = 0.0;   // radius / (r_in,r_out) / (a,b)
    double amp_ = 0.0, freq_ = 0.0, halfwidth_ = 0.0, top_ = 0.0;
};

/// Largest r such that every sampled boundary point admits interior and
/// exterior tangent balls of radius r (bisection on the signed distance).
/// samples >= 8; throws on degenerate domains.
double ball_condition_radius(const Domain& dom, int samples = 256);

} // namespace fnlab
