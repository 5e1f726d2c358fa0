#include "fnlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fnlab {

Domain Domain::ball(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball: radius > 0");
    Domain d;
    d.kind_ = DomainKind::Ball;
    d.c_ = center;
    d.r1_ = radius;
    return d;
}

Domain Domain::annulus(Vec2 center, double r_in, double r_out) {
    if (!(r_in > 0.0) || !(r_out > r_in)) throw std::invalid_argument("annulus: 0 < r_in < r_out");
    Domain d;
    d.kind_ = DomainKind::Annulus;
    d.c_ = center;
    d.r1_ = r_in;
    d.r2_ = r_out;
    return d;
}

Domain Domain::ellipse(Vec2 center, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse: a,b > 0");
    Domain d;
    d.kind_ = DomainKind::Ellipse;
    d.c_ = center;
    d.r1_ = a;
    d.r2_ = b;
    return d;
}

Domain Domain::half_graph(Vec2 center, double amp, double freq, double halfwidth, double top) {
    if (!(halfwidth > 0.0) || !(top > amp))
        throw std::invalid_argument("half_graph: need halfwidth > 0 and top above the graph");
    Domain d;
    d.kind_ = DomainKind::HalfGraph;
    d.c_ = center;
    d.amp_ = amp;
    d.freq_ = freq;
    d.halfwidth_ = halfwidth;
    d.top_ = top;
    return d;
}

double Domain::graph(double s) const { return amp_ * std::cos(freq_ * (s - c_.x)); }
double Domain::graph_slope(double s) const { return -amp_ * freq_ * std::sin(freq_ * (s - c_.x)); }
double Domain::curvature_bound() const { return std::abs(amp_) * freq_ * freq_; }

Aabb Domain::bounding_box() const {
    switch (kind_) {
        case DomainKind::Ball:
            return {c_ - Vec2{r1_, r1_}, c_ + Vec2{r1_, r1_}};
        case DomainKind::Annulus:
            return {c_ - Vec2{r2_, r2_}, c_ + Vec2{r2_, r2_}};
        case DomainKind::Ellipse:
            return {c_ - Vec2{r1_, r2_}, c_ + Vec2{r1_, r2_}};
        case DomainKind::HalfGraph:
            return {c_ + Vec2{-halfwidth_, -std::abs(amp_)}, c_ + Vec2{halfwidth_, top_}};
    }
    return {};
}

namespace {

/// Nearest point on the axis-aligned ellipse x^2/a^2 + y^2/b^2 = 1 for a query
/// in the closed first quadrant. Bisection on the standard scalar equation.
Vec2 ellipse_closest_q1(double a, double b, double u, double v) {
    const double eps = 1e-15 * std::max(a, b);
    if (v <= eps) {
        // query on the major axis of this section
        const double t = (a * a - b * b) / a;
        if (t > 0.0 && u < t) {
            double x0 = a * a * u / (a * a - b * b);
            double y0 = b * std::sqrt(std::max(0.0, 1.0 - (x0 / a) * (x0 / a)));
            return {x0, y0};
        }
        return {a, 0.0};
    }
    if (u <= eps) {
        const double t = (b * b - a * a) / b;
        if (t > 0.0 && v < t) {
            double y0 = b * b * v / (b * b - a * a);
            double x0 = a * std::sqrt(std::max(0.0, 1.0 - (y0 / b) * (y0 / b)));
            return {x0, y0};
        }
        return {0.0, b};
    }
    auto f = [&](double t) {
        double ra = a * u / (t + a * a);
        double rb = b * v / (t + b * b);
        return ra * ra + rb * rb - 1.0;
    };
    double lo = -std::min(a, b) * std::min(a, b);
    double hi = std::hypot(a * u, b * v);  // f(hi) < 0 is guaranteed below
    while (f(hi) > 0.0) hi = 2.0 * hi + 1.0;
    // lo side diverges to +inf; bisect
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    return {a * a * u / (t + a * a), b * b * v / (t + b * b)};
}

Vec2 rect_closest(Vec2 lo, Vec2 hi, Vec2 p) {
    // nearest point on the rectangle boundary
    if (p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y) {
        return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y)};
    }
    double dl = p.x - lo.x, dr = hi.x - p.x, db = p.y - lo.y, dt = hi.y - p.y;
    double m = std::min(std::min(dl, dr), std::min(db, dt));
    if (m == dl) return {lo.x, p.y};
    if (m == dr) return {hi.x, p.y};
    if (m == db) return {p.x, lo.y};
    return {p.x, hi.y};
}

} // namespace

double Domain::signed_distance(Vec2 p) const {
    switch (kind_) {
        case DomainKind::Ball:
            return norm(p - c_) - r1_;
        case DomainKind::Annulus: {
            double r = norm(p - c_);
            return std::max(r1_ - r, r - r2_);
        }
        case DomainKind::Ellipse: {
            Vec2 q = p - c_;
            Vec2 cp = ellipse_closest_q1(r1_, r2_, std::abs(q.x), std::abs(q.y));
            double dist = std::hypot(std::abs(q.x) - cp.x, std::abs(q.y) - cp.y);
            bool inside = (q.x / r1_) * (q.x / r1_) + (q.y / r2_) * (q.y / r2_) < 1.0;
            return inside ? -dist : dist;
        }
        case DomainKind::HalfGraph: {
            Vec2 q = p - c_;
            // CSG: intersection of the supergraph region and the bounding rectangle
            double dg = graph_face_signed(q);
            Vec2 lo{-halfwidth_, -std::abs(amp_) - 1.0};
            Vec2 hi{halfwidth_, top_};
            Vec2 rc = rect_closest(lo, hi, q);
            bool in_rect = q.x > lo.x && q.x < hi.x && q.y > lo.y && q.y < hi.y;
            double dr = std::hypot(q.x - rc.x, q.y - rc.y) * (in_rect ? -1.0 : 1.0);
            return std::max(dg, dr);
        }
    }
    return 0.0;
}

/// Signed distance (negative above the graph) from a centered query to the
/// curve y = phi(s). Coarse scan plus Newton refinement on the stationarity
/// condition of the squared distance.
double Domain::graph_face_signed(Vec2 q) const {
    auto phi = [&](double s) { return amp_ * std::cos(freq_ * s); };
    auto dphi = [&](double s) { return -amp_ * freq_ * std::sin(freq_ * s); };
    auto ddphi = [&](double s) { return -amp_ * freq_ * freq_ * std::cos(freq_ * s); };
    const int scan = 128;
    double best_s = q.x, best_d2 = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= scan; ++k) {
        double s = -halfwidth_ + 2.0 * halfwidth_ * k / scan;
        double d2 = (s - q.x) * (s - q.x) + (phi(s) - q.y) * (phi(s) - q.y);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_s = s;
        }
    }
    double s = best_s;
    for (int it = 0; it < 60; ++it) {
        double e = phi(s) - q.y;
        double g = (s - q.x) + e * dphi(s);
        double gg = 1.0 + dphi(s) * dphi(s) + e * ddphi(s);
        if (std::abs(gg) < 1e-14) break;
        double step = g / gg;
        s -= std::clamp(step, -0.1 * halfwidth_, 0.1 * halfwidth_);
        s = std::clamp(s, -halfwidth_, halfwidth_);
        if (std::abs(step) < 1e-15 * std::max(1.0, halfwidth_)) break;
    }
    double dist = std::hypot(s - q.x, phi(s) - q.y);
    return q.y > phi(q.x) ? -dist : dist;
}

Vec2 Domain::project_to_boundary(Vec2 p) const {
    switch (kind_) {
        case DomainKind::Ball: {
            Vec2 q = p - c_;
            double r = norm(q);
            if (r < 1e-300) return c_ + Vec2{r1_, 0};
            return c_ + q * (r1_ / r);
        }
        case DomainKind::Annulus: {
            Vec2 q = p - c_;
            double r = norm(q);
            if (r < 1e-300) return c_ + Vec2{r1_, 0};
            double target = (r - r1_ < r2_ - r) ? r1_ : r2_;
            return c_ + q * (target / r);
        }
        case DomainKind::Ellipse: {
            Vec2 q = p - c_;
            Vec2 cp = ellipse_closest_q1(r1_, r2_, std::abs(q.x), std::abs(q.y));
            return c_ + Vec2{std::copysign(cp.x, q.x), std::copysign(cp.y, q.y)};
        }
        case DomainKind::HalfGraph: {
            Vec2 q = p - c_;
            // nearest of: graph face, two walls, top
            double dg = std::abs(graph_face_signed(q));
            auto phi = [&](double s) { return amp_ * std::cos(freq_ * s); };
            // recompute the argmin point on the graph
            Vec2 best{q.x, phi(std::clamp(q.x, -halfwidth_, halfwidth_))};
            {
                const int scan = 256;
                double bd = std::numeric_limits<double>::infinity();
                for (int k = 0; k <= scan; ++k) {
                    double s = -halfwidth_ + 2.0 * halfwidth_ * k / scan;
                    double d2 = (s - q.x) * (s - q.x) + (phi(s) - q.y) * (phi(s) - q.y);
                    if (d2 < bd) {
                        bd = d2;
                        best = {s, phi(s)};
                    }
                }
            }
            Vec2 cands[3] = {
                {-halfwidth_, std::clamp(q.y, phi(-halfwidth_), top_)},
                {halfwidth_, std::clamp(q.y, phi(halfwidth_), top_)},
                {std::clamp(q.x, -halfwidth_, halfwidth_), top_}};
            Vec2 bestpt = best;
            double bestd = dg;
            for (Vec2 cpt : cands) {
                double d = norm(q - cpt);
                if (d < bestd) {
                    bestd = d;
                    bestpt = cpt;
                }
            }
            return c_ + bestpt;
        }
    }
    return p;
}

Vec2 Domain::outward_normal(Vec2 z) const {
    switch (kind_) {
        case DomainKind::Ball:
            return normalized(z - c_);
        case DomainKind::Annulus: {
            double r = norm(z - c_);
            Vec2 rad = normalized(z - c_);
            return (std::abs(r - r1_) < std::abs(r - r2_)) ? rad * -1.0 : rad;
        }
        case DomainKind::Ellipse: {
            Vec2 q = z - c_;
            return normalized({q.x / (r1_ * r1_), q.y / (r2_ * r2_)});
        }
        case DomainKind::HalfGraph: {
            Vec2 q = z - c_;
            if (std::abs(q.x - (-halfwidth_)) < 1e-9) return {-1, 0};
            if (std::abs(q.x - halfwidth_) < 1e-9) return {1, 0};
            if (std::abs(q.y - top_) < 1e-9) return {0, 1};
            double sl = graph_slope(z.x);
            return normalized({sl, -1.0});
        }
    }
    return {1, 0};
}

double Domain::diameter() const {
    switch (kind_) {
        case DomainKind::Ball:
            return 2.0 * r1_;
        case DomainKind::Annulus:
            return 2.0 * r2_;
        case DomainKind::Ellipse:
            return 2.0 * std::max(r1_, r2_);
        case DomainKind::HalfGraph:
            return norm(bounding_box().extent());
    }
    return 0.0;
}

double Domain::perimeter_estimate() const {
    switch (kind_) {
        case DomainKind::Ball:
            return 2.0 * M_PI * r1_;
        case DomainKind::Annulus:
            return 2.0 * M_PI * (r1_ + r2_);
        case DomainKind::Ellipse: {
            // Ramanujan
            double h = (r1_ - r2_) * (r1_ - r2_) / ((r1_ + r2_) * (r1_ + r2_));
            return M_PI * (r1_ + r2_) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
        }
        case DomainKind::HalfGraph: {
            double len = 0.0;
            const int nseg = 512;
            for (int k = 0; k < nseg; ++k) {
                double s0 = -halfwidth_ + 2.0 * halfwidth_ * k / nseg;
                double s1 = -halfwidth_ + 2.0 * halfwidth_ * (k + 1) / nseg;
                len += std::hypot(s1 - s0, graph(c_.x + s1) - graph(c_.x + s0));
            }
            return len + 2.0 * (top_ - graph(c_.x + halfwidth_)) + 2.0 * halfwidth_;
        }
    }
    return 0.0;
}

std::vector<Vec2> Domain::sample_boundary(int count, bool graph_face_only) const {
    std::vector<Vec2> pts;
    pts.reserve(count);
    switch (kind_) {
        case DomainKind::Ball:
            for (int k = 0; k < count; ++k) {
                double th = 2.0 * M_PI * k / count;
                pts.push_back(c_ + Vec2{r1_ * std::cos(th), r1_ * std::sin(th)});
            }
            break;
        case DomainKind::Annulus: {
            int n_out = std::max(4, static_cast<int>(std::round(count * r2_ / (r1_ + r2_))));
            int n_in = std::max(4, count - n_out);
            for (int k = 0; k < n_out; ++k) {
                double th = 2.0 * M_PI * k / n_out;
                pts.push_back(c_ + Vec2{r2_ * std::cos(th), r2_ * std::sin(th)});
            }
            for (int k = 0; k < n_in; ++k) {
                double th = 2.0 * M_PI * k / n_in;
                pts.push_back(c_ + Vec2{r1_ * std::cos(th), r1_ * std::sin(th)});
            }
            break;
        }
        case DomainKind::Ellipse: {
            int n = std::max(8, (count / 4) * 4);  // keep the four vertices in the set
            for (int k = 0; k < n; ++k) {
                double th = 2.0 * M_PI * k / n;
                pts.push_back(c_ + Vec2{r1_ * std::cos(th), r2_ * std::sin(th)});
            }
            break;
        }
        case DomainKind::HalfGraph: {
            if (graph_face_only) {
                // stay away from the box corners (not C^{1,1} there)
                double w = 0.8 * halfwidth_;
                for (int k = 0; k <= count - 1; ++k) {
                    double s = -w + 2.0 * w * k / (count - 1);
                    pts.push_back(c_ + Vec2{s, graph(c_.x + s)});
                }
                break;
            }
            double wg = 2.0 * halfwidth_;
            double wall = top_ - graph(c_.x + halfwidth_);
            double total = wg + 2.0 * wall + 2.0 * halfwidth_;
            int ng = std::max(4, static_cast<int>(count * wg / total));
            int nw = std::max(2, static_cast<int>(count * wall / total));
            int nt = std::max(2, count - ng - 2 * nw);
            for (int k = 0; k < ng; ++k) {
                double s = -halfwidth_ + 2.0 * halfwidth_ * k / ng;
                pts.push_back(c_ + Vec2{s, graph(c_.x + s)});
            }
            for (int k = 0; k < nw; ++k) {
                double t = graph(c_.x + halfwidth_) + wall * (k + 0.5) / nw;
                pts.push_back(c_ + Vec2{halfwidth_, t});
                pts.push_back(c_ + Vec2{-halfwidth_, t});
            }
            for (int k = 0; k < nt; ++k) {
                double s = -halfwidth_ + 2.0 * halfwidth_ * (k + 0.5) / nt;
                pts.push_back(c_ + Vec2{s, top_});
            }
            break;
        }
    }
    return pts;
}

double ball_condition_radius(const Domain& dom, int samples) {
    if (samples < 8) throw std::invalid_argument("ball_condition_radius: samples >= 8");
    const double cap = dom.diameter();
    if (!(cap > 0.0)) throw std::invalid_argument("ball_condition_radius: degenerate domain");
    const double tol = 1e-12 * std::max(1.0, cap);
    auto fits = [&](Vec2 z, Vec2 nu, double rho, bool interior) {
        Vec2 center = interior ? z - nu * rho : z + nu * rho;
        double d = dom.signed_distance(center);
        return interior ? d + rho <= tol : d - rho >= -tol;
    };
    auto largest = [&](Vec2 z, Vec2 nu, bool interior) {
        if (fits(z, nu, cap, interior)) return cap;
        double lo = 0.0, hi = cap;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (fits(z, nu, mid, interior) ? lo : hi) = mid;
        }
        return lo;
    };
    bool graph_only = dom.kind() == DomainKind::HalfGraph;
    double r = cap;
    for (Vec2 z : dom.sample_boundary(samples, graph_only)) {
        Vec2 nu = dom.outward_normal(z);
        r = std::min(r, largest(z, nu, true));
        r = std::min(r, largest(z, nu, false));
    }
    if (!(r > 0.0)) throw std::invalid_argument("ball_condition_radius: degenerate domain");
    return r;
}

} // namespace fnlab
