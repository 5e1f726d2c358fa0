#include "fnlab/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fnlab {

Grid::Grid(std::shared_ptr<const Domain> dom, double h, double band_width_in_h)
    : dom_(std::move(dom)), h_(h), band_width_(band_width_in_h) {
    if (!(h > 0.0)) throw std::invalid_argument("Grid: h > 0");
    Aabb box = dom_->bounding_box();
    const double margin = (band_width_ + 2.0) * h_;
    i0_ = static_cast<int>(std::floor((box.lo.x - margin) / h_));
    j0_ = static_cast<int>(std::floor((box.lo.y - margin) / h_));
    nx_ = static_cast<int>(std::ceil((box.hi.x + margin) / h_)) - i0_ + 1;
    ny_ = static_cast<int>(std::ceil((box.hi.y + margin) / h_)) - j0_ + 1;
    const int n = nx_ * ny_;
    cls_.assign(n, NodeClass::Exterior);
    dist_.resize(n);
    band_pos_.assign(n, -1);
    const double bw = band_width_ * h_;
    for (int idx = 0; idx < n; ++idx) {
        Vec2 p = point(idx);
        double d = dom_->signed_distance(p);
        dist_[idx] = d;
        if (d < 0.0) {
            cls_[idx] = NodeClass::Interior;
            interior_.push_back(idx);
        } else if (d <= bw) {
            cls_[idx] = NodeClass::Band;
            band_pos_[idx] = static_cast<int>(band_.size());
            band_.push_back(idx);
            proj_.push_back(dom_->project_to_boundary(p));
        }
    }
    if (interior_.empty()) throw std::invalid_argument("Grid: no interior nodes at this h");
}

std::shared_ptr<Grid> build_grid(std::shared_ptr<const Domain> dom, double h,
                                 double band_width_in_h) {
    const double r = ball_condition_radius(*dom);
    if (!(h < r / 4.0))
        throw std::invalid_argument("build_grid: h must be < ball_condition_radius/4");
    return std::make_shared<Grid>(std::move(dom), h, band_width_in_h);
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)),
      v_(grid_ ? grid_->size() : 0, std::numeric_limits<double>::quiet_NaN()) {}

void GridFunction::fill(const std::function<double(Vec2)>& f) {
    for (int idx : grid_->interior()) v_[idx] = f(grid_->point(idx));
    for (int idx : grid_->band()) v_[idx] = f(grid_->point(idx));
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (int idx : grid_->interior()) m = std::max(m, std::abs(v_[idx]));
    for (int idx : grid_->band()) m = std::max(m, std::abs(v_[idx]));
    return m;
}

double GridFunction::sup_diff(const GridFunction& o) const {
    double m = 0.0;
    for (int idx : grid_->interior()) m = std::max(m, std::abs(v_[idx] - o.v_[idx]));
    for (int idx : grid_->band()) m = std::max(m, std::abs(v_[idx] - o.v_[idx]));
    return m;
}

bool GridFunction::all_finite() const {
    for (int idx : grid_->interior())
        if (!std::isfinite(v_[idx])) return false;
    for (int idx : grid_->band())
        if (!std::isfinite(v_[idx])) return false;
    return true;
}

Vec2 BoundaryData::ambient_gradient(Vec2 p) const {
    const double s = fd_step;
    return {(g({p.x + s, p.y}) - g({p.x - s, p.y})) / (2.0 * s),
            (g({p.x, p.y + s}) - g({p.x, p.y - s})) / (2.0 * s)};
}

double BoundaryData::band_value(Vec2 node, Vec2 projection) const {
    double v = g(projection);
    if (linear_correction) v += dot(ambient_gradient(projection), node - projection);
    return v;
}

void impose_boundary(GridFunction& u, const BoundaryData& bd) {
    const Grid& gr = u.grid();
    const auto& band = gr.band();
    for (size_t k = 0; k < band.size(); ++k) {
        int idx = band[k];
        u[idx] = bd.band_value(gr.point(idx), gr.band_projection(static_cast<int>(k)));
    }
}

double c1beta_norm_estimate(const BoundaryData& bd, const Domain& dom, int samples) {
    auto pts = dom.sample_boundary(samples);
    double sup_g = 0.0, sup_dg = 0.0, holder = 0.0;
    std::vector<double> tang(pts.size());
    for (size_t k = 0; k < pts.size(); ++k) {
        sup_g = std::max(sup_g, std::abs(bd.g(pts[k])));
        Vec2 nu = dom.outward_normal(pts[k]);
        Vec2 tau{-nu.y, nu.x};
        Vec2 grad = bd.ambient_gradient(pts[k]);
        tang[k] = dot(grad, tau);
        sup_dg = std::max(sup_dg, std::abs(tang[k]));
    }
    for (size_t a = 0; a < pts.size(); ++a)
        for (size_t b = a + 1; b < pts.size(); ++b) {
            double dist = norm(pts[a] - pts[b]);
            if (dist < 1e-9) continue;
            holder = std::max(holder, std::abs(tang[a] - tang[b]) / std::pow(dist, bd.beta_g));
        }
    return sup_g + sup_dg + holder;
}

} // namespace fnlab
