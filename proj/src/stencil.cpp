#include "fnlab/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fnlab {

double LatticeDir::len() const { return std::hypot(static_cast<double>(a), static_cast<double>(b)); }

namespace {

Frame make_frame(int a, int b) { return Frame{{a, b}, {-b, a}}; }

std::vector<std::array<int, 2>> canonical(int m) {
    switch (m) {
        case 1: return {{1, 0}};
        case 2: return {{1, 0}, {1, 1}};
        case 4: return {{1, 0}, {2, 1}, {1, 1}, {1, 2}};
        case 8: return {{1, 0}, {3, 1}, {2, 1}, {3, 2}, {1, 1}, {2, 3}, {1, 2}, {1, 3}};
        default: return {};
    }
}

} // namespace

Stencil Stencil::standard(int m, int reach) {
    if (m < 1) throw std::invalid_argument("Stencil: m >= 1");
    if (reach < 1) throw std::invalid_argument("Stencil: reach >= 1");
    Stencil s;
    s.reach_ = reach;
    auto dirs = canonical(m);
    if (dirs.empty()) {
        // greedy largest-gap insertion from coprime candidates
        std::vector<std::array<int, 2>> cands;
        for (int a = 1; a <= 6; ++a)
            for (int b = 0; b <= 6; ++b)
                if (std::gcd(a, b) == 1) cands.push_back({a, b});
        std::sort(cands.begin(), cands.end(), [](auto& u, auto& v) {
            return std::atan2(u[1], u[0]) < std::atan2(v[1], v[0]);
        });
        if (m > static_cast<int>(cands.size()))
            throw std::invalid_argument("Stencil: m exceeds the available lattice directions");
        std::vector<bool> used(cands.size(), false);
        dirs.push_back({1, 0});
        used[0] = true;
        auto angle = [](const std::array<int, 2>& d) { return std::atan2(d[1], d[0]); };
        while (static_cast<int>(dirs.size()) < m) {
            // candidate maximizing the distance to already chosen angles
            double best_gap = -1.0;
            size_t best = 0;
            for (size_t c = 0; c < cands.size(); ++c) {
                if (used[c]) continue;
                double gap = 1e9;
                for (auto& d : dirs) gap = std::min(gap, std::abs(angle(cands[c]) - angle(d)));
                if (gap > best_gap) {
                    best_gap = gap;
                    best = c;
                }
            }
            used[best] = true;
            dirs.push_back(cands[best]);
        }
    }
    for (auto& d : dirs) s.frames_.push_back(make_frame(d[0], d[1]));
    return s;
}

double Stencil::max_arm_in_h() const {
    double m = 0.0;
    for (const auto& f : frames_) m = std::max({m, f.d1.len(), f.d2.len()});
    return m * reach_;
}

int Stencil::max_abs_offset() const {
    int m = 0;
    for (const auto& f : frames_)
        m = std::max({m, std::abs(f.d1.a), std::abs(f.d1.b), std::abs(f.d2.a), std::abs(f.d2.b)});
    return m * reach_;
}

bool Stencil::contains_axis_frame() const {
    for (const auto& f : frames_)
        if (f.d1.a == 1 && f.d1.b == 0) return true;
    return false;
}

double Stencil::orthonormality_defect() const {
    double worst = 0.0;
    for (const auto& f : frames_) {
        double dp = f.d1.a * f.d2.a + f.d1.b * f.d2.b;
        double ln = std::abs(f.d1.len() - f.d2.len());
        worst = std::max({worst, std::abs(dp) / (f.d1.len() * f.d2.len()), ln / f.d1.len()});
    }
    return worst;
}

} // namespace fnlab
