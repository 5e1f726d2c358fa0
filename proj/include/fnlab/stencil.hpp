#pragma once

#include <array>
#include <vector>

namespace fnlab {

/// Integer lattice direction (a,b), gcd(a,b)=1.
struct LatticeDir {
    int a = 1, b = 0;
    double len() const;
};

/// Orthogonal frame of two lattice directions, d2 = rot90(d1).
struct Frame {
    LatticeDir d1, d2;
};

/// Direction frames for the wide-stencil discretization. Frames are exact
/// lattice rotations (w, w_perp), so second differences sample grid nodes and
/// are quadratically exact per frame; m=8 covers [0, pi/2) at ~pi/16 spacing.
class Stencil {
public:
    /// m in {1,2,4,8} uses the canonical direction sets; other m picks angles
    /// greedily from coprime directions with entries <= 6.
    static Stencil standard(int m = 8, int reach = 1);
    static Stencil axes() { return standard(1); }

    const std::vector<Frame>& frames() const { return frames_; }
    int reach() const { return reach_; }
    /// Largest arm length in units of h.
    double max_arm_in_h() const;
    /// Largest |component| of any arm in lattice steps (band sizing).
    int max_abs_offset() const;
    bool contains_axis_frame() const;
    /// Max over frames of the frame's orthonormality defect (exact 0 here,
    /// kept as a checkable invariant).
    double orthonormality_defect() const;

private:
    std::vector<Frame> frames_;
    int reach_ = 1;
};

} // namespace fnlab
