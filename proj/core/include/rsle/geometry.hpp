#pragma once

/// Frames for the radial evolution and the Mobius map connecting them.
///
/// exterior_disc: hulls grow from x0 = 1 outside the unit circle toward
///                z* = infinity.
/// half_plane:    hulls grow from x0 = 0 in the closed upper half plane
///                toward z* = i.
///
/// The frames are related by m(z) = -(z+i)/(z-i), which sends (0, i) to
/// (1, infinity). Conjugating the disc flow driven by xi through m yields the
/// half-plane flow driven by p = -tan(xi/2); the sign flip is the usual
/// (rho, xi) -> (-rho, -xi) equivalence and is immaterial in law.

#include <complex>

namespace rsle {

using cplx = std::complex<double>;

enum class FrameTag { exterior_disc, half_plane };

struct GeometryFrame {
    FrameTag tag;
    cplx x0;      // boundary seed of the trace
    cplx z_star;  // target fixed point (infinity encoded as (inf, 0))

    static GeometryFrame exterior_disc() {
        return {FrameTag::exterior_disc, cplx(1.0, 0.0),
                cplx(std::numeric_limits<double>::infinity(), 0.0)};
    }
    static GeometryFrame half_plane() {
        return {FrameTag::half_plane, cplx(0.0, 0.0), cplx(0.0, 1.0)};
    }
};

/// half plane -> exterior disc, m(0) = 1, m(i) = infinity
inline cplx disc_of_half_plane(cplx w) {
    const cplx i(0.0, 1.0);
    return -(w + i) / (w - i);
}

/// exterior disc -> half plane, inverse of the above
inline cplx half_plane_of_disc(cplx u) {
    const cplx i(0.0, 1.0);
    return i * (u - 1.0) / (u + 1.0);
}

/// Mobius rotation of the half plane fixing i, sending the real point q to 0.
inline cplx rotate_to_origin(cplx w, double q) { return (w - q) / (1.0 + q * w); }
inline cplx rotate_from_origin(cplx w, double q) { return (w + q) / (1.0 - q * w); }

} // namespace rsle
