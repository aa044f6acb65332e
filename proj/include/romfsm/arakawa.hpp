#pragma once

#include "romfsm/types.hpp"

namespace romfsm {

enum class ArakawaOrder {
    second,  // (J1 + J2 + J3)/3 on the unit stencil
    fourth,  // Richardson combination (4 J_h - J_2h)/3 on the doubled stencil
};

/// Conservative discretization of J(w, s) = w_x s_y - w_y s_x on the periodic
/// grid. Both variants annihilate the discrete invariants:
/// <J(w,s), w> = <J(w,s), s> = 0 and <J(a,b), c> = -<J(c,b), a>.
Field2D arakawa_jacobian(const Field2D& w, const Field2D& s, const Grid2D& grid,
                         ArakawaOrder order = ArakawaOrder::fourth);

}  // namespace romfsm
