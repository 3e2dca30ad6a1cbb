#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>

namespace flexsim {

/// Finite-difference operators used by the explicit schemes.
///
/// Slices are ordered by increasing coordinate: a two-point stencil takes
/// [u(x), u(x+s)] (or the backward pair [u(x-s), u(x)], same formula), a
/// three-point stencil [u(x-s), u(x), u(x+s)], a five-point stencil
/// [u(x-2s) .. u(x+2s)].
enum class StencilKind {
  FirstTime,    ///< (u1 - u0)/k, O(k)
  SecondTime,   ///< (u0 - 2u1 + u2)/k^2, O(k^2)
  FirstSpace,   ///< (u1 - u0)/h, O(h)
  SecondSpace,  ///< (u0 - 2u1 + u2)/h^2, O(h^2)
  ThirdSpace,   ///< (-u0 + 2u1 - 2u3 + u4)/(2h^3), O(h^2)
  FourthSpace,  ///< (u0 - 4u1 + 6u2 - 4u3 + u4)/h^4, O(h^2)
};

inline constexpr std::array kAllStencils{StencilKind::FirstTime,  StencilKind::SecondTime,
                                         StencilKind::FirstSpace, StencilKind::SecondSpace,
                                         StencilKind::ThirdSpace, StencilKind::FourthSpace};

std::string_view to_string(StencilKind kind);

/// Integer weights of the stencil, in slice order.
std::span<const double> stencil_coefficients(StencilKind kind);
/// Constant multiplying step^p in the divisor (2 for ThirdSpace, else 1).
double stencil_divisor_scale(StencilKind kind);
/// p in step^p.
int stencil_step_power(StencilKind kind);
/// Formal truncation order of the operator.
int stencil_order(StencilKind kind);
/// Derivative order approximated.
int stencil_derivative(StencilKind kind);
inline std::size_t stencil_width(StencilKind kind) { return stencil_coefficients(kind).size(); }

/// Sum c_i * values_i / (scale * step^p).
/// Throws std::invalid_argument on a slice of the wrong width or step <= 0.
double apply_stencil(StencilKind kind, std::span<const double> values, double step);

/// Richardson order estimate log2(err(s)/err(s/2)) against an exact
/// derivative value. Returns NaN when the error at s/2 is at round-off level
/// (the stencil is exact on the function).
double empirical_order(StencilKind kind, const std::function<double(double)>& f,
                       double exact_derivative, double point, double step);

/// Same estimate with the step chosen per kind, so truncation dominates round-off.
double empirical_order(StencilKind kind, const std::function<double(double)>& f,
                       double exact_derivative, double point);

// Undivided brackets over a grid row, evaluated at node i. The schemes
// multiply these by their own coefficient groups.
namespace diff {

/// u(i) - u(i-1)
inline double backward(std::span<const double> u, std::size_t i) { return u[i] - u[i - 1]; }

/// u(i+1) - 2u(i) + u(i-1)
inline double central2(std::span<const double> u, std::size_t i) {
  return u[i + 1] - 2.0 * u[i] + u[i - 1];
}

/// u(i+2) - 4u(i+1) + 6u(i) - 4u(i-1) + u(i-2), with the outer neighbours passed in.
inline double central4(double u_m2, double u_m1, double u_0, double u_p1, double u_p2) {
  return u_p2 - 4.0 * u_p1 + 6.0 * u_0 - 4.0 * u_m1 + u_m2;
}

}  // namespace diff

}  // namespace flexsim
