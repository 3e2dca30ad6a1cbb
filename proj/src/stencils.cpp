#include "flexsim/stencils.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace flexsim {
namespace {

constexpr std::array<double, 2> kTwoPoint{-1.0, 1.0};
constexpr std::array<double, 3> kThreePoint{1.0, -2.0, 1.0};
constexpr std::array<double, 5> kThird{-1.0, 2.0, 0.0, -2.0, 1.0};
constexpr std::array<double, 5> kFourth{1.0, -4.0, 6.0, -4.0, 1.0};

}  // namespace

std::string_view to_string(StencilKind kind) {
  switch (kind) {
    case StencilKind::FirstTime: return "first_time";
    case StencilKind::SecondTime: return "second_time";
    case StencilKind::FirstSpace: return "first_space";
    case StencilKind::SecondSpace: return "second_space";
    case StencilKind::ThirdSpace: return "third_space";
    case StencilKind::FourthSpace: return "fourth_space";
  }
  return "unknown";
}

std::span<const double> stencil_coefficients(StencilKind kind) {
  switch (kind) {
    case StencilKind::FirstTime:
    case StencilKind::FirstSpace: return kTwoPoint;
    case StencilKind::SecondTime:
    case StencilKind::SecondSpace: return kThreePoint;
    case StencilKind::ThirdSpace: return kThird;
    case StencilKind::FourthSpace: return kFourth;
  }
  throw std::invalid_argument("unknown stencil kind");
}

double stencil_divisor_scale(StencilKind kind) {
  return kind == StencilKind::ThirdSpace ? 2.0 : 1.0;
}

int stencil_step_power(StencilKind kind) { return stencil_derivative(kind); }

int stencil_derivative(StencilKind kind) {
  switch (kind) {
    case StencilKind::FirstTime:
    case StencilKind::FirstSpace: return 1;
    case StencilKind::SecondTime:
    case StencilKind::SecondSpace: return 2;
    case StencilKind::ThirdSpace: return 3;
    case StencilKind::FourthSpace: return 4;
  }
  return 0;
}

int stencil_order(StencilKind kind) {
  switch (kind) {
    case StencilKind::FirstTime:
    case StencilKind::FirstSpace: return 1;
    default: return 2;
  }
}

double apply_stencil(StencilKind kind, std::span<const double> values, double step) {
  const auto coeffs = stencil_coefficients(kind);
  if (values.size() != coeffs.size())
    throw std::invalid_argument(std::string(to_string(kind)) + " expects " +
                                std::to_string(coeffs.size()) + " samples, got " +
                                std::to_string(values.size()));
  if (!(step > 0.0)) throw std::invalid_argument("stencil step must be > 0");

  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) sum += coeffs[i] * values[i];
  return sum / (stencil_divisor_scale(kind) * std::pow(step, stencil_step_power(kind)));
}

namespace {

double sample_and_apply(StencilKind kind, const std::function<double(double)>& f, double point,
                        double step) {
  std::array<double, 5> buf{};
  const auto width = stencil_width(kind);
  // Two-point stencils are forward differences anchored at the point; the
  // others are centred on it.
  const double first = (width == 2) ? point : point - static_cast<double>(width / 2) * step;
  for (std::size_t i = 0; i < width; ++i) buf[i] = f(first + static_cast<double>(i) * step);
  return apply_stencil(kind, std::span<const double>(buf.data(), width), step);
}

}  // namespace

double empirical_order(StencilKind kind, const std::function<double(double)>& f,
                       double exact_derivative, double point, double step) {
  const double coarse = std::abs(sample_and_apply(kind, f, point, step) - exact_derivative);
  const double fine = std::abs(sample_and_apply(kind, f, point, step / 2.0) - exact_derivative);
  // Round-off floor of the finer evaluation: eps * |f| * sum|c| / step^p.
  const double scale = std::max(1.0, std::abs(f(point)));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale * 16.0 /
                       std::pow(step / 2.0, stencil_step_power(kind));
  if (fine <= floor || coarse <= floor) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

double empirical_order(StencilKind kind, const std::function<double(double)>& f,
                       double exact_derivative, double point) {
  double step = 1e-3;
  switch (kind) {
    case StencilKind::FirstTime:
    case StencilKind::FirstSpace: step = 1e-4; break;
    case StencilKind::SecondTime:
    case StencilKind::SecondSpace: step = 1e-2; break;
    case StencilKind::ThirdSpace: step = 2e-2; break;
    case StencilKind::FourthSpace: step = 5e-2; break;
  }
  return empirical_order(kind, f, exact_derivative, point, step);
}

}  // namespace flexsim
