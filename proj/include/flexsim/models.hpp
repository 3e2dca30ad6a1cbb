#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "flexsim/error.hpp"
#include "flexsim/mesh.hpp"

namespace flexsim {

enum class ModelKind { Heat, EBBeam, Timoshenko, String };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

/// phi_t = alpha * phi_xx with homogeneous Dirichlet ends and initial profile
/// amplitude * sin(mode * pi * x / L).
struct HeatParams {
  double alpha{1.0};
  int initial_mode{1};
  double initial_amplitude{1.0};

  friend bool operator==(const HeatParams&, const HeatParams&) = default;
};

/// rho w_tt = -EI w_xxxx + T w_xx - c w_t + f, both ends pinned with zero
/// moment, initial profile amplitude * sin(mode * pi * x / L) at rest.
struct EBBeamParams {
  double rho{1.0};
  double ei{1.0};
  double tension{10.0};
  double damping{0.5};
  int initial_mode{1};
  double initial_amplitude{1.0};

  friend bool operator==(const EBBeamParams&, const EBBeamParams&) = default;
};

/// Timoshenko beam clamped at x=0 with a tip payload (mass M, inertia J):
///   rho   w_tt   = K (w_xx - phi_x) + f
///   I_rho phi_tt = EI phi_xx + K (w_x - phi)
/// Shear strain is (w_x - phi) in both equations, the same convention as the
/// payload balance M w_tt = K (phi - w_x) + u + d.
struct TimoshenkoParams {
  double rho{1.0};
  double i_rho{1.0};
  double ei{1.0};
  double shear_k{5.0};
  double payload_mass{0.01};
  double payload_inertia{0.01};

  friend bool operator==(const TimoshenkoParams&, const TimoshenkoParams&) = default;
};

/// Non-uniform string with gradient-dependent tension
///   T(x, w_x) = T0(x) + lambda(x) w_x^2,  T0(x) = a (x + b),  lambda(x) = c x
/// and density rho(x) = rho + rho_slope * x.
struct StringParams {
  double payload_mass{1.0};
  double tension_scale{10.0};   ///< a
  double tension_offset{1.0};   ///< b
  double lambda_coeff{0.1};     ///< c
  double rho{1.0};
  double rho_slope{0.0};

  double base_tension(double x) const noexcept { return tension_scale * (x + tension_offset); }
  double base_tension_slope() const noexcept { return tension_scale; }
  double lambda(double x) const noexcept { return lambda_coeff * x; }
  double lambda_slope() const noexcept { return lambda_coeff; }
  double density(double x) const noexcept { return rho + rho_slope * x; }

  friend bool operator==(const StringParams&, const StringParams&) = default;
};

using ModelSpec = std::variant<HeatParams, EBBeamParams, TimoshenkoParams, StringParams>;

ModelKind kind_of(const ModelSpec& model);
/// Parameter constraints; paths are relative to the params object ("rho").
/// Spatially varying profiles are checked on [0, length].
Issues validate(const ModelSpec& model, double length);

/// T(x) = T0(x) + lambda(x) * wx^2.
double string_tension(const StringParams& params, double x, double wx);

// ---------------------------------------------------------------------------
// Disturbances

enum class DisturbanceKind { None, TimoshenkoTip, TimoshenkoDistributed, StringTip, StringDistributed };

std::string_view to_string(DisturbanceKind kind);
std::optional<DisturbanceKind> parse_disturbance_kind(std::string_view name);
bool is_distributed(DisturbanceKind kind);
/// Which model kinds may carry a disturbance kind.
bool disturbance_compatible(ModelKind model, DisturbanceKind kind);

struct DisturbanceSpec {
  DisturbanceKind kind{DisturbanceKind::None};
  bool enabled{true};

  friend bool operator==(const DisturbanceSpec&, const DisturbanceSpec&) = default;
};

/// Tip disturbances of the Timoshenko beam carry a force (primary) and a
/// torque (secondary); every other kind only fills primary.
struct DisturbanceValue {
  double primary{0.0};
  double secondary{0.0};
};

/// Evaluates the disturbance at physical (x, t). Disabled specs give zero.
/// The Timoshenko tip pair is evaluated at the given x, which callers set to
/// the tip coordinate.
DisturbanceValue eval_disturbance(const DisturbanceSpec& spec, double x, double t, double length);

/// The disturbances attached to one scenario.
class DisturbanceSet {
 public:
  DisturbanceSet() = default;
  explicit DisturbanceSet(std::vector<DisturbanceSpec> specs) : specs_(std::move(specs)) {}

  bool active(DisturbanceKind kind) const noexcept;
  /// Sum of the enabled specs of the given kind.
  DisturbanceValue eval(DisturbanceKind kind, double x, double t, double length) const;
  /// Sum of every enabled distributed load at (x, t).
  double distributed(double x, double t, double length) const;
  const std::vector<DisturbanceSpec>& specs() const noexcept { return specs_; }

 private:
  std::vector<DisturbanceSpec> specs_;
};

// ---------------------------------------------------------------------------
// Field storage

enum class Storage { Full, Rolling };

/// Time-level by node grid. With full storage every level is kept; rolling
/// storage keeps the last `capacity` levels and maps level j to j % capacity.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t n_nodes, std::size_t n_levels, std::size_t capacity);

  std::span<double> row(std::size_t level) noexcept {
    return {data_.data() + (level % capacity_) * n_nodes_, n_nodes_};
  }
  std::span<const double> row(std::size_t level) const noexcept {
    return {data_.data() + (level % capacity_) * n_nodes_, n_nodes_};
  }
  /// Bounds-checked element access (node, level).
  double at(std::size_t node, std::size_t level) const;

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t n_levels() const noexcept { return n_levels_; }
  std::size_t capacity() const noexcept { return capacity_; }
  bool is_full() const noexcept { return capacity_ == n_levels_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_nodes_{0};
  std::size_t n_levels_{0};
  std::size_t capacity_{1};
  std::vector<double> data_;
};

/// Displacement w and, for the Timoshenko beam, cross-section rotation phi.
struct FieldHistory {
  Grid w;
  std::optional<Grid> phi;

  std::size_t n_nodes() const noexcept { return w.n_nodes(); }
  std::size_t n_levels() const noexcept { return w.n_levels(); }

  friend bool operator==(const FieldHistory&, const FieldHistory&) = default;
};

inline constexpr std::size_t kRollingLevels = 3;

/// Bytes a history of this shape would occupy.
std::size_t history_bytes(ModelKind kind, const Mesh& mesh, Storage storage);
/// Zero-initialized history sized for the mesh.
FieldHistory allocate_history(ModelKind kind, const Mesh& mesh, Storage storage);

// ---------------------------------------------------------------------------
// Initial, boundary and interior updates

/// Fills levels 0 and 1. Second-order-in-time models encode zero initial
/// velocity as two equal levels; the heat model's level 1 is one explicit step
/// from level 0.
void apply_initial_conditions(const ModelSpec& model, const Mesh& mesh, FieldHistory& history);

/// Clamps node 0 of every field at level j (and node N for the heat and
/// Euler-Bernoulli models, which are held at both ends).
void fixed_end_condition(const ModelSpec& model, FieldHistory& history, std::size_t j);

/// phi(i,j+1) = r phi(i+1,j) + (1-2r) phi(i,j) + r phi(i-1,j) on nodes 1..N-1.
void heat_interior_step(double r, FieldHistory& history, std::size_t j);

/// Writes level j on nodes 1..N-1 from levels j-1, j-2. Nodes 1 and N-1 use
/// ghost values w(-1) = -w(1) and w(N+1) = 2w(N) - w(N-1).
void eb_beam_interior_step(const EBBeamParams& params, const Mesh& mesh,
                           const DisturbanceSet& disturbances, FieldHistory& history,
                           std::size_t j);

/// Writes level j of w and phi on nodes 1..N-1 from levels j-1, j-2.
void timoshenko_interior_step(const TimoshenkoParams& params, const Mesh& mesh,
                              const DisturbanceSet& disturbances, FieldHistory& history,
                              std::size_t j);

/// Writes level j on nodes 1..N-1 from levels j-1, j-2.
void string_interior_step(const StringParams& params, const Mesh& mesh,
                          const DisturbanceSet& disturbances, FieldHistory& history,
                          std::size_t j);

/// Dispatches to the model's interior update for level j. The heat model,
/// being first order in time, advances from level j-1.
void interior_step(const ModelSpec& model, const Mesh& mesh, const DisturbanceSet& disturbances,
                   FieldHistory& history, std::size_t j);

}  // namespace flexsim
