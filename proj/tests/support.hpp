#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "flexsim/control.hpp"
#include "flexsim/engine.hpp"
#include "flexsim/models.hpp"
#include "oracles.hpp"

namespace support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(FLEXSIM_FIXTURE_DIR) / (name + ".json");
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = std::filesystem::temp_directory_path() /
             ("flexsim_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// max|a - b| / max|b|: relative error in the max norm.
inline double rel_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

inline bool bit_identical(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
           return std::memcmp(&x, &y, sizeof(double)) == 0;
         });
}

/// Production update of level j (clamp, tip, interior) from the given levels
/// j-2 and j-1 (heat: from level j-1 only).
inline flexsim::FieldHistory production_step(const flexsim::Scenario& s, const oracle::Levels& l2,
                                             const oracle::Levels& l1, std::size_t j,
                                             bool interior_first = false) {
  using namespace flexsim;
  const Mesh mesh = build_mesh(s.mesh);
  FieldHistory h = allocate_history(kind_of(s.model), mesh, Storage::Full);
  std::copy(l2.w.begin(), l2.w.end(), h.w.row(j - 2).begin());
  std::copy(l1.w.begin(), l1.w.end(), h.w.row(j - 1).begin());
  if (h.phi) {
    std::copy(l2.phi.begin(), l2.phi.end(), h.phi->row(j - 2).begin());
    std::copy(l1.phi.begin(), l1.phi.end(), h.phi->row(j - 1).begin());
  }
  const DisturbanceSet d(s.disturbances);
  if (interior_first) {
    interior_step(s.model, mesh, d, h, j);
    apply_tip_update(s.model, s.controller, mesh, d, h, j);
    fixed_end_condition(s.model, h, j);
  } else {
    fixed_end_condition(s.model, h, j);
    apply_tip_update(s.model, s.controller, mesh, d, h, j);
    interior_step(s.model, mesh, d, h, j);
  }
  return h;
}

struct OracleCase {
  flexsim::Scenario scenario;
  oracle::Levels l2, l1;
  std::size_t j{2};
};

/// Random small problem (N in [4, 8]) for the given model; boundary values of
/// the input levels satisfy the model's fixed-end conditions.
inline OracleCase random_case(flexsim::ModelKind kind, std::mt19937_64& rng) {
  using namespace flexsim;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto in = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  OracleCase c;
  const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(4, 8)(rng));
  c.scenario.mesh = {n, static_cast<std::size_t>(std::uniform_int_distribution<int>(10, 40)(rng)),
                     in(0.5, 2.5), in(0.05, 0.4)};
  c.j = std::uniform_int_distribution<std::size_t>(2, c.scenario.mesh.n_time)(rng);
  auto row = [&] {
    oracle::Row r(n + 1);
    for (auto& v : r) v = unit(rng);
    return r;
  };
  c.l2.w = row();
  c.l1.w = row();
  c.l2.w[0] = c.l1.w[0] = 0.0;
  const bool coin = std::bernoulli_distribution(0.5)(rng);

  switch (kind) {
    case ModelKind::Heat:
      c.scenario.model = HeatParams{in(0.1, 2.0), 1, 1.0};
      c.l2.w[n] = c.l1.w[n] = 0.0;
      break;
    case ModelKind::EBBeam:
      c.scenario.model = EBBeamParams{in(0.5, 2.0), in(0.0, 2.0), in(0.0, 20.0), in(0.0, 2.0), 1, 1.0};
      c.l2.w[n] = c.l1.w[n] = 0.0;
      if (coin) c.scenario.disturbances.push_back({DisturbanceKind::TimoshenkoDistributed, true});
      if (std::bernoulli_distribution(0.5)(rng))
        c.scenario.disturbances.push_back({DisturbanceKind::StringDistributed, true});
      break;
    case ModelKind::Timoshenko: {
      c.scenario.model = TimoshenkoParams{in(0.5, 2.0), in(0.5, 2.0), in(0.5, 2.0),
                                          in(1.0, 10.0), in(0.01, 2.0), in(0.01, 2.0)};
      c.l2.phi = row();
      c.l1.phi = row();
      c.l2.phi[0] = c.l1.phi[0] = 0.0;
      if (coin) {
        c.scenario.controller.kind = ControllerKind::PD;
        c.scenario.controller.pd = {in(0, 200), in(0, 50), in(0, 200), in(0, 50)};
      }
      if (std::bernoulli_distribution(0.7)(rng))
        c.scenario.disturbances.push_back({DisturbanceKind::TimoshenkoTip, true});
      if (std::bernoulli_distribution(0.7)(rng))
        c.scenario.disturbances.push_back({DisturbanceKind::TimoshenkoDistributed, true});
      break;
    }
    case ModelKind::String: {
      StringParams p;
      p.payload_mass = in(0.2, 2.0);
      p.tension_scale = in(1.0, 20.0);
      p.tension_offset = in(0.5, 2.0);
      p.lambda_coeff = in(0.0, 0.5);
      p.rho = in(0.5, 2.0);
      p.rho_slope = in(-0.1, 0.5);
      c.scenario.model = p;
      if (coin) {
        c.scenario.controller.kind = ControllerKind::ExactModel;
        c.scenario.controller.exact_model = {in(0, 5), in(0, 5)};
        c.scenario.controller.disturbance_bound = in(0, 3);
      }
      if (std::bernoulli_distribution(0.7)(rng))
        c.scenario.disturbances.push_back({DisturbanceKind::StringTip, true});
      if (std::bernoulli_distribution(0.7)(rng))
        c.scenario.disturbances.push_back({DisturbanceKind::StringDistributed, true});
      break;
    }
  }
  return c;
}

/// Oracle level j for a case; the heat oracle steps from level j-1.
inline oracle::Levels oracle_step(const OracleCase& c) {
  using namespace flexsim;
  const Mesh mesh = build_mesh(c.scenario.mesh);
  const double h = mesh.h(), k = mesh.k(), t = mesh.t(c.j), length = mesh.length();
  const DisturbanceSet d(c.scenario.disturbances);
  const auto on = [&](DisturbanceKind kind) { return d.active(kind); };
  oracle::Levels out;
  if (const auto* p = std::get_if<HeatParams>(&c.scenario.model)) {
    out.w = oracle::heat(c.l1.w, p->alpha, h, k);
  } else if (const auto* b = std::get_if<EBBeamParams>(&c.scenario.model)) {
    out.w = oracle::eb_beam(c.l1.w, c.l2.w, b->rho, b->ei, b->tension, b->damping, h, k,
                            mesh.t(c.j - 1), length, on(DisturbanceKind::TimoshenkoDistributed),
                            on(DisturbanceKind::StringDistributed));
  } else if (const auto* tp = std::get_if<TimoshenkoParams>(&c.scenario.model)) {
    const bool pd = c.scenario.controller.kind == ControllerKind::PD;
    const auto& g = c.scenario.controller.pd;
    oracle::TimoParams op{tp->rho, tp->i_rho, tp->ei, tp->shear_k, tp->payload_mass,
                          tp->payload_inertia, pd ? g.k1 : 0.0, pd ? g.k2 : 0.0, pd ? g.k3 : 0.0,
                          pd ? g.k4 : 0.0, on(DisturbanceKind::TimoshenkoTip),
                          on(DisturbanceKind::TimoshenkoDistributed)};
    out = oracle::timoshenko(c.l1, c.l2, op, h, k, t, length);
  } else if (const auto* sp = std::get_if<StringParams>(&c.scenario.model)) {
    const auto& ctl = c.scenario.controller;
    oracle::StringParams op{sp->payload_mass, sp->tension_scale, sp->tension_offset,
                            sp->lambda_coeff, sp->rho, sp->rho_slope,
                            ctl.kind == ControllerKind::ExactModel, ctl.exact_model.k1,
                            ctl.exact_model.k2, ctl.disturbance_bound,
                            on(DisturbanceKind::StringTip), on(DisturbanceKind::StringDistributed)};
    out.w = oracle::string(c.l1.w, c.l2.w, op, h, k, t, length);
  }
  return out;
}

/// Largest relative error between production and oracle over `count` random
/// cases of one model (both fields for the Timoshenko beam).
inline double max_oracle_error(flexsim::ModelKind kind, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    const auto c = random_case(kind, rng);
    const auto prod = production_step(c.scenario, c.l2, c.l1, c.j);
    const auto ref = oracle_step(c);
    worst = std::max(worst, rel_error(prod.w.row(c.j), ref.w));
    if (prod.phi) worst = std::max(worst, rel_error(prod.phi->row(c.j), ref.phi));
  }
  return worst;
}

}  // namespace support
