#include "ibssd/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ibssd/bessel.hpp"
#include "ibssd/linear_solvers.hpp"
#include "ibssd/log.hpp"
#include "ibssd/spectral.hpp"

namespace ibssd {

namespace {

struct SchemeName {
  Scheme scheme;
  const char* name;
  bool steady;
};

constexpr SchemeName kSchemes[] = {
    {Scheme::explicit_steady, "explicit_steady", true},
    {Scheme::ssd1_steady, "ssd1_steady", true},
    {Scheme::ssd2_steady, "ssd2_steady", true},
    {Scheme::ifrk4_steady, "ifrk4_steady", true},
    {Scheme::stable_steady, "stable_steady", true},
    {Scheme::explicit_unsteady, "explicit_unsteady", false},
    {Scheme::ssd1_unsteady, "ssd1_unsteady", false},
    {Scheme::ssd2_unsteady, "ssd2_unsteady", false},
    {Scheme::stable_unsteady, "stable_unsteady", false},
    {Scheme::second_order_unsteady, "second_order_unsteady", false},
    {Scheme::explicit2_unsteady, "explicit2_unsteady", false},
};

const SchemeName& lookup(Scheme s) {
  for (const auto& e : kSchemes) {
    if (e.scheme == s) return e;
  }
  throw Error(ErrorKind::usage, "unknown scheme");
}

}  // namespace

const char* to_string(Scheme s) { return lookup(s).name; }

Scheme scheme_from_string(const std::string& name) {
  for (const auto& e : kSchemes) {
    if (name == e.name) return e.scheme;
  }
  throw Error(ErrorKind::usage, "unknown scheme '" + name + "'");
}

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> v = [] {
    std::vector<Scheme> out;
    for (const auto& e : kSchemes) out.push_back(e.scheme);
    return out;
  }();
  return v;
}

bool is_steady(Scheme s) { return lookup(s).steady; }

const char* to_string(SteadyVelocity v) { return v == SteadyVelocity::grid ? "grid" : "boundary_integral"; }

SteadyVelocity steady_velocity_from_string(const std::string& name) {
  if (name == "grid") return SteadyVelocity::grid;
  if (name == "boundary_integral") return SteadyVelocity::boundary_integral;
  throw Error(ErrorKind::usage, "unknown steady velocity '" + name + "'");
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::parameter, "dt must be positive");
  if (!(tolerance > 0.0) || tolerance > 1e-4) throw Error(ErrorKind::parameter, "tolerance must lie in (0, 1e-4]");
  if (!(C_V > 0.0) || !(C_U > 0.0)) throw Error(ErrorKind::parameter, "rescaling coefficients must be positive");
  if (dense_limit < 0) throw Error(ErrorKind::parameter, "dense_limit must be non-negative");
  if (!(drift_tolerance > 0.0)) throw Error(ErrorKind::parameter, "drift_tolerance must be positive");
}

SchemeConfig default_scheme_config(Scheme scheme, double dt) {
  SchemeConfig c;
  c.scheme = scheme;
  c.dt = dt;
  c.rescale = scheme == Scheme::ssd1_unsteady || scheme == Scheme::ssd2_unsteady;
  return c;
}

StepState make_step_state(const InterfaceState& iface, const GridSpec& grid) {
  validate_state(iface);
  grid.validate();
  if (iface.size() != grid.N_b) throw Error(ErrorKind::shape_mismatch, "interface length differs from N_b");
  StepState s;
  s.iface = iface;
  s.curve = reconstruct_curve(iface);
  s.fluid = FluidState::zero(grid.N);
  return s;
}

namespace {

// Below this magnitude a first-step field is round-off (e.g. an equilibrium start).
constexpr double kNegligible = 1e-11;

double rescale_ratio(const Eigen::Ref<const Vec>& num, const Eigen::Ref<const Vec>& den, const char* name,
                     bool* disabled) {
  const double d = den.size() ? den.cwiseAbs().maxCoeff() : 0.0;
  const double n = num.size() ? num.cwiseAbs().maxCoeff() : 0.0;
  const double c = n / d;
  if (!(d > kNegligible) || !(n > kNegligible) || !std::isfinite(c)) {
    warn(std::string("rescaling disabled for ") + name + ": degenerate first-step ratio");
    if (disabled) *disabled = true;
    return 1.0;
  }
  return c;
}

}  // namespace

RescalingCoefficients compute_rescaling_coefficients(const Eigen::Ref<const Vec>& V_star_alpha,
                                                     const Eigen::Ref<const Vec>& T_s0,
                                                     const Eigen::Ref<const Vec>& U1,
                                                     const Eigen::Ref<const Vec>& S_U_theta0) {
  RescalingCoefficients r;
  r.C_V = rescale_ratio(V_star_alpha, T_s0, "C_V", &r.V_disabled);
  r.C_U = rescale_ratio(U1, S_U_theta0, "C_U", &r.U_disabled);
  return r;
}

namespace {

// -- spectral helpers -------------------------------------------------------

Vec D(const Vec& f, double L_b) { return spectral_derivative_1d(f, 1, L_b); }

Vec abs_wavenumbers(Eigen::Index n, double L_b) { return wavenumbers(n, L_b).cwiseAbs(); }

/// Applies the real per-slot multiplier m to f.
Vec apply_multiplier(const Vec& f, const Vec& m) { return inverse_1d(scale_spectrum(forward_1d(f), m)); }

/// Dense matrix of a translation-invariant operator with a real even symbol given per FFT slot.
DenseMatrix circulant(const Vec& symbol_per_slot) {
  const Eigen::Index n = symbol_per_slot.size();
  const Vec kernel = inverse_1d(symbol_per_slot.cast<Complex>()) / static_cast<double>(n);
  DenseMatrix A(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index m = 0; m < n; ++m) A(j, m) = kernel(((j - m) % n + n) % n);
  }
  return A;
}

DenseMatrix derivative_matrix(Eigen::Index n, double L_b) {
  DenseMatrix A(n, n);
  Vec e = Vec::Zero(n);
  e(0) = 1.0;
  const Vec col = D(e, L_b);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index m = 0; m < n; ++m) A(j, m) = col(((j - m) % n + n) % n);
  }
  return A;
}

Vec two_thirds(const Vec& f) {
  CVec c = forward_1d(f);
  apply_two_thirds_filter(c);
  return inverse_1d(c);
}

double clamp_nonneg(double v) { return std::max(0.0, v); }

double gamma_of(const Vec& s) { return clamp_nonneg((1.0 - s.array().inverse()).maxCoeff()); }

// -- velocity evaluation ----------------------------------------------------

struct Velocities {
  Vec U;
  Vec V;
  double max_u = 0.0;
};

struct GridVelocity {
  Velocities on_curve;
  FluidState fluid;
};

Velocities project(const NodeVectors& u, const Frame& fr) {
  Velocities out;
  std::tie(out.U, out.V) = normal_tangential(u, fr);
  return out;
}

double max_speed(const FluidState& f) { return (f.u.array().square() + f.v.array().square()).sqrt().maxCoeff(); }

GridVelocity steady_grid_velocity(const CouplingOperator& op, const NodeVectors& F, const Frame& fr,
                                  const PhysParams& p) {
  auto [fx, fy] = op.spread_vectors(F);
  GridVelocity out;
  out.fluid = steady_stokes_grid_solve(fx, fy, p.mu, op.grid().L, MeanForcePolicy::discard);
  out.on_curve = project(op.interpolate_vectors(out.fluid.u, out.fluid.v), fr);
  out.on_curve.max_u = max_speed(out.fluid);
  return out;
}

GridVelocity unsteady_grid_velocity(const CouplingOperator& op, const FluidState& un, const NodeVectors& F,
                                    const Frame& fr, const PhysParams& p, double dt, bool crank_nicolson = false) {
  auto [fx, fy] = op.spread_vectors(F);
  GridVelocity out;
  out.fluid = crank_nicolson ? crank_nicolson_stokes_step(un, fx, fy, p.rho, p.mu, dt, op.grid().L)
                             : unsteady_stokes_step(un, fx, fy, p.rho, p.mu, dt, op.grid().L);
  out.on_curve = project(op.interpolate_vectors(out.fluid.u, out.fluid.v), fr);
  out.on_curve.max_u = max_speed(out.fluid);
  return out;
}

Velocities interpolate_average(const CouplingOperator& op, const FluidState& a, const FluidState& b,
                               const Frame& fr) {
  const Grid u = 0.5 * (a.u + b.u);
  const Grid v = 0.5 * (a.v + b.v);
  return project(op.interpolate_vectors(u, v), fr);
}

/// Steady velocity for the steady schemes, by grid or boundary integral.
Velocities steady_velocity(const InterfaceState& iface, const CurveSamples& curve,
                           const GridSpec& g, const PhysParams& p, const SchemeConfig& c) {
  const Frame fr = tangent_normal(iface);
  const NodeVectors F = elastic_force(iface.s_alpha, iface.theta_alpha(), fr, p.S_b, iface.L_b);
  if (c.steady_velocity == SteadyVelocity::boundary_integral) {
    Velocities v = project(steady_velocity_on_interface(curve, F, p.mu, iface.L_b), fr);
    v.max_u = (v.U.array().square() + v.V.array().square()).sqrt().maxCoeff();
    return v;
  }
  return steady_grid_velocity(CouplingOperator(curve, g), F, fr, p).on_curve;
}

// -- bookkeeping ------------------------------------------------------------

void require_compatible(const StepState& st, const GridSpec& g, const PhysParams& p, const SchemeConfig& c,
                        bool unsteady) {
  c.validate();
  p.validate();
  g.validate();
  validate_state(st.iface);
  if (st.iface.size() != g.N_b) throw Error(ErrorKind::shape_mismatch, "interface length differs from N_b");
  if (std::abs(st.iface.L_b - g.L_b) > 1e-12 * g.L_b) {
    throw Error(ErrorKind::shape_mismatch, "interface L_b differs from the grid L_b");
  }
  if (unsteady && (st.fluid.u.rows() != g.N || st.fluid.u.cols() != g.N || st.fluid.v.rows() != g.N ||
                   st.fluid.v.cols() != g.N)) {
    throw Error(ErrorKind::shape_mismatch, "fluid state does not match the grid");
  }
}

bool finite_state(const StepState& s) {
  return s.iface.s_alpha.allFinite() && s.iface.phi.allFinite() && s.curve.x.allFinite() && s.curve.y.allFinite() &&
         s.fluid.u.allFinite() && s.fluid.v.allFinite() && std::isfinite(s.max_u);
}

/// Filters, rebuilds the curve, resynchronizes the reference points with the
/// averaged curve and checks the result.
StepState finish(const StepState& old, InterfaceState next, FluidState fluid, double max_u, const SchemeConfig& c) {
  StepState out;
  out.step = old.step + 1;
  out.t = old.t + c.dt;
  out.max_u = max_u;
  out.fluid = std::move(fluid);
  if (c.two_thirds_filter) {
    next.s_alpha = two_thirds(next.s_alpha);
    next.phi = two_thirds(next.phi);
  }
  const auto bad = [&](const char* what) { return BlowupError(out.step, what); };
  if (!next.s_alpha.allFinite() || !next.phi.allFinite() || !next.ref.start.allFinite() ||
      !next.ref.half.allFinite()) {
    throw bad("non-finite interface state");
  }
  if (!(next.s_alpha.minCoeff() > 0.0)) throw bad("s_alpha lost positivity");
  out.curve = reconstruct_curve(next, c.drift_tolerance);
  const Eigen::Index h = next.size() / 2;
  next.ref.start = Vec2(out.curve.x(0), out.curve.y(0));
  next.ref.half = Vec2(out.curve.x(h), out.curve.y(h));
  out.iface = std::move(next);
  if (!finite_state(out)) throw bad("non-finite state");
  return out;
}

InterfaceState with(const InterfaceState& base, Vec s_alpha, Vec phi, RefPoints ref) {
  InterfaceState out = base;
  out.s_alpha = std::move(s_alpha);
  out.phi = std::move(phi);
  out.ref = ref;
  return out;
}

// -- affine solves for the stable schemes ----------------------------------

/// Solves x / dt - (M(x) - M(0)) = x_old / dt + M(0) for an affine map M.
Vec solve_affine_step(const LinearMap& M, const Vec& x_old, double dt, const SchemeConfig& c) {
  const Eigen::Index n = x_old.size();
  const Vec m0 = M(Vec::Zero(n));
  const LinearMap A = [&](const Vec& x) -> Vec { return x / dt - (M(x) - m0); };
  const Vec b = x_old / dt + m0;
  if (n <= c.dense_limit) return dense_solve(probe_matrix(A, n), b);
  GmresOptions opts;
  opts.tolerance = c.tolerance;
  opts.max_iterations = 10 * static_cast<long>(n);
  return gmres(A, b, x_old, opts);
}

// -- steady schemes ---------------------------------------------------------

struct ExplicitParts {
  Velocities vel;
  Vec theta_alpha;
};

ExplicitParts explicit_parts(const StepState& st, const GridSpec& g, const PhysParams& p, const SchemeConfig& c) {
  ExplicitParts e;
  e.vel = steady_velocity(st.iface, st.curve, g, p, c);
  e.theta_alpha = st.iface.theta_alpha();
  return e;
}

/// S_U: the theta symbol without its outer derivative, applied to phi.
Vec leading_U(const Vec& phi, const Vec& S, double L_b) {
  const Eigen::Index n = phi.size();
  const Vec k = wavenumbers(n, L_b);
  CVec c = forward_1d(phi);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto w = wavenumber(j, n);
    c(j) = (w == 0 || w == n / 2) ? Complex(0.0) : c(j) * S(j) / Complex(0.0, k(j));
  }
  return inverse_1d(c);
}

/// Per-mode decay rates of the steady leading terms, (S_b/4mu)|xi| for s_alpha and
/// gamma times that for phi, each scaled by its rescaling coefficient.
struct SteadyLeading {
  Vec s_rate;
  Vec phi_rate;
};

SteadyLeading steady_leading(const InterfaceState& in, const ExplicitParts& e, const PhysParams& p, SchemeConfig& c) {
  const Vec eta = (p.S_b / (4.0 * p.mu)) * abs_wavenumbers(in.size(), in.L_b);
  const double gamma = gamma_of(in.s_alpha);
  if (c.rescale && !c.rescale_ready) {
    const RescalingCoefficients rc =
        compute_rescaling_coefficients(D(e.vel.V, in.L_b), apply_multiplier(in.s_alpha, -eta), e.vel.U,
                                       leading_U(in.phi, -gamma * eta, in.L_b));
    c.C_V = rc.C_V;
    c.C_U = rc.C_U;
    c.rescale_ready = true;
  }
  SteadyLeading out;
  out.s_rate = (c.rescale ? c.C_V : 1.0) * eta;
  out.phi_rate = (c.rescale ? c.C_U : 1.0) * gamma * eta;
  return out;
}

}  // namespace

StepState step_explicit_steady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, false);
  const Velocities v = steady_velocity(st.iface, st.curve, g, p, c);
  const ShapeRates r = evolve_salpha_theta_rhs(st.iface, v.U, v.V);
  InterfaceState next = with(st.iface, st.iface.s_alpha + c.dt * r.ds_alpha, st.iface.phi + c.dt * r.dtheta,
                             update_reference_points(st.iface, v.U, v.V, c.dt));
  return finish(st, std::move(next), st.fluid, v.max_u, c);
}

StepState step_ssd1_steady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, false);
  const InterfaceState& in = st.iface;
  const double dt = c.dt;
  const ExplicitParts e = explicit_parts(st, g, p, c);
  const SteadyLeading lead = steady_leading(in, e, p, c);

  const Vec R = D(e.vel.V, in.L_b) - e.theta_alpha.cwiseProduct(e.vel.U);
  const Vec s_next = in.s_alpha + dt * apply_multiplier(R, (1.0 + dt * lead.s_rate.array()).inverse().matrix());
  if (!(s_next.minCoeff() > 0.0)) throw BlowupError(st.step + 1, "s_alpha lost positivity");
  const Vec Q = (D(e.vel.U, in.L_b) + e.vel.V.cwiseProduct(e.theta_alpha)).cwiseQuotient(s_next);
  const Vec phi_next = in.phi + dt * apply_multiplier(Q, (1.0 + dt * lead.phi_rate.array()).inverse().matrix());

  InterfaceState next = with(in, s_next, phi_next, update_reference_points(in, e.vel.U, e.vel.V, dt));
  return finish(st, std::move(next), st.fluid, e.vel.max_u, c);
}

StepState step_ssd2_steady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, false);
  const InterfaceState& in = st.iface;
  const Eigen::Index n = in.size();
  const double dt = c.dt;
  const ExplicitParts e = explicit_parts(st, g, p, c);
  const Vec ak = abs_wavenumbers(n, in.L_b);
  const SteadyLeading lead = steady_leading(in, e, p, c);

  // Periodic log kernel -ln|2 sin(pi(a - a')/L_b)| has symbol pi / |xi|.
  Vec log_symbol(n);
  for (Eigen::Index j = 0; j < n; ++j) log_symbol(j) = ak(j) > 0.0 ? kPi / ak(j) : 0.0;
  const DenseMatrix K = circulant(log_symbol);
  const DenseMatrix I = DenseMatrix::Identity(n, n);
  const auto Th = e.theta_alpha.asDiagonal();

  const double cst = p.S_b / (4.0 * kPi * p.mu);
  const DenseMatrix As = I / dt + circulant(lead.s_rate) + cst * (Th * K * Th);
  const Vec R = D(e.vel.V, in.L_b) - e.theta_alpha.cwiseProduct(e.vel.U);
  const Vec s_next = in.s_alpha + dense_solve(As, R);
  if (!(s_next.minCoeff() > 0.0)) throw BlowupError(st.step + 1, "s_alpha lost positivity");

  const Vec v_over_s = e.vel.V.cwiseQuotient(s_next);
  const DenseMatrix Ap = I / dt + circulant(lead.phi_rate) - v_over_s.asDiagonal() * derivative_matrix(n, in.L_b);
  const Vec Q = (D(e.vel.U, in.L_b) + e.vel.V.cwiseProduct(e.theta_alpha)).cwiseQuotient(s_next);
  const Vec phi_next = in.phi + dense_solve(Ap, Q);

  InterfaceState next = with(in, s_next, phi_next, update_reference_points(in, e.vel.U, e.vel.V, dt));
  return finish(st, std::move(next), st.fluid, e.vel.max_u, c);
}

StepState step_ifrk4_steady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, false);
  const InterfaceState& in = st.iface;
  const Eigen::Index n = in.size();
  const Eigen::Index h = n / 2;
  const bool need_velocity = c.rescale && !c.rescale_ready;
  const SteadyLeading lead = steady_leading(in, need_velocity ? explicit_parts(st, g, p, c) : ExplicitParts{}, p, c);

  // Unknowns: s_hat (n), phi_hat (n), reference points (4, no linear part).
  Vec rates = Vec::Zero(2 * n + 4);
  rates.head(n) = lead.s_rate;
  rates.segment(n, n) = lead.phi_rate;

  CVec y(2 * n + 4);
  y.head(n) = forward_1d(in.s_alpha);
  y.segment(n, n) = forward_1d(in.phi);
  y.tail(4) << in.ref.start.x(), in.ref.start.y(), in.ref.half.x(), in.ref.half.y();

  const auto unpack = [&](const CVec& z) {
    InterfaceState s = in;
    s.s_alpha = inverse_1d(z.head(n));
    s.phi = inverse_1d(z.segment(n, n));
    s.ref.start = Vec2(z(2 * n).real(), z(2 * n + 1).real());
    s.ref.half = Vec2(z(2 * n + 2).real(), z(2 * n + 3).real());
    return s;
  };

  double max_u = 0.0;
  const auto N = [&](const CVec& z) -> CVec {
    const InterfaceState s = unpack(z);
    if (!s.s_alpha.allFinite() || !(s.s_alpha.minCoeff() > 0.0)) {
      throw BlowupError(st.step + 1, "stage s_alpha lost positivity");
    }
    const CurveSamples curve = reconstruct_curve(s, std::numeric_limits<double>::infinity());
    const Velocities v = steady_velocity(s, curve, g, p, c);
    max_u = v.max_u;
    const ShapeRates r = evolve_salpha_theta_rhs(s, v.U, v.V);
    CVec out(2 * n + 4);
    out.head(n) = forward_1d(r.ds_alpha) + lead.s_rate.cast<Complex>().cwiseProduct(z.head(n));
    out.segment(n, n) = forward_1d(r.dtheta) + lead.phi_rate.cast<Complex>().cwiseProduct(z.segment(n, n));
    const Vec th = s.theta();
    const Vec2 v0 = node_velocity(th(0), v.U(0), v.V(0));
    const Vec2 vh = node_velocity(th(h), v.U(h), v.V(h));
    out.tail(4) << v0.x(), v0.y(), vh.x(), vh.y();
    return out;
  };

  const CVec y1 = lawson_rk4_step(y, rates, c.dt, N);
  return finish(st, unpack(y1), st.fluid, max_u, c);
}

StepState step_stable_steady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, false);
  const InterfaceState& in = st.iface;
  const Frame fr = tangent_normal(in);
  const Vec ta = in.theta_alpha();
  const CouplingOperator op(st.curve, g);
  const double L_b = in.L_b;

  // Step 1: s^{n+1} with the force F(s^{n+1}, theta^n).
  const LinearMap Ms = [&](const Vec& s) -> Vec {
    const Velocities v = steady_grid_velocity(op, elastic_force(s, ta, fr, p.S_b, L_b), fr, p).on_curve;
    return D(v.V, L_b) - ta.cwiseProduct(v.U);
  };
  const Vec s_next = solve_affine_step(Ms, in.s_alpha, c.dt, c);
  if (!(s_next.minCoeff() > 0.0)) throw BlowupError(st.step + 1, "s_alpha lost positivity");
  const GridVelocity v1 = steady_grid_velocity(op, elastic_force(s_next, ta, fr, p.S_b, L_b), fr, p);

  // Step 2: theta^{n+1} with the force F(s^{n+1}, theta^{n+1}) in the frame of step n.
  const LinearMap Mt = [&](const Vec& phi) -> Vec {
    const Vec ta_new = (D(phi, L_b).array() + kTwoPi / L_b).matrix();
    const Velocities v = steady_grid_velocity(op, elastic_force(s_next, ta_new, fr, p.S_b, L_b), fr, p).on_curve;
    return (D(v.U, L_b) + ta.cwiseProduct(v.V)).cwiseQuotient(s_next);
  };
  const Vec phi_next = solve_affine_step(Mt, in.phi, c.dt, c);

  InterfaceState next =
      with(in, s_next, phi_next, update_reference_points(in, v1.on_curve.U, v1.on_curve.V, c.dt));
  return finish(st, std::move(next), st.fluid, v1.on_curve.max_u, c);
}

// -- unsteady schemes -------------------------------------------------------

StepState step_explicit_unsteady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, true);
  const InterfaceState& in = st.iface;
  const Frame fr = tangent_normal(in);
  const CouplingOperator op(st.curve, g);
  const GridVelocity v = unsteady_grid_velocity(op, st.fluid, elastic_force(in, p.S_b), fr, p, c.dt);
  const ShapeRates r = evolve_salpha_theta_rhs(in, v.on_curve.U, v.on_curve.V);
  InterfaceState next = with(in, in.s_alpha + c.dt * r.ds_alpha, in.phi + c.dt * r.dtheta,
                             update_reference_points(in, v.on_curve.U, v.on_curve.V, c.dt));
  return finish(st, std::move(next), v.fluid, v.on_curve.max_u, c);
}

namespace {

SsdSymbolParams symbol_params(const PhysParams& p, double dt, const Vec& s_alpha) {
  SsdSymbolParams sp = make_ssd_params(p.S_b, p.mu, p.rho, dt, s_alpha);
  sp.s_max_excess = clamp_nonneg(sp.s_max_excess);
  sp.gamma = clamp_nonneg(sp.gamma);
  return sp;
}

Vec symbol_T(const SsdSymbolParams& sp, Eigen::Index n, double L_b) {
  const Vec k = wavenumbers(n, L_b);
  Vec out(n);
  for (Eigen::Index j = 0; j < n; ++j) out(j) = ssd_symbol_T(k(j), sp);
  return out;
}

Vec symbol_S(const SsdSymbolParams& sp, Eigen::Index n, double L_b) {
  const Vec k = wavenumbers(n, L_b);
  Vec out(n);
  for (Eigen::Index j = 0; j < n; ++j) out(j) = ssd_symbol_S(k(j), sp);
  return out;
}


/// Dense matrix of -(S_b dt / 2 rho) diag(theta_a / s^2) (K0 + ln) d^2 diag(theta_a), where row j
/// uses beta_j = lambda s_j and the regular kernel K0(beta r) + ln r acts through its symbol
/// pi (1/sqrt(beta^2 + xi^2) - 1/|xi|).
DenseMatrix low_frequency_unsteady(const Vec& s, const Vec& theta_a, const PhysParams& p, double dt, double L_b) {
  const Eigen::Index n = s.size();
  const Vec xi = wavenumbers(n, L_b);
  const double lambda = std::sqrt(p.rho / (p.mu * dt));
  DenseMatrix A(n, n);
  CVec sym(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double beta = lambda * s(j);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double a = std::abs(xi(k));
      // xi^2 pi (1/|xi| - 1/root) = pi |xi| beta^2 / (root (root + |xi|)), no cancellation.
      const double root = std::sqrt(beta * beta + a * a);
      sym(k) = a > 0.0 ? kPi * a * beta * beta / (root * (root + a)) : 0.0;
    }
    const Vec kernel = inverse_1d(sym) / static_cast<double>(n);
    const double pre = -(p.S_b * dt / (2.0 * kPi * p.rho)) * theta_a(j) / (s(j) * s(j));
    for (Eigen::Index m = 0; m < n; ++m) A(j, m) = pre * kernel(((j - m) % n + n) % n) * theta_a(m);
  }
  return A;
}

struct SsdStage {
  Vec s_next;
  GridVelocity v_next;  // velocity from the force F(s^{n+1}, theta^n)
};

/// First half of the SSD unsteady step: the s_alpha solve and the implicit fluid solve.
SsdStage ssd_unsteady_s(const StepState& st, const CouplingOperator& op, const Frame& fr, const Vec& ta,
                        const PhysParams& p, SchemeConfig& c, bool second_kind, Vec& T_sym, double& C_V_used) {
  const InterfaceState& in = st.iface;
  const Eigen::Index n = in.size();
  const double dt = c.dt;
  const GridVelocity star = unsteady_grid_velocity(op, st.fluid, elastic_force(in, p.S_b), fr, p, dt);
  const Vec Va = D(star.on_curve.V, in.L_b);
  const Vec R = Va - ta.cwiseProduct(star.on_curve.U);

  const SsdSymbolParams sp = symbol_params(p, dt, in.s_alpha);
  T_sym = symbol_T(sp, n, in.L_b);
  if (c.rescale && !c.rescale_ready) {
    c.C_V = rescale_ratio(Va, apply_multiplier(in.s_alpha, T_sym), "C_V", nullptr);
  }
  C_V_used = c.rescale ? c.C_V : 1.0;

  SsdStage out;
  if (second_kind) {
    const DenseMatrix A = DenseMatrix::Identity(n, n) / dt - C_V_used * circulant(T_sym) -
                          C_V_used * low_frequency_unsteady(in.s_alpha, ta, p, dt, in.L_b);
    out.s_next = in.s_alpha + dense_solve(A, R);
  } else {
    out.s_next = in.s_alpha + apply_multiplier(R, (1.0 / dt - C_V_used * T_sym.array()).inverse().matrix());
  }
  if (!(out.s_next.minCoeff() > 0.0)) throw BlowupError(st.step + 1, "s_alpha lost positivity");
  out.v_next = unsteady_grid_velocity(op, st.fluid, elastic_force(out.s_next, ta, fr, p.S_b, in.L_b), fr, p, dt);
  return out;
}

StepState ssd_unsteady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c,
                       bool second_kind) {
  require_compatible(st, g, p, c, true);
  const InterfaceState& in = st.iface;
  const Eigen::Index n = in.size();
  const double dt = c.dt;
  const Frame fr = tangent_normal(in);
  const Vec ta = in.theta_alpha();
  const CouplingOperator op(st.curve, g);

  Vec T_sym;
  double C_V = 1.0;
  const bool first_rescale = c.rescale && !c.rescale_ready;
  const SsdStage s1 = ssd_unsteady_s(st, op, fr, ta, p, c, second_kind, T_sym, C_V);
  const Velocities& v = s1.v_next.on_curve;

  const Vec S_sym = symbol_S(symbol_params(p, dt, in.s_alpha), n, in.L_b);
  if (first_rescale) {
    c.C_U = rescale_ratio(v.U, leading_U(in.phi, S_sym, in.L_b), "C_U", nullptr);
    c.rescale_ready = true;
  }
  const double C_U = c.rescale ? c.C_U : 1.0;
  const double s_min = s1.s_next.minCoeff();

  const Vec Q = (D(v.U, in.L_b) + ta.cwiseProduct(v.V)).cwiseQuotient(s1.s_next);
  Vec phi_next;
  if (second_kind) {
    const DenseMatrix A = DenseMatrix::Identity(n, n) / dt - (C_U / s_min) * circulant(S_sym) -
                          v.V.cwiseQuotient(s1.s_next).asDiagonal() * derivative_matrix(n, in.L_b);
    phi_next = in.phi + dense_solve(A, Q);
  } else {
    phi_next = in.phi + apply_multiplier(Q, (1.0 / dt - (C_U / s_min) * S_sym.array()).inverse().matrix());
  }

  InterfaceState next = with(in, s1.s_next, phi_next, update_reference_points(in, v.U, v.V, dt));
  return finish(st, std::move(next), s1.v_next.fluid, v.max_u, c);
}

}  // namespace

StepState step_ssd1_unsteady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  return ssd_unsteady(st, g, p, c, false);
}

StepState step_ssd2_unsteady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  return ssd_unsteady(st, g, p, c, true);
}

StepState step_stable_unsteady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, true);
  const InterfaceState& in = st.iface;
  const Frame fr = tangent_normal(in);
  const Vec ta = in.theta_alpha();
  const CouplingOperator op(st.curve, g);
  const double L_b = in.L_b;
  const double dt = c.dt;

  const LinearMap Ms = [&](const Vec& s) -> Vec {
    const Velocities v =
        unsteady_grid_velocity(op, st.fluid, elastic_force(s, ta, fr, p.S_b, L_b), fr, p, dt).on_curve;
    return D(v.V, L_b) - ta.cwiseProduct(v.U);
  };
  const Vec s_next = solve_affine_step(Ms, in.s_alpha, dt, c);
  if (!(s_next.minCoeff() > 0.0)) throw BlowupError(st.step + 1, "s_alpha lost positivity");
  const GridVelocity v1 =
      unsteady_grid_velocity(op, st.fluid, elastic_force(s_next, ta, fr, p.S_b, L_b), fr, p, dt);

  const LinearMap Mt = [&](const Vec& phi) -> Vec {
    const Vec ta_new = (D(phi, L_b).array() + kTwoPi / L_b).matrix();
    const Velocities v =
        unsteady_grid_velocity(op, st.fluid, elastic_force(s_next, ta_new, fr, p.S_b, L_b), fr, p, dt).on_curve;
    return (D(v.U, L_b) + ta.cwiseProduct(v.V)).cwiseQuotient(s_next);
  };
  const Vec phi_next = solve_affine_step(Mt, in.phi, dt, c);

  InterfaceState next =
      with(in, s_next, phi_next, update_reference_points(in, v1.on_curve.U, v1.on_curve.V, dt));
  return finish(st, std::move(next), v1.fluid, v1.on_curve.max_u, c);
}

namespace {

/// Midpoint data shared by the second-order schemes: the half-step state and
/// its frame, coupling operator and curvature.
struct Midpoint {
  StepState half;
  Frame frame;
  Vec theta_alpha;
  CouplingOperator op;
};

Midpoint midpoint(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c, bool semi_implicit) {
  SchemeConfig hc = c;
  hc.dt = 0.5 * c.dt;
  hc.drift_tolerance = std::numeric_limits<double>::infinity();
  StepState half = semi_implicit ? step_ssd1_unsteady(st, g, p, hc) : step_explicit_unsteady(st, g, p, hc);
  c.C_V = hc.C_V;
  c.C_U = hc.C_U;
  c.rescale_ready = hc.rescale_ready;
  Frame fr = tangent_normal(half.iface);
  Vec ta = half.iface.theta_alpha();
  CouplingOperator op(half.curve, g);
  return Midpoint{std::move(half), std::move(fr), std::move(ta), std::move(op)};
}

/// Moves the reference points of step n with velocities sampled at the midpoint.
RefPoints midpoint_references(const InterfaceState& start, const InterfaceState& half, const Velocities& v,
                              double dt) {
  InterfaceState anchor = half;
  anchor.ref = start.ref;
  return update_reference_points(anchor, v.U, v.V, dt);
}

}  // namespace

StepState step_second_order_unsteady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, true);
  const InterfaceState& in = st.iface;
  const Eigen::Index n = in.size();
  const double dt = c.dt;
  const double L_b = in.L_b;
  const Midpoint m = midpoint(st, g, p, c, true);
  const InterfaceState& hs = m.half.iface;

  // Explicit-force trapezoidal fluid step for the correction terms.
  const GridVelocity star = unsteady_grid_velocity(m.op, st.fluid, elastic_force(hs, p.S_b), m.frame, p, dt, true);
  const Velocities vs = interpolate_average(m.op, star.fluid, st.fluid, m.frame);
  const Vec R = D(vs.V, L_b) - m.theta_alpha.cwiseProduct(vs.U);

  const SsdSymbolParams sp = symbol_params(p, dt, hs.s_alpha);
  const Vec xi = wavenumbers(n, L_b);
  Vec T(n), S(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const SsdSymbolPair pair = ssd_symbol_second_order(xi(j), sp);
    T(j) = pair.T;
    S(j) = pair.S;
  }
  const double C_V = c.rescale ? c.C_V : 1.0;
  const double C_U = c.rescale ? c.C_U : 1.0;

  // (s1 - s0)/dt = C T (s1 + s0)/2 + R - C T s_half
  const CVec s0 = forward_1d(in.s_alpha);
  const CVec sh = forward_1d(hs.s_alpha);
  const CVec Rh = forward_1d(R);
  CVec s1(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double ct = C_V * T(j);
    s1(j) = (s0(j) * (1.0 / dt + 0.5 * ct) + Rh(j) - ct * sh(j)) / (1.0 / dt - 0.5 * ct);
  }
  const Vec s_next = inverse_1d(s1);
  if (!(s_next.minCoeff() > 0.0)) throw BlowupError(st.step + 1, "s_alpha lost positivity");
  const Vec s_bar = 0.5 * (s_next + in.s_alpha);

  const GridVelocity full = unsteady_grid_velocity(
      m.op, st.fluid, elastic_force(s_bar, m.theta_alpha, m.frame, p.S_b, L_b), m.frame, p, dt, true);
  const Velocities vb = interpolate_average(m.op, full.fluid, st.fluid, m.frame);

  // (p1 - p0)/dt = C S (p1 + p0)/2 + Q - C S p_half
  const Vec Qs = (D(vb.U, L_b) + m.theta_alpha.cwiseProduct(vb.V)).cwiseQuotient(hs.s_alpha);
  const CVec p0 = forward_1d(in.phi);
  const CVec ph = forward_1d(hs.phi);
  const CVec Qh = forward_1d(Qs);
  CVec p1(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cs = C_U * S(j);
    p1(j) = (p0(j) * (1.0 / dt + 0.5 * cs) + Qh(j) - cs * ph(j)) / (1.0 / dt - 0.5 * cs);
  }

  InterfaceState next = with(in, s_next, inverse_1d(p1), midpoint_references(in, hs, vb, dt));
  return finish(st, std::move(next), full.fluid, max_speed(full.fluid), c);
}

StepState step_explicit2_unsteady(const StepState& st, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  require_compatible(st, g, p, c, true);
  const InterfaceState& in = st.iface;
  const double dt = c.dt;
  const Midpoint m = midpoint(st, g, p, c, false);
  const InterfaceState& hs = m.half.iface;
  const GridVelocity full = unsteady_grid_velocity(m.op, st.fluid, elastic_force(hs, p.S_b), m.frame, p, dt, true);
  const Velocities vb = interpolate_average(m.op, full.fluid, st.fluid, m.frame);
  const ShapeRates r = evolve_salpha_theta_rhs(hs, vb.U, vb.V);
  InterfaceState next = with(in, in.s_alpha + dt * r.ds_alpha, in.phi + dt * r.dtheta,
                             midpoint_references(in, hs, vb, dt));
  return finish(st, std::move(next), full.fluid, max_speed(full.fluid), c);
}

StepState advance(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c) {
  switch (c.scheme) {
    case Scheme::explicit_steady: return step_explicit_steady(s, g, p, c);
    case Scheme::ssd1_steady: return step_ssd1_steady(s, g, p, c);
    case Scheme::ssd2_steady: return step_ssd2_steady(s, g, p, c);
    case Scheme::ifrk4_steady: return step_ifrk4_steady(s, g, p, c);
    case Scheme::stable_steady: return step_stable_steady(s, g, p, c);
    case Scheme::explicit_unsteady: return step_explicit_unsteady(s, g, p, c);
    case Scheme::ssd1_unsteady: return step_ssd1_unsteady(s, g, p, c);
    case Scheme::ssd2_unsteady: return step_ssd2_unsteady(s, g, p, c);
    case Scheme::stable_unsteady: return step_stable_unsteady(s, g, p, c);
    case Scheme::second_order_unsteady: return step_second_order_unsteady(s, g, p, c);
    case Scheme::explicit2_unsteady: return step_explicit2_unsteady(s, g, p, c);
  }
  throw Error(ErrorKind::usage, "unknown scheme");
}

}  // namespace ibssd
