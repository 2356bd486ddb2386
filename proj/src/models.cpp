#include "hamport/models.hpp"

#include <cmath>

namespace hamport {

namespace {

// Sampled coefficient bounds with a small relative pad, used as the declared
// density bounds for coefficient-function models.
std::pair<double, double> sampled_bounds(
    const std::vector<CoefficientFn>& entries, double a, double b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const int samples = 2000;
  for (int s = 0; s <= samples; ++s) {
    const double zeta = a + (b - a) * s / samples;
    for (const auto& f : entries) {
      const double v = f(zeta);
      if (!(v > 0.0))
        throw model_error("model: coefficient function must be positive");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo * (1.0 - 1e-9), hi * (1.0 + 1e-9)};
}

}  // namespace

PortHamiltonianSystem vibrating_string(CoefficientFn rho, CoefficientFn T,
                                       double a, double b) {
  PortHamiltonianSystem sys;
  sys.order = 1;
  sys.m = 2;
  sys.a = a;
  sys.b = b;
  sys.P.resize(2);
  sys.P[0] = Mat::Zero(2, 2);
  sys.P[1] = (Mat(2, 2) << 0, 1, 1, 0).finished();

  std::vector<CoefficientFn> entries = {
      [rho](double z) { return 1.0 / rho(z); }, T};
  const auto [lo, hi] = sampled_bounds(entries, a, b);
  sys.density = EnergyDensity::diagonal(entries, lo, hi);

  // Trace ordering z = (Hx)(b) then (Hx)(a) with Hx = (w_t, T w_zeta).
  // Clamped at a: w_t(a) = 0 selects z_3; input = force at b selects z_2;
  // output = velocity at b selects z_1.
  sys.Wb1 = (Mat(1, 4) << 0, 0, 1, 0).finished();
  sys.Wb2 = (Mat(1, 4) << 0, 1, 0, 0).finished();
  sys.Wc = (Mat(1, 4) << 1, 0, 0, 0).finished();
  sys.validate();
  return sys;
}

PortHamiltonianSystem vibrating_string(double rho, double T, double a,
                                       double b) {
  require(rho > 0 && T > 0, "string: rho and T must be positive");
  return vibrating_string([rho](double) { return rho; },
                          [T](double) { return T; }, a, b);
}

PortHamiltonianSystem timoshenko_beam(CoefficientFn rho, CoefficientFn EI,
                                      CoefficientFn Ir, CoefficientFn K_shear,
                                      double a, double b) {
  PortHamiltonianSystem sys;
  sys.order = 1;
  sys.m = 4;
  sys.a = a;
  sys.b = b;
  sys.P.resize(2);
  sys.P[1] = (Mat(4, 4) << 0, 1, 0, 0,  //
              1, 0, 0, 0,               //
              0, 0, 0, 1,               //
              0, 0, 1, 0)
                 .finished();
  sys.P[0] = (Mat(4, 4) << 0, 0, 0, -1,  //
              0, 0, 0, 0,                //
              0, 0, 0, 0,                //
              1, 0, 0, 0)
                 .finished();

  std::vector<CoefficientFn> entries = {
      K_shear, [rho](double z) { return 1.0 / rho(z); }, EI,
      [Ir](double z) { return 1.0 / Ir(z); }};
  const auto [lo, hi] = sampled_bounds(entries, a, b);
  sys.density = EnergyDensity::diagonal(entries, lo, hi);

  // Hx = (K(w_zeta - phi), w_t, EI phi_zeta, phi_t); trace is the b block
  // (z_1..z_4) then the a block (z_5..z_8). Clamped at a: w_t(a) = 0 and
  // phi_t(a) = 0 (z_6, z_8). Inputs: force then moment at b (z_1, z_3).
  // Outputs: velocity then angular velocity at b (z_2, z_4).
  sys.Wb1 = Mat::Zero(2, 8);
  sys.Wb1(0, 5) = 1;
  sys.Wb1(1, 7) = 1;
  sys.Wb2 = Mat::Zero(2, 8);
  sys.Wb2(0, 0) = 1;
  sys.Wb2(1, 2) = 1;
  sys.Wc = Mat::Zero(2, 8);
  sys.Wc(0, 1) = 1;
  sys.Wc(1, 3) = 1;
  sys.validate();
  return sys;
}

PortHamiltonianSystem timoshenko_beam(double rho, double EI, double Ir,
                                      double K_shear, double a, double b) {
  require(rho > 0 && EI > 0 && Ir > 0 && K_shear > 0,
          "beam: coefficients must be positive");
  return timoshenko_beam([rho](double) { return rho; },
                         [EI](double) { return EI; },
                         [Ir](double) { return Ir; },
                         [K_shear](double) { return K_shear; }, a, b);
}

ManufacturedSolution string_manufactured_polynomial(double rho, double T) {
  // w(t, zeta) = (1 + t + t^2/2)(zeta^3 - zeta) -- polynomial, exact
  // derivatives throughout.
  ManufacturedSolution mms;
  mms.name = "string polynomial";
  auto f = [](double t) { return 1.0 + t + 0.5 * t * t; };
  auto fd = [](double t) { return 1.0 + t; };
  auto gz = [](double z) { return z * z * z - z; };
  auto gzz = [](double z) { return 3.0 * z * z - 1.0; };
  auto gzzz = [](double z) { return 6.0 * z; };
  mms.state = [=](double t, double z) {
    Vec x(2);
    x << rho * fd(t) * gz(z), f(t) * gzz(z);
    return x;
  };
  mms.state_time_derivative = [=](double t, double z) {
    // First row from the displayed equation rho w_tt = d(T w_z);
    // second row is the compatibility identity d_t w_z = d_z w_t.
    Vec xt(2);
    xt << T * f(t) * gzzz(z), fd(t) * gzz(z);
    return xt;
  };
  mms.flux_derivative = [=](double t, double z) {
    // d/dz of Hx = (w_t, T w_z)
    Vec dz(2);
    dz << fd(t) * gzz(z), T * f(t) * gzzz(z);
    return dz;
  };
  return mms;
}

ManufacturedSolution string_manufactured_wave() {
  // Classical separated solution w = sin(pi z) cos(pi t) for rho = T = 1.
  ManufacturedSolution mms;
  mms.name = "string wave";
  const double pi = M_PI;
  mms.state = [=](double t, double z) {
    Vec x(2);
    x << -pi * std::sin(pi * z) * std::sin(pi * t),
        pi * std::cos(pi * z) * std::cos(pi * t);
    return x;
  };
  mms.state_time_derivative = [=](double t, double z) {
    Vec xt(2);
    xt << -pi * pi * std::sin(pi * z) * std::cos(pi * t),
        -pi * pi * std::cos(pi * z) * std::sin(pi * t);
    return xt;
  };
  mms.flux_derivative = [=](double t, double z) {
    Vec dz(2);
    dz << -pi * pi * std::cos(pi * z) * std::sin(pi * t),
        -pi * pi * std::sin(pi * z) * std::cos(pi * t);
    return dz;
  };
  return mms;
}

ManufacturedSolution beam_manufactured_polynomial(double rho, double EI,
                                                  double Ir, double K_shear) {
  // w = (1 + t^2)(z^3 - z), phi = (2 - t)(z^2 + z); arbitrary smooth fields,
  // the first-order realization must match the displayed equations for any
  // (w, phi).
  ManufacturedSolution mms;
  mms.name = "beam polynomial";
  auto w_t = [](double t, double z) { return 2.0 * t * (z * z * z - z); };
  auto w_z = [](double t, double z) {
    return (1.0 + t * t) * (3.0 * z * z - 1.0);
  };
  auto w_tz = [](double t, double z) { return 2.0 * t * (3.0 * z * z - 1.0); };
  auto w_zz = [](double t, double z) { return (1.0 + t * t) * 6.0 * z; };
  auto phi = [](double t, double z) { return (2.0 - t) * (z * z + z); };
  auto phi_t = [](double, double z) { return -(z * z + z); };
  auto phi_z = [](double t, double z) { return (2.0 - t) * (2.0 * z + 1.0); };
  auto phi_tz = [](double, double z) { return -(2.0 * z + 1.0); };
  auto phi_zz = [](double t, double) { return (2.0 - t) * 2.0; };

  mms.state = [=](double t, double z) {
    Vec x(4);
    x << w_z(t, z) - phi(t, z), rho * w_t(t, z), phi_z(t, z),
        Ir * phi_t(t, z);
    return x;
  };
  mms.state_time_derivative = [=](double t, double z) {
    Vec xt(4);
    xt << w_tz(t, z) - phi_t(t, z),
        K_shear * (w_zz(t, z) - phi_z(t, z)),  // rho w_tt per displayed PDE
        phi_tz(t, z),
        EI * phi_zz(t, z) + K_shear * (w_z(t, z) - phi(t, z));
    return xt;
  };
  mms.flux_derivative = [=](double t, double z) {
    Vec dz(4);
    dz << K_shear * (w_zz(t, z) - phi_z(t, z)), w_tz(t, z),
        EI * phi_zz(t, z), phi_tz(t, z);
    return dz;
  };
  return mms;
}

double pde_residual_check(const PortHamiltonianSystem& sys,
                          const ManufacturedSolution& mms, const Grid& g,
                          double t, bool sampled) {
  require(sys.order == 1, "pde_residual_check: first-order systems only");
  const int m = sys.m;
  double worst = 0.0;
  if (!sampled) {
    for (int i = 0; i < g.n; ++i) {
      const double z = g.node(i);
      const Vec x = mms.state(t, z);
      const Vec rhs =
          sys.P[1] * mms.flux_derivative(t, z) + sys.P[0] * (sys.density(z) * x);
      worst = std::max(worst, (rhs - mms.state_time_derivative(t, z))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    return worst;
  }
  // Sampled path: build the grid state, differentiate Hx by central
  // differences (one-sided at the endpoints).
  Vec x(static_cast<Eigen::Index>(m) * g.n);
  for (int i = 0; i < g.n; ++i) x.segment(i * m, m) = mms.state(t, g.node(i));
  const Vec w = apply_density(sys, x, g);
  const double h = g.h();
  for (int i = 0; i < g.n; ++i) {
    Vec dw(m);
    if (i == 0)
      dw = (-1.5 * w.segment(0, m) + 2.0 * w.segment(m, m) -
            0.5 * w.segment(2 * m, m)) /
           h;
    else if (i == g.n - 1)
      dw = (1.5 * w.segment(i * m, m) - 2.0 * w.segment((i - 1) * m, m) +
            0.5 * w.segment((i - 2) * m, m)) /
           h;
    else
      dw = (w.segment((i + 1) * m, m) - w.segment((i - 1) * m, m)) / (2 * h);
    const Vec rhs = sys.P[1] * dw + sys.P[0] * w.segment(i * m, m);
    worst = std::max(worst, (rhs - mms.state_time_derivative(t, g.node(i)))
                                .cwiseAbs()
                                .maxCoeff());
  }
  return worst;
}

namespace {

Mat param_or_identity(const std::optional<Mat>& p, int rows, int cols,
                      const char* what) {
  if (!p) return Mat::Identity(rows, cols);
  require(p->rows() == rows && p->cols() == cols,
          std::string("controller_library: bad shape for ") + what);
  return *p;
}

}  // namespace

Controller controller_library(const std::string& name,
                              const ControllerParams& params) {
  Controller c;
  c.mc = params.mc;
  c.k = params.k;
  c.name = name;
  c.K = param_or_identity(params.K, c.mc, c.mc, "K");
  c.Bc = param_or_identity(params.Bc, c.mc, c.k, "B_c");
  c.Sc = param_or_identity(params.Sc, c.k, c.k, "S_c");
  c.sigma = feedthrough_sigma(c.Sc);

  const Mat Q = param_or_identity(params.Q, c.mc, c.mc, "Q");
  const double alpha = params.quartic;

  const bool quartic = (name == "quartic_pd") || alpha != 0.0;
  const double alpha_eff =
      (name == "quartic_pd" && alpha == 0.0) ? 0.5 : alpha;

  if (name == "linear_pd" || name == "quartic_pd" ||
      name == "saturating_damper_pd") {
    const double a4 = (name == "linear_pd") ? 0.0 : (quartic ? alpha_eff : 0.0);
    c.potential = [Q, a4](const Vec& v) {
      const double n2 = v.squaredNorm();
      return 0.5 * v.dot(Q * v) + a4 * n2 * n2;
    };
    c.potential_grad = [Q, a4](const Vec& v) {
      return Vec(Q * v + 4.0 * a4 * v.squaredNorm() * v);
    };
    c.potential_hess = [Q, a4](const Vec& v) {
      const int n = static_cast<int>(v.size());
      return Mat(Q + 4.0 * a4 * (v.squaredNorm() * Mat::Identity(n, n) +
                                 2.0 * v * v.transpose()));
    };
  } else {
    throw spec_error("controller_library: unknown controller name '" + name +
                     "'");
  }

  if (name == "saturating_damper_pd") {
    c.damping = [](const Vec& w) { return Vec(w / (1.0 + w.norm())); };
    c.damping_jac = [](const Vec& w) {
      const int n = static_cast<int>(w.size());
      const double r = w.norm();
      if (r == 0.0) return Mat(Mat::Identity(n, n));
      const double s = 1.0 + r;
      return Mat(Mat::Identity(n, n) / s -
                 (w * w.transpose()) / (r * s * s));
    };
  } else {
    const Mat D = param_or_identity(params.D, c.mc, c.mc, "D");
    c.damping = [D](const Vec& w) { return Vec(D * w); };
    c.damping_jac = [D](const Vec&) { return D; };
  }

  c.validate();
  return c;
}

ScenarioPreset make_preset(const std::string& name) {
  ScenarioPreset preset;
  preset.name = name;
  const bool is_string = name.rfind("string_", 0) == 0;
  const bool is_beam = name.rfind("beam_", 0) == 0;
  if (!is_string && !is_beam)
    throw spec_error("preset: unknown preset '" + name + "'");
  const std::string ctrl = name.substr(name.find('_') + 1);

  if (is_string) {
    preset.system = vibrating_string(1.0, 1.0, 0.0, 1.0);
    preset.default_n = 200;
  } else {
    preset.system = timoshenko_beam(1.0, 1.0, 1.0, 1.0, 0.0, 1.0);
    preset.default_n = 120;
  }
  ControllerParams params;
  params.mc = params.k = preset.system.k();
  if (ctrl == "linear_pd")
    preset.controller = controller_library("linear_pd", params);
  else if (ctrl == "quartic_pd")
    preset.controller = controller_library("quartic_pd", params);
  else if (ctrl == "saturating_pd")
    preset.controller = controller_library("saturating_damper_pd", params);
  else
    throw spec_error("preset: unknown controller suffix in '" + name + "'");
  return preset;
}

std::vector<std::string> preset_names() {
  return {"string_linear_pd",  "string_quartic_pd", "string_saturating_pd",
          "beam_linear_pd",    "beam_quartic_pd",   "beam_saturating_pd"};
}

}  // namespace hamport
