#include "smxfem/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace smx {

std::array<double, 2> CircularInclusionOracle::radial_strains(double r) const {
  if (r <= p.radius) return {a, a};
  return {-b / (r * r), b / (r * r)};
}

std::array<double, 2> CircularInclusionOracle::radial_stresses(double r) const {
  const auto [err, ett] = radial_strains(r);
  const double es = r <= p.radius ? p.eigenstrain : 0.0;
  const double e1 = err - es, e2 = ett - es;
  return {p.lambda * (e1 + e2) + 2.0 * p.mu * e1, p.lambda * (e1 + e2) + 2.0 * p.mu * e2};
}

Vec2 CircularInclusionOracle::displacement(const Vec2& x) const {
  const Vec2 d = x - p.center;
  const double r = d.norm();
  if (r == 0.0) return Vec2::Zero();
  return radial_displacement(r) * d / r;
}

Eigen::Matrix2d CircularInclusionOracle::gradient(const Vec2& x) const {
  const Vec2 d = x - p.center;
  const double r = d.norm();
  if (r <= p.radius) return a * Eigen::Matrix2d::Identity();
  const Vec2 e = d / r;
  const auto [err, ett] = radial_strains(r);
  const Eigen::Matrix2d P = e * e.transpose();
  return err * P + ett * (Eigen::Matrix2d::Identity() - P);
}

Voigt3 CircularInclusionOracle::strain(const Vec2& x) const { return strain_of(gradient(x)); }

std::array<double, 2> CircularInclusionOracle::residuals() const {
  const double R = p.radius;
  const double cont = a * R - b / R;
  const double srr_m = -2.0 * p.mu * b / (R * R);
  const double srr_i = 2.0 * (p.lambda + p.mu) * (a - p.eigenstrain);
  return {cont, srr_m - srr_i - (p.tau + p.stiffness * a) / R};
}

MaterialSet CircularInclusionOracle::materials() const {
  MaterialSet m;
  m.matrix = BulkMaterial::isotropic(p.lambda, p.mu);
  m.particle = m.matrix;
  m.eigenstrain = dilatational(p.eigenstrain);
  m.interface = {0.0, p.tau, p.stiffness};
  return m;
}

CircularInclusionOracle oracle_solve(const InclusionParams& p) {
  if (!(p.mu > 0.0) || !(3.0 * p.lambda + 2.0 * p.mu > 0.0))
    fail(ErrorKind::InvalidArgument, "oracle: moduli must satisfy mu > 0 and 3 lambda + 2 mu > 0");
  if (!(p.radius > 0.0)) fail(ErrorKind::InvalidArgument, "oracle: radius must be positive");
  const double R = p.radius;
  // Unknowns (a, b):  a R - b / R = 0
  //   -2 mu b / R^2 - 2 (lambda + mu)(a - eps*) - (tau + LS a) / R = 0
  Eigen::Matrix2d A;
  A << R, -1.0 / R, -2.0 * (p.lambda + p.mu) - p.stiffness / R, -2.0 * p.mu / (R * R);
  const Eigen::Vector2d rhs(0.0, p.tau / R - 2.0 * (p.lambda + p.mu) * p.eigenstrain);
  const double det = A.determinant();
  if (!(std::abs(det) > 1e-14 * A.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff()))
    fail(ErrorKind::Singular, "oracle: singular 2x2 system");
  const Eigen::Vector2d x = A.partialPivLu().solve(rhs);
  CircularInclusionOracle o;
  o.p = p;
  o.a = x[0];
  o.b = x[1];
  return o;
}

double RadialProfile::at(double radius) const {
  if (r.empty()) fail(ErrorKind::InvalidArgument, "radial profile is empty");
  if (radius <= r.front()) return u.front();
  if (radius >= r.back()) return u.back();
  const auto it = std::upper_bound(r.begin(), r.end(), radius);
  const std::size_t k = static_cast<std::size_t>(it - r.begin());
  const double t = (radius - r[k - 1]) / (r[k] - r[k - 1]);
  return (1.0 - t) * u[k - 1] + t * u[k];
}

RadialProfile radial_fd_oracle(const InclusionParams& p, int elements_per_radius, double outer_factor) {
  if (elements_per_radius < 2 || !(outer_factor > 1.0))
    fail(ErrorKind::InvalidArgument, "radial oracle: need >= 2 elements per radius and outer factor > 1");
  const double R = p.radius;
  const int n_in = elements_per_radius;
  const int n_out = static_cast<int>(std::ceil(elements_per_radius * (outer_factor - 1.0)));
  const int ne = n_in + n_out;
  RadialProfile prof;
  prof.r.resize(ne + 1);
  for (int k = 0; k <= n_in; ++k) prof.r[k] = R * k / n_in;
  for (int k = 1; k <= n_out; ++k) prof.r[n_in + k] = R + (outer_factor - 1.0) * R * k / n_out;

  // Tridiagonal system for nodes 1..ne (u(0) = 0); the common factor 2 pi is dropped.
  const int m = ne;
  std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), f(m, 0.0);
  const double c1 = p.lambda + 2.0 * p.mu, c2 = p.lambda;
  const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (int e = 0; e < ne; ++e) {
    const double r0 = prof.r[e], r1 = prof.r[e + 1], h = r1 - r0;
    const double es = e < n_in ? p.eigenstrain : 0.0;
    double k[2][2] = {{0, 0}, {0, 0}}, fe[2] = {0, 0};
    for (int g = 0; g < 3; ++g) {
      const double s = 0.5 * (1.0 + gx[g]);
      const double r = r0 + s * h, w = 0.5 * h * gw[g] * r;
      const double N[2] = {1.0 - s, s}, dN[2] = {-1.0 / h, 1.0 / h};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j)
          k[i][j] += w * (c1 * (dN[i] * dN[j] + N[i] * N[j] / (r * r)) + c2 * (dN[i] * N[j] + N[i] * dN[j]) / r);
        fe[i] += w * (c1 + c2) * es * (dN[i] + N[i] / r);
      }
    }
    for (int i = 0; i < 2; ++i) {
      const int I = e + i - 1;  // unknown index of node e + i
      if (I < 0) continue;
      f[I] += fe[i];
      for (int j = 0; j < 2; ++j) {
        const int J = e + j - 1;
        if (J < 0) continue;
        if (J == I)
          di[I] += k[i][j];
        else if (J == I + 1)
          up[I] += k[i][j];
        else
          lo[I] += k[i][j];
      }
    }
  }
  const int iR = n_in - 1;
  di[iR] += p.stiffness / R;
  f[iR] -= p.tau;
  di[m - 1] += 2.0 * p.mu;

  // Thomas algorithm.
  for (int i = 1; i < m; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    f[i] -= w * f[i - 1];
  }
  std::vector<double> x(m);
  x[m - 1] = f[m - 1] / di[m - 1];
  for (int i = m - 2; i >= 0; --i) x[i] = (f[i] - up[i] * x[i + 1]) / di[i];
  prof.u.assign(ne + 1, 0.0);
  for (int i = 0; i < m; ++i) prof.u[i + 1] = x[i];
  return prof;
}

namespace {

Vec2 bilinear_point(const Quad& q, double s, double t) {
  return (1.0 - s) * (1.0 - t) * q[0] + s * (1.0 - t) * q[1] + s * t * q[2] + (1.0 - s) * t * q[3];
}

}  // namespace

ErrorNorms error_norms(const Discretization& disc, const Eigen::VectorXd& u, const CircularInclusionOracle& oracle,
                       int subdivisions, int interface_subdivisions) {
  if (subdivisions < 1 || interface_subdivisions < 1)
    fail(ErrorKind::InvalidArgument, "error_norms: subdivisions must be >= 1");
  const Stiffness C = BulkMaterial::isotropic(oracle.p.lambda, oracle.p.mu).C;
  const Voigt3 es = dilatational(oracle.p.eigenstrain);
  double du = 0.0, uu = 0.0, de = 0.0, ee = 0.0;
  for (int e = 0; e < static_cast<int>(disc.elements.size()); ++e) {
    const ElementData& ed = disc.elements[e];
    const Quad& q = ed.basis.vertices();
    // The exact strain jumps across the circle; elements it crosses get the
    // finer rule so the sampling of that jump does not dominate the norm.
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (int k = 0; k < 4; ++k) {
      double t = 0.0;
      dmin = std::min(dmin, point_segment_distance(oracle.p.center, q[k], q[(k + 1) % 4], &t));
      dmax = std::max(dmax, (q[k] - oracle.p.center).norm());
    }
    if (point_in_convex_polygon(q, oracle.p.center)) dmin = 0.0;
    const bool crossed = dmin < oracle.p.radius && oracle.p.radius < dmax;
    const int kSub = crossed ? interface_subdivisions : subdivisions;
    const double w = ed.basis.area() / (kSub * kSub);
    Eigen::VectorXd ue(ed.dofs.size());
    for (std::size_t k = 0; k < ed.dofs.size(); ++k) ue[k] = u[ed.dofs[k]];
    for (int j = 0; j < kSub; ++j) {
      for (int i = 0; i < kSub; ++i) {
        const Vec2 x = bilinear_point(q, (i + 0.5) / kSub, (j + 0.5) / kSub);
        const Nodal4 N = ed.basis.eval(x);
        const double F = ed.partition.cut ? eval_enrichment(N, ed.phi) : 0.0;
        Vec2 uh = Vec2::Zero();
        for (int I = 0; I < 4; ++I) {
          uh += N[I] * Vec2(ue[2 * I], ue[2 * I + 1]);
          if (ed.partition.cut) uh += F * N[I] * Vec2(ue[8 + 2 * I], ue[8 + 2 * I + 1]);
        }
        const Vec2 ux = oracle.displacement(x);
        du += w * (uh - ux).squaredNorm();
        uu += w * ux.squaredNorm();
        const int c = disc.locate_cell(e, x);
        const Voigt3 eh = strain_rows(ed.gradients[c]) * ue;
        const Voigt3 ex = oracle.strain(x);
        const Voigt3 el = oracle.phase(x) == Phase::Particle ? Voigt3(ex - es) : ex;
        de += w * (eh - ex).dot(C * (eh - ex));
        ee += w * el.dot(C * el);
      }
    }
  }
  return {uu > 0.0 ? std::sqrt(du / uu) : std::sqrt(du), ee > 0.0 ? std::sqrt(de / ee) : std::sqrt(de)};
}

ProblemSolution solve_inclusion(const InclusionParams& p, double half_width, int n, const SmoothingOptions& smoothing,
                                SolverKind solver, int threads) {
  const CircularInclusionOracle oracle = oracle_solve(p);
  Mesh mesh(p.center - Vec2(half_width, half_width), p.center + Vec2(half_width, half_width), n, n);
  const Circle circle{p.center, p.radius};
  LevelSetField field = init_signed_distance_circles(mesh, std::span<const Circle>(&circle, 1));
  ProblemSpec spec{std::move(mesh), std::move(field), oracle.materials(), smoothing, {},
                   [oracle](const Vec2& x) { return oracle.displacement(x); }, solver, threads};
  return solve_problem(spec);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::InvalidArgument, "loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) fail(ErrorKind::InvalidArgument, "loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) fail(ErrorKind::InvalidArgument, "loglog_slope: abscissae must differ");
  return (n * sxy - sx * sy) / den;
}

ConvergenceTable convergence_study(const InclusionParams& p, double half_width, const std::vector<int>& sizes,
                                   const SmoothingOptions& smoothing, SolverKind solver, int threads) {
  if (sizes.size() < 3) fail(ErrorKind::InvalidArgument, "convergence_study: at least 3 mesh levels are required");
  const CircularInclusionOracle oracle = oracle_solve(p);
  ConvergenceTable t;
  std::vector<double> hs, eds, ees;
  for (int n : sizes) {
    const ProblemSolution sol = solve_inclusion(p, half_width, n, smoothing, solver, threads);
    ConvergenceRow row{n, 2.0 * half_width / n, error_norms(sol.disc, sol.u, oracle), sol.disc.dofs.num_dofs()};
    hs.push_back(row.h);
    eds.push_back(row.errors.displacement);
    ees.push_back(row.errors.energy);
    t.rows.push_back(row);
  }
  // Errors at round-off level carry no rate information.
  const bool saturated = *std::max_element(ees.begin(), ees.end()) < 1e-12;
  t.displacement_rate = saturated ? 0.0 : loglog_slope(hs, eds);
  t.energy_rate = saturated ? 0.0 : loglog_slope(hs, ees);
  return t;
}

TimingTable timing_study(const InclusionParams& p, double half_width, const std::vector<int>& sizes,
                         const SmoothingOptions& smoothing, int repeats, int threads) {
  if (sizes.size() < 2) fail(ErrorKind::InvalidArgument, "timing_study: at least 2 sizes are required");
  const CircularInclusionOracle oracle = oracle_solve(p);
  const MaterialSet mat = oracle.materials();
  TimingTable t;
  std::vector<double> ns, ts;
  for (int n : sizes) {
    const Mesh mesh(p.center - Vec2(half_width, half_width), p.center + Vec2(half_width, half_width), n, n);
    const Circle circle{p.center, p.radius};
    const LevelSetField field = init_signed_distance_circles(mesh, std::span<const Circle>(&circle, 1));
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, repeats); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const Discretization disc = discretize(mesh, field, smoothing, threads);
      const LinearSystem sys = assemble(disc, mat, {}, threads);
      const auto t1 = std::chrono::steady_clock::now();
      if (sys.K.rows() == 0) fail(ErrorKind::Runtime, "timing_study: empty system");
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    t.rows.push_back({n, mesh.num_elements(), best});
    ns.push_back(static_cast<double>(mesh.num_elements()));
    ts.push_back(best);
  }
  t.slope = loglog_slope(ns, ts);
  return t;
}

std::vector<ProfileSample> radial_profile(const Discretization& disc, const Eigen::VectorXd& u,
                                          const CircularInclusionOracle& oracle, double theta, int samples,
                                          double r_max) {
  if (samples < 1) fail(ErrorKind::InvalidArgument, "radial_profile: samples must be >= 1");
  const Vec2 dir(std::cos(theta), std::sin(theta));
  const double h = disc.mesh.h();
  const CellGradients grads = all_cell_gradients(disc, u);
  std::vector<ProfileSample> out;
  out.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const double r = r_max * (k + 0.5) / samples;
    const Vec2 x = oracle.p.center + r * dir;
    const int e = disc.mesh.locate(x);
    if (e < 0) fail(ErrorKind::InvalidArgument, "radial_profile: ray leaves the domain");
    const ElementData& ed = disc.elements[e];
    const Phase ph = phase_of(interpolate(ed.basis.eval(x), ed.phi));
    const Voigt3 eps = strain_of(recovered_gradient(disc, grads, x, ph, 2.0 * h));
    ProfileSample s;
    s.r = r;
    s.u_h = displacement_at(disc, u, x).dot(dir);
    s.u_exact = oracle.radial_displacement(r);
    s.err_h = dir.x() * dir.x() * eps[0] + dir.y() * dir.y() * eps[1] + dir.x() * dir.y() * eps[2];
    s.err_exact = oracle.radial_strains(r)[0];
    out.push_back(s);
  }
  return out;
}

ProfileErrors profile_errors(const std::vector<ProfileSample>& samples, double radius, double band) {
  double umax = 0.0, emax = 0.0;
  for (const auto& s : samples) {
    umax = std::max(umax, std::abs(s.u_exact));
    emax = std::max(emax, std::abs(s.err_exact));
  }
  if (!(umax > 0.0) || !(emax > 0.0)) fail(ErrorKind::InvalidArgument, "profile_errors: exact profile is zero");
  ProfileErrors out;
  for (const auto& s : samples) {
    const double du = std::abs(s.u_h - s.u_exact) / umax;
    const double de = std::abs(s.err_h - s.err_exact) / emax;
    const bool near = std::abs(s.r - radius) <= band;
    (near ? out.displacement_band : out.displacement_outside) =
        std::max(near ? out.displacement_band : out.displacement_outside, du);
    (near ? out.strain_band : out.strain_outside) = std::max(near ? out.strain_band : out.strain_outside, de);
  }
  return out;
}

}  // namespace smx
