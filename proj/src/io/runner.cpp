#include <fftw3.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "contactlab/contact/model.hpp"
#include "contactlab/convergence/resolvent.hpp"
#include "contactlab/error.hpp"
#include "contactlab/io/experiment.hpp"
#include "contactlab/io/field_io.hpp"
#include "contactlab/meanfield/gp.hpp"
#include "contactlab/simd/kernels.hpp"
#include "contactlab/twobody/potential.hpp"
#include "reader.hpp"

namespace contactlab {
namespace {

using detail::Reader;

constexpr const char* kVersion = "0.1.0";

struct Ctx {
  bool run = false;
  std::uint64_t seed = 0;
  RunReport* rep = nullptr;
  Json& res() { return rep->results; }
  void warn(std::string w) { rep->warnings.push_back(std::move(w)); }
};

Json array_of(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json grid_meta(const RadialGrid& g) {
  Json j = Json::object();
  j["spacing"] = std::string(to_string(g.law()));
  j["n"] = g.n();
  j["r_min"] = g.r_min();
  j["r_max"] = g.r_max();
  return j;
}

Json box_meta(const BoxGrid3D& g) {
  Json j = Json::object();
  j["m"] = g.m();
  j["side"] = g.side();
  j["dx"] = g.dx();
  return j;
}

Json energy_json(const EnergyBreakdown& e) {
  Json j = Json::object();
  j["kinetic"] = e.kinetic;
  j["trap"] = e.trap;
  j["interaction"] = e.interaction;
  j["total"] = e.total;
  return j;
}

// ---- shared tables ----

RadialGrid read_grid(Reader& parent, const std::string& key, std::size_t n, double r_min, double r_max, SpacingLaw law) {
  std::optional<RadialGrid> g;
  parent.nested(key, [&](Reader& r) {
    const auto nn = r.count("n", n);
    const double a = r.num("r_min", r_min), b = r.num("r_max", r_max);
    const auto sp = spacing_law_from_string(r.str("spacing", std::string(to_string(law))));
    g = RadialGrid::make(nn, a, b, sp);
  });
  return *g;
}

Shape read_shape(Reader& parent, const std::string& key, const std::string& def_type) {
  Shape s;
  parent.nested(key, [&](Reader& r) {
    const auto type = r.str("type", def_type);
    if (type == "square_well") {
      s = SquareWell{r.num("R", 1.0)};
    } else if (type == "gaussian") {
      s = Gaussian{r.num("sigma", 1.0)};
    } else if (type == "table") {
      UserTable t;
      t.r = r.nums("r", {});
      t.v = r.nums("v", {});
      s = std::move(t);
    } else {
      throw ValidationError("shape_type", "shape type must be square_well, gaussian or table");
    }
  });
  return s;
}

PotentialSpec read_potential(Reader& parent, const std::string& key, double g, ScalingClass cls) {
  PotentialSpec p;
  parent.nested(key, [&](Reader& r) {
    p.shape = read_shape(r, "shape", "square_well");
    p.coupling = r.num("coupling", g);
    p.scaling = scaling_class_from_string(r.str("scaling", to_string(cls)));
    p.epsilon = r.num("epsilon", 1.0);
  });
  p.validate();
  return p;
}

CompositePotential read_composite(Reader& parent, double g2) {
  CompositePotential c;
  parent.nested("composite", [&](Reader& r) {
    auto part = [&](const char* key, PotentialSpec& p, double g, const char* shape) {
      r.nested(key, [&](Reader& q) {
        p.shape = read_shape(q, "shape", shape);
        p.coupling = q.num("coupling", g);
      });
    };
    part("v1", c.v1, 1.0, "square_well");
    part("v2", c.v2, g2, "square_well");
    part("v3", c.v3, 0.0, "gaussian");
  });
  c.validate();
  return c;
}

EigenRequest read_eigen(Reader& parent, std::size_t k, double tol) {
  EigenRequest req;
  parent.nested("eigen", [&](Reader& r) {
    req.k = r.count("k", k);
    req.tol = r.num("tol", tol);
    req.max_iter = r.count("max_iter", 5000);
  });
  if (req.k == 0) throw ValidationError("eigen_k", "eigen.k must be at least 1");
  if (!(req.tol > 0.0)) throw ValidationError("eigen_tol", "eigen.tol must be positive");
  return req;
}

struct InitSpec {
  std::string type = "gaussian";
  double width = 1.0;
  double noise = 0.0;
  std::array<double, 3> center{0, 0, 0};
  std::string path;
};

InitSpec read_init(Reader& parent, bool allow_ground_state) {
  InitSpec s;
  parent.nested("init", [&](Reader& r) {
    s.type = r.str("type", "gaussian");
    if (s.type == "gaussian" || (allow_ground_state && s.type == "ground_state")) {
      s.width = r.num("width", 1.0);
      s.noise = r.num("noise", 0.0);
      const auto c = r.nums("center", {0.0, 0.0, 0.0});
      if (c.size() != 3) throw ValidationError("init_center", "init.center needs 3 coordinates");
      s.center = {c[0], c[1], c[2]};
      if (!(s.width > 0.0)) throw ValidationError("init_width", "init.width must be positive");
      if (!(s.noise >= 0.0 && s.noise < 1.0)) throw ValidationError("init_noise", "init.noise must lie in [0, 1)");
    } else if (s.type == "file") {
      s.path = r.str("path", "");
      if (s.path.empty()) throw ValidationError("init_path", "init.path is required for file init");
    } else {
      throw ValidationError("init_type", allow_ground_state ? "init type must be gaussian, file or ground_state"
                                                            : "init type must be gaussian or file");
    }
  });
  return s;
}

WaveField make_init(const InitSpec& s, const BoxGrid3D& grid, double mass, std::uint64_t seed) {
  if (s.type == "file") {
    auto f = read_field(s.path);
    if (!(f.grid() == grid)) throw ValidationError("grid_mismatch", "init field grid differs from the configured box");
    return f;
  }
  auto f = gaussian_field(grid, s.width, mass, s.center);
  if (s.noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& z : f.values()) z *= 1.0 + s.noise * u(rng);
    const double k = std::sqrt(mass / f.mass());
    for (auto& z : f.values()) z *= k;
  }
  return f;
}

void read_meanfield(Reader& r, MeanFieldConfig& mf, bool evolve) {
  r.nested("box", [&](Reader& b) {
    const auto m = b.count("m", 64);
    mf.grid = BoxGrid3D::make(m, b.num("side", 16.0));
  });
  mf.g = r.num("g", 0.0);
  r.nested("trap", [&](Reader& t) {
    const auto type = t.str("type", "harmonic");
    if (type == "harmonic") {
      mf.trap = HarmonicTrap{t.num("omega", 1.0)};
    } else if (type == "none") {
      mf.trap = NoTrap{};
    } else if (type == "table") {
      TableTrap tt;
      tt.r = t.nums("r", {});
      tt.v = t.nums("v", {});
      mf.trap = std::move(tt);
    } else {
      throw ValidationError("trap_type", "trap type must be harmonic, none or table");
    }
  });
  r.nested("nonlinearity", [&](Reader& n) {
    const auto type = n.str("type", "cubic");
    if (type == "cubic") {
      mf.nonlinearity = CubicNonlinearity{};
    } else if (type == "shell") {
      mf.nonlinearity = ShellNonlinearity{n.num("r0", 1.0)};
    } else {
      throw ValidationError("nonlinearity_type", "nonlinearity type must be cubic or shell");
    }
  });
  mf.mass = r.num("mass", 1.0);
  if (evolve) {
    mf.dt = r.num("dt", 1e-3);
    mf.steps = r.count("steps", 1000);
    mf.sample_every = r.count("sample_every", 10);
    mf.snapshot_every = r.count("snapshot_every", 0);
  }
  mf.tol = r.num("tol", 1e-8);
  mf.max_iter = r.count("max_iter", 2000);
  mf.validate();
}

// ---- commands ----

void cmd_twobody(Reader& r, Ctx& c) {
  const auto spec = read_potential(r, "potential", 12.0, ScalingClass::unscaled);
  const auto grid = read_grid(r, "grid", 4000, 0.0025, 10.0, SpacingLaw::uniform);
  auto req = read_eigen(r, 5, 1e-9);
  const auto bnd = r.str("boundary", "dirichlet");
  if (bnd != "dirichlet" && bnd != "neumann") throw ValidationError("boundary", "boundary must be dirichlet or neumann");
  const bool want_a = r.flag("scattering_length", true);
  if (!c.run) return;
  req.seed = c.seed;
  c.rep->provenance["grid"] = grid_meta(grid);
  const auto v = realize_potential(spec, grid);
  const auto sp = bound_states_radial(v, req, bnd == "neumann" ? OuterBoundary::neumann : OuterBoundary::dirichlet);
  c.res()["negative_count"] = sp.negative_count;
  c.res()["truncated"] = sp.truncated;
  c.res()["eigenvalues"] = array_of(sp.eigenvalues);
  if (sp.truncated) c.warn("more negative eigenvalues than eigen.k; the list is truncated");
  Table t{"eigenvalues", {"n", "lambda", "residual"}, {}};
  for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i)
    t.rows.push_back({i + 1, sp.eigenvalues[i], sp.residuals[i]});
  c.rep->tables.push_back(std::move(t));
  const auto norms = extension_norms(spec);
  c.res()["extension_norms"] = {{"l1", norms.l1}, {"rollnik", norms.rollnik}};
  if (want_a) {
    const double a = scattering_length(v);
    c.res()["scattering_length"] = a;
    c.res()["inverse_scattering_length"] = 1.0 / a;
  }
}

void cmd_resonance(Reader& r, Ctx& c) {
  PotentialSpec p;
  p.shape = read_shape(r, "shape", "square_well");
  p.scaling = scaling_class_from_string(r.str("scaling", "unscaled"));
  p.epsilon = r.num("epsilon", 1.0);
  p.coupling = 0.0;
  p.validate();
  const auto br = r.nums("bracket", {1.0, 4.0});
  if (br.size() != 2) throw ValidationError("bracket", "bracket needs two couplings");
  const auto grid = read_grid(r, "grid", 80000, 5e-5, 4.0, SpacingLaw::uniform);
  if (!c.run) return;
  c.rep->provenance["grid"] = grid_meta(grid);
  const auto res = tune_to_resonance(p, {br[0], br[1]}, grid);
  c.res()["coupling"] = res.coupling;
  c.res()["inverse_scattering_length"] = res.inverse_a;
  c.res()["scan_points"] = res.scan_points;
  c.res()["bisection_steps"] = res.bisection_steps;
}

void cmd_contact_spectrum(Reader& r, Ctx& c) {
  const auto kind = contact_kind_from_string(r.str("kind", "strong"));
  const double C = r.num("coupling", 1.0);
  const auto grid = read_grid(r, "grid", 2000, 1e-4, 10.0, SpacingLaw::logarithmic);
  std::string btype;
  double amp = 0.0, range = 1.0;
  r.nested("b_kernel", [&](Reader& b) {
    btype = b.str("type", "none");
    if (btype == "separable") {
      amp = b.num("amplitude", 1.0);
      range = b.num("range", 1.0);
      if (!(amp >= 0.0) || !(range > 0.0)) throw ValidationError("b_kernel", "amplitude >= 0 and range > 0 required");
    } else if (btype != "none") {
      throw ValidationError("b_kernel", "b_kernel type must be none or separable");
    }
  });
  auto req = read_eigen(r, 20, 1e-9);
  const bool fit = r.flag("fit", true);
  if (!c.run) return;
  req.seed = c.seed;
  c.rep->provenance["grid"] = grid_meta(grid);
  std::optional<Eigen::MatrixXd> b;
  if (btype == "separable") {
    Eigen::VectorXd f(static_cast<Eigen::Index>(grid.n()));
    for (std::size_t i = 0; i < grid.n(); ++i) f(static_cast<Eigen::Index>(i)) = std::exp(-std::pow(grid[i] / range, 2));
    b = amp * f * f.transpose();
  }
  const auto op = ContactModelOperator::build(kind, C, grid, b);
  const auto sp = efimov_sequence(op, req);
  c.res()["negative_count"] = sp.negative_count;
  // truncated: fewer negatives than requested; more_available: the list was cut at eigen.k
  c.res()["truncated"] = sp.truncated;
  c.res()["more_available"] = sp.negative_count > sp.eigenvalues.size();
  c.res()["eigenvalues"] = array_of(sp.eigenvalues);
  Table t{"eigenvalues", {"n", "lambda", "residual"}, {}};
  for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i)
    t.rows.push_back({i + 1, sp.eigenvalues[i], sp.residuals[i]});
  c.rep->tables.push_back(std::move(t));
  Json fits = Json::array();
  if (fit && sp.eigenvalues.size() >= 4) {
    for (const auto& f : fit_all(sp)) {
      Json j = Json::object();
      j["model"] = to_string(f.model);
      j["params"] = array_of(f.params);
      j["rms_residual"] = f.rms_residual;
      j["n_used"] = f.n_used;
      fits.push_back(std::move(j));
    }
  } else if (fit) {
    c.warn("fewer than 4 negative eigenvalues; asymptotic fits skipped");
  }
  c.res()["fits"] = fits;
}

void cmd_critical(Reader& r, Ctx& c) {
  const auto kind = contact_kind_from_string(r.str("kind", "strong"));
  std::vector<RadialGrid> family;
  r.nested("family", [&](Reader& f) {
    const auto law = spacing_law_from_string(f.str("spacing", "uniform"));
    const auto n0 = f.count("n0", 100);
    const double r_max = f.num("r_max", 1.0);
    const auto levels = f.count("levels", 5);
    if (n0 < 2) throw ValidationError("family", "family.n0 must be at least 2");
    if (levels > 12) throw ValidationError("family", "family.levels must be at most 12");
    for (std::uint64_t k = 0; k < levels; ++k) {
      const double scale = static_cast<double>(n0) * std::ldexp(1.0, static_cast<int>(k));
      if (law == SpacingLaw::uniform) {
        family.push_back(RadialGrid::make(static_cast<std::size_t>(scale), r_max / scale, r_max, law));
      } else {
        // keep the log step of level 0 while r_min halves
        const double step = std::log(static_cast<double>(n0)) / static_cast<double>(n0 - 1);
        const auto extra = static_cast<std::size_t>(std::lround(static_cast<double>(k) * std::log(2.0) / step));
        family.push_back(RadialGrid::make(n0 + extra, r_max / scale, r_max, law));
      }
    }
  });
  CriticalOptions opt;
  opt.probe_tol = r.num("probe_tol", opt.probe_tol);
  opt.c_max = r.num("c_max", opt.c_max);
  opt.c2_scan_step = r.num("c2_scan_step", opt.c2_scan_step);
  if (!c.run) return;
  c.rep->provenance["grid"] = grid_meta(family.back());
  const auto cc = critical_constants(kind, family, opt);
  c.res()["c1"] = cc.c1;
  c.res()["c2"] = cc.c2;
  c.res()["c2_found"] = cc.c2_found;
  c.res()["c2_probe"] = cc.c2_probe;
  c.res()["c1_levels"] = array_of(cc.c1_levels);
  c.res()["window_limits"] = array_of(cc.window_limits);
  c.res()["limit_lo"] = cc.limit_lo;
  c.res()["limit_hi"] = cc.limit_hi;
  c.res()["stability"] = cc.stability;
  Json trace = Json::array();
  Table t{"refinement", {"level", "n", "r_min", "c1_level", "negative_count"}, {}};
  for (std::size_t i = 0; i < cc.refinement_trace.size(); ++i) {
    const auto& e = cc.refinement_trace[i];
    trace.push_back({{"r_min", e.r_min}, {"negative_count", e.negative_count}});
    t.rows.push_back({i, family[i].n(), e.r_min, cc.c1_levels[i], e.negative_count});
  }
  c.res()["refinement_trace"] = trace;
  c.rep->tables.push_back(std::move(t));
  if (!cc.c2_found) c.warn("no coupling below c_max gives strictly increasing counts; c2 set to c_max");
}

void cmd_gp_groundstate(Reader& r, Ctx& c) {
  MeanFieldConfig mf;
  read_meanfield(r, mf, false);
  const auto init = read_init(r, false);
  const bool write = r.flag("write_field", true);
  if (!c.run) return;
  c.rep->provenance["box"] = box_meta(*mf.grid);
  const auto st = ground_state(mf, make_init(init, *mf.grid, mf.mass, c.seed));
  c.res()["energy"] = energy_json(st.energy);
  c.res()["gradient_residual"] = st.gradient_residual;
  c.res()["iterations"] = st.iterations;
  c.res()["chemical_potential"] = st.chemical_potential;
  c.res()["mass"] = st.field.mass();
  c.res()["width"] = field_width(st.field);
  if (write) c.rep->fields.push_back({"ground_state", std::make_shared<WaveField>(st.field)});
}

void cmd_gp_evolve(Reader& r, Ctx& c) {
  MeanFieldConfig mf;
  read_meanfield(r, mf, true);
  const auto init = read_init(r, true);
  const bool write = r.flag("write_field", true);
  if (!c.run) return;
  c.rep->provenance["box"] = box_meta(*mf.grid);
  WaveField psi = make_init(init, *mf.grid, mf.mass, c.seed);
  if (init.type == "ground_state") {
    auto st = ground_state(mf, psi);
    c.res()["initial_state"] = {{"energy", st.energy.total},
                                {"gradient_residual", st.gradient_residual},
                                {"iterations", st.iterations}};
    psi = std::move(st.field);
  }
  const auto traj = evolve(psi, mf);
  Table t{"trajectory", {"time", "mass", "kinetic", "trap", "interaction", "total"}, {}};
  double dm = 0.0, de = 0.0;
  const auto& s0 = traj.samples.front();
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    t.rows.push_back({s.time, s.mass, s.energy.kinetic, s.energy.trap, s.energy.interaction, s.energy.total});
    dm = std::max(dm, std::abs(s.mass - s0.mass));
    de = std::max(de, std::abs(s.energy.total - s0.energy.total));
    if (s.snapshot) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%04zu", i);
      c.rep->fields.push_back({name, s.snapshot});
    }
  }
  c.rep->tables.push_back(std::move(t));
  c.res()["samples"] = traj.samples.size();
  c.res()["final_time"] = traj.samples.back().time;
  c.res()["initial_mass"] = s0.mass;
  c.res()["initial_energy"] = s0.energy.total;
  c.res()["mass_drift"] = dm;
  c.res()["energy_drift"] = de;
  c.res()["relative_mass_drift"] = dm / s0.mass;
  c.res()["relative_energy_drift"] = s0.energy.total != 0.0 ? de / std::abs(s0.energy.total) : de;
  c.res()["final_energy"] = energy_json(traj.samples.back().energy);
  if (write) c.rep->fields.push_back({"final", std::make_shared<WaveField>(traj.final_field)});
}

void cmd_sweep(Reader& r, Ctx& c) {
  const auto comp = read_composite(r, 0.0);
  const auto eps = r.nums("epsilons", {0.4, 0.2, 0.1, 0.05});
  SweepOptions opt;
  opt.grid = read_grid(r, "grid", 4000, 0.0025, 10.0, SpacingLaw::uniform);
  opt.bs_z = r.num("bs_z", opt.bs_z);
  opt.monotone_tol = r.num("monotone_tol", opt.monotone_tol);
  opt.extension_norms = r.flag("extension_norms", opt.extension_norms);
  opt.bs_diagnostic = r.flag("bs_diagnostic", opt.bs_diagnostic);
  if (!c.run) return;
  c.rep->provenance["grid"] = grid_meta(opt.grid);
  const auto rep = epsilon_sweep(comp, eps, opt);
  c.res()["epsilons"] = array_of(rep.epsilons);
  c.res()["monotone_flag"] = rep.monotone_flag;
  c.res()["gaps_decreasing"] = rep.gaps_decreasing;
  c.res()["cauchy_gaps"] = array_of(rep.cauchy_gaps);
  Json per = Json::array();
  Table t{"sweep", {"epsilon", "ground_eigenvalue", "negative_count", "cross_term_norm"}, {}};
  for (const auto& e : rep.per_epsilon) {
    Json j = Json::object();
    j["epsilon"] = e.epsilon;
    j["ground_eigenvalue"] = e.ground_eigenvalue;
    j["negative_count"] = e.negative_count;
    if (opt.extension_norms) j["extension_norms"] = {{"l1", e.norms.l1}, {"rollnik", e.norms.rollnik}};
    if (opt.bs_diagnostic) j["bs_max_eigenvalue"] = e.bs_max_eigenvalue;
    j["cross_term_norm"] = e.cross_term_norm;
    per.push_back(std::move(j));
    t.rows.push_back({e.epsilon, e.ground_eigenvalue, e.negative_count, e.cross_term_norm});
  }
  c.res()["per_epsilon"] = per;
  c.rep->tables.push_back(std::move(t));
  if (!rep.gaps_decreasing) c.warn("cauchy gaps do not decrease along the sweep");
}

void cmd_bs_kernel(Reader& r, Ctx& c) {
  const auto spec = read_potential(r, "potential", 12.0, ScalingClass::unscaled);
  const auto grid = read_grid(r, "grid", 1000, 0.01, 10.0, SpacingLaw::uniform);
  const double z = r.num("z", 1.0);
  const bool crossing = r.flag("crossing", true);
  const std::string meta = r.echo()["potential"].dump();
  if (!c.run) return;
  c.rep->provenance["grid"] = grid_meta(grid);
  const auto v = realize_potential(spec, grid);
  std::vector<double> u(v.values.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = -v.values[i];
  const RadialField uf(grid, u);
  const auto h0 = radial_hamiltonian(grid, {});
  const auto k = bs_kernel(h0, uf, z, meta);
  const std::size_t above = count_above_one(k), below = count_below(radial_hamiltonian(grid, v.values), -z);
  c.res()["z"] = z;
  c.res()["support_size"] = k.support.size();
  c.res()["max_eigenvalue"] = max_eigenvalue(k);
  c.res()["count_above_one"] = above;
  c.res()["count_below_minus_z"] = below;
  c.res()["counting_identity"] = above == below;
  Table t{"kernel_spectrum", {"n", "mu"}, {}};
  if (k.matrix.rows() > 0) {
    const auto ev = dense_eigenvalues(k.matrix);
    for (std::size_t i = 0; i < ev.size(); ++i) t.rows.push_back({i + 1, ev[ev.size() - 1 - i]});
  }
  c.rep->tables.push_back(std::move(t));
  if (crossing) {
    EigenRequest req;
    req.k = 1;
    req.tol = 1e-11;
    req.seed = c.seed;
    const auto sp = bound_states_radial(v, req);
    if (sp.negative_count == 0) {
      c.res()["crossing_z"] = nullptr;
      c.res()["ground_eigenvalue"] = nullptr;
      c.warn("no bound state; the kernel never reaches 1");
    } else {
      const double zs = bs_crossing(h0, uf);
      c.res()["crossing_z"] = zs;
      c.res()["ground_eigenvalue"] = sp.eigenvalues.front();
      c.res()["crossing_error"] = std::abs(-zs - sp.eigenvalues.front());
    }
  }
}

void cmd_cross_term(Reader& r, Ctx& c) {
  const auto comp = read_composite(r, 1.0);
  const auto eps = r.nums("epsilons", {0.2, 0.1, 0.05, 0.025});
  if (eps.empty()) throw ValidationError("epsilons", "epsilons must not be empty");
  for (double e : eps)
    if (!(e > 0.0 && e <= 1.0)) throw ValidationError("epsilon", "each epsilon must lie in (0, 1]");
  if (!c.run) return;
  std::vector<double> val;
  for (double e : eps) val.push_back(cross_term_norm(comp, e));
  c.res()["epsilons"] = array_of(eps);
  c.res()["values"] = array_of(val);
  bool positive = eps.size() >= 2;
  for (double v : val) positive = positive && v > 0.0;
  if (positive) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double x = std::log(eps[i]), y = std::log(val[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    c.res()["loglog_slope"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    c.res()["loglog_slope"] = nullptr;
  }
  // ordered by the list; decreasing means each entry is below the previous one
  bool mono = true;
  for (std::size_t i = 1; i < val.size(); ++i) mono = mono && (eps[i] < eps[i - 1]) == (val[i] < val[i - 1]);
  c.res()["monotone_in_epsilon"] = mono;
  Table t{"cross_term", {"epsilon", "cross_term_norm"}, {}};
  for (std::size_t i = 0; i < eps.size(); ++i) t.rows.push_back({eps[i], val[i]});
  c.rep->tables.push_back(std::move(t));
}

void dispatch(Command cmd, Reader& r, Ctx& c) {
  switch (cmd) {
    case Command::twobody: return cmd_twobody(r, c);
    case Command::resonance: return cmd_resonance(r, c);
    case Command::contact_spectrum: return cmd_contact_spectrum(r, c);
    case Command::critical: return cmd_critical(r, c);
    case Command::gp_groundstate: return cmd_gp_groundstate(r, c);
    case Command::gp_evolve: return cmd_gp_evolve(r, c);
    case Command::sweep: return cmd_sweep(r, c);
    case Command::bs_kernel: return cmd_bs_kernel(r, c);
    case Command::cross_term: return cmd_cross_term(r, c);
  }
}

Json base_provenance() {
  Json p = Json::object();
  p["software"] = "contactlab";
  p["version"] = kVersion;
  p["compiler"] = std::string("gcc ") + __VERSION__;
  p["fftw"] = std::string(fftw_version);
  p["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  p["boost"] = BOOST_LIB_VERSION;
  p["simd_backend"] = std::string(simd::backend_name(simd::kernels().backend));
  return p;
}

}  // namespace

namespace detail {

Json resolve_parameters(Command cmd, const Json& in) {
  Reader r(in, "parameters");
  Ctx c;
  dispatch(cmd, r, c);
  r.finish();
  return r.echo();
}

}  // namespace detail

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  Reader r(cfg.parameters, "parameters");
  Ctx c{true, cfg.seed, &rep};
  rep.config_echo = cfg.to_json();
  rep.provenance = base_provenance();
  try {
    dispatch(cfg.command, r, c);
    r.finish();
  } catch (const ValidationError&) {
    throw;
  } catch (const NumericalError& e) {
    rep.status = "numerical_failure";
    rep.error = Json::object();
    rep.error["message"] = e.what();
    if (const auto* ce = dynamic_cast<const CollapseError*>(&e)) {
      rep.error["kind"] = "collapse";
      if (ce->last_valid()) rep.fields.push_back({"last_valid", ce->last_valid()});
    } else if (const auto* cv = dynamic_cast<const ConvergenceError*>(&e)) {
      rep.error["kind"] = "convergence";
      rep.error["residuals"] = array_of(cv->residuals());
    } else if (const auto* ie = dynamic_cast<const InvertibilityError*>(&e)) {
      rep.error["kind"] = "invertibility";
      rep.error["norm"] = ie->norm();
    } else {
      rep.error["kind"] = "numerical";
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace contactlab
