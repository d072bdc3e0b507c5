#include "warpsol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "warpsol/errors.hpp"

namespace warpsol {

std::string_view to_string(ResidualStatus st) {
  switch (st) {
    case ResidualStatus::checked: return "checked";
    case ResidualStatus::info: return "info";
    case ResidualStatus::skipped: return "skipped";
  }
  return "?";
}

Residual make_residual(std::string name, double value, double tolerance, double s) {
  Residual r;
  r.name = std::move(name);
  r.value = value;
  r.tolerance = tolerance;
  r.pass = std::isfinite(value) && std::fabs(value) <= tolerance;
  r.s = s;
  return r;
}

Residual make_info(std::string name, double value, double s) {
  Residual r;
  r.name = std::move(name);
  r.value = value;
  r.status = ResidualStatus::info;
  r.s = s;
  return r;
}

Residual make_skipped(std::string name, std::string why, double s) {
  Residual r;
  r.name = std::move(name);
  r.status = ResidualStatus::skipped;
  r.note = std::move(why);
  r.s = s;
  return r;
}

void ResidualTable::add(Residual r) {
  index_[r.name] = entries_.size();
  entries_.push_back(std::move(r));
}

void ResidualTable::add_worst(Residual r) {
  auto it = index_.find(r.name);
  if (it == index_.end()) {
    add(std::move(r));
    return;
  }
  Residual& cur = entries_[it->second];
  if (r.status == ResidualStatus::skipped) return;
  const bool r_nan = !std::isfinite(r.value);
  const bool worse = cur.status == ResidualStatus::skipped || r_nan ||
                     (std::isfinite(cur.value) && std::fabs(r.value) > std::fabs(cur.value));
  if (worse) cur = std::move(r);
}

void ResidualTable::append(const std::vector<Residual>& rs) {
  for (const Residual& r : rs) add(r);
}

void ResidualTable::append_worst(const std::vector<Residual>& rs) {
  for (const Residual& r : rs) add_worst(r);
}

const Residual* ResidualTable::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool ResidualTable::all_pass() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Residual& r) { return r.status != ResidualStatus::checked || r.pass; });
}

std::string fiber_name(const std::string& base, std::size_t j) { return base + "_" + std::to_string(j + 1); }

std::vector<Residual> soliton_residual(const FrameState& st, double tol) {
  const RicciSpectrum sp = ricci_spectrum(st);
  std::vector<Residual> out;
  out.push_back(make_residual("soliton_11", sp.lambda1.v + st.fp.d1 - st.rho, tol, st.s));
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    out.push_back(make_residual(fiber_name("soliton_jj", j), sp.lambda[j].v + st.fp.v * st.fibers[j].xi.v - st.rho,
                                tol, st.s));
  }
  return out;
}

std::vector<Residual> soliton_residual(const SolitonSpec& spec, double s, double tol) {
  return soliton_residual(connection_state(spec, s), tol);
}

namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

double ricci_norm_sq(const RicciSpectrum& sp) {
  double sum = sp.lambda1.v * sp.lambda1.v;
  for (std::size_t j = 0; j < sp.lambda.size(); ++j) sum += sp.multiplicity[j] * sp.lambda[j].v * sp.lambda[j].v;
  return sum;
}

}  // namespace

std::vector<Residual> hamilton_residuals(const std::vector<FrameState>& frames, double tol) {
  if (frames.empty()) throw ValidationError("hamilton_residuals needs at least one grid point");
  ResidualTable t;
  std::vector<double> c0;
  std::vector<double> where;
  for (const FrameState& st : frames) {
    const RicciSpectrum sp = ricci_spectrum(st);
    const Jet3 R = scalar_curvature(sp);
    const double grad = R.d1 - 2.0 * sp.lambda1.v * st.fp.v;
    const double lap = (R.d2 + R.d1 * st.S1.v) - (R.d1 * st.fp.v + 2.0 * st.rho * R.v - 2.0 * ricci_norm_sq(sp));
    t.add_worst(make_residual("hamilton_grad", grad, tol, st.s));
    t.add_worst(make_residual("hamilton_laplacian", lap, tol, st.s));
    c0.push_back(R.v + st.fp.v * st.fp.v - 2.0 * st.rho * st.f.v);
    where.push_back(st.s);
  }
  const double mid = median(c0);
  Residual drift = make_residual("hamilton_energy_drift", 0.0, tol, where.front());
  for (std::size_t i = 0; i < c0.size(); ++i) {
    const double d = std::fabs(c0[i] - mid);
    if (!(d <= std::fabs(drift.value))) drift = make_residual("hamilton_energy_drift", d, tol, where[i]);
  }
  drift.note = "C0 median " + std::to_string(mid);
  t.add_worst(drift);
  return t.entries();
}

std::vector<Residual> hamilton_residuals(const SolitonSpec& spec, const std::vector<double>& grid, double tol) {
  return hamilton_residuals(spec_frames(spec, grid), tol);
}

std::vector<Residual> d_tensor(const FrameState& st, double tol) {
  const CurvatureReport rep = curvature_report(st);
  std::vector<Residual> out;
  bool soliton = true;
  for (const Residual& r : soliton_residual(st, tol)) soliton = soliton && r.pass;
  bool space_forms = true;
  for (const FiberFrame& f : st.fibers) space_forms = space_forms && f.space_form;
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    out.push_back(make_info(fiber_name("d_tensor", j), rep.d_tensor[j], st.s));
  }
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    const std::string name = fiber_name("d_eq_226", j);
    if (!space_forms) {
      out.push_back(make_skipped(name, "Weyl tensor not determined: non-space-form fiber", st.s));
    } else if (!soliton) {
      out.push_back(make_skipped(name, "recombination only holds for solitons", st.s));
    } else {
      const double recombined = rep.d_tensor[j] + rep.cotton[j] - st.fp.v * rep.weyl.radial[j];
      out.push_back(make_residual(name, recombined, tol, st.s));
    }
  }
  return out;
}

std::vector<Residual> d_tensor(const SolitonSpec& spec, double s, double tol) {
  return d_tensor(connection_state(spec, s), tol);
}

BachStatus bach_flat_check(const FrameState& st, double tol) {
  const CurvatureReport rep = curvature_report(st);
  BachStatus b;
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    if (!(std::fabs(rep.d_tensor[j]) <= tol) || !(std::fabs(rep.cotton[j]) <= tol)) {
      b.certificate = "not computed: requires D = 0 and C = 0";
      return b;
    }
  }
  b.computed = true;
  b.flat = true;
  b.certificate = "D = 0 and C = 0 imply B = 0";
  return b;
}

Residual bach_residual(const BachStatus& b, double tol, double s) {
  if (!b.computed) return make_skipped("bach_flat", b.certificate, s);
  Residual r = make_residual("bach_flat", 0.0, tol, s);
  r.note = b.certificate;
  return r;
}

std::vector<Residual> harmonic_weyl_residuals(const FrameState& st, double tol) {
  const RicciSpectrum sp = ricci_spectrum(st);
  const Jet3 R = scalar_curvature(sp);
  const std::vector<double> cotton = cotton_radial(st);
  const double nm1 = st.n - 1.0;
  std::vector<Residual> out;
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    const std::string name = fiber_name("intcond_3_11", j);
    if (st.fp.v == 0.0) {
      out.push_back(make_skipped(name, "f' = 0", st.s));
    } else {
      out.push_back(make_residual(name, st.fibers[j].curv.v + R.d1 / (2.0 * nm1 * st.fp.v), tol, st.s));
    }
  }
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    const FiberFrame& fiber = st.fibers[j];
    const double lhs = sp.lambda[j].d1 - (sp.lambda1.v - sp.lambda[j].v) * fiber.xi.v;
    out.push_back(make_residual(fiber_name("intcond_3_12", j), lhs - R.d1 / (2.0 * nm1), tol, st.s));
  }
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    out.push_back(make_residual(fiber_name("cotton", j), cotton[j], tol, st.s));
  }
  return out;
}

std::vector<Residual> harmonic_weyl_residuals(const SolitonSpec& spec, double s, double tol) {
  return harmonic_weyl_residuals(connection_state(spec, s), tol);
}

std::vector<FrameState> spec_frames(const SolitonSpec& spec, const std::vector<double>& grid) {
  std::vector<FrameState> frames;
  frames.reserve(grid.size());
  for (double s : grid) frames.push_back(connection_state(spec, s));
  return frames;
}

std::vector<FrameState> trajectory_frames(const Trajectory& traj) {
  std::vector<FrameState> frames;
  frames.reserve(traj.samples.size());
  for (const TrajectoryState& st : traj.samples) frames.push_back(trajectory_frame(st, traj.params));
  return frames;
}

ResidualTable residual_table(const std::vector<FrameState>& frames, double tol) {
  ResidualTable t;
  for (const FrameState& st : frames) t.append_worst(soliton_residual(st, tol));
  t.append_worst(hamilton_residuals(frames, tol));
  for (const FrameState& st : frames) t.append_worst(harmonic_weyl_residuals(st, tol));
  for (const FrameState& st : frames) t.append_worst(d_tensor(st, tol));
  // Bach is certified only if it is certified at every point.
  std::optional<Residual> bach;
  for (const FrameState& st : frames) {
    Residual r = bach_residual(bach_flat_check(st, tol), tol, st.s);
    if (r.status == ResidualStatus::skipped) {
      bach = r;
      break;
    }
    if (!bach) bach = r;
  }
  if (bach) t.add(*bach);
  return t;
}

// --- two distinct eigenvalues ----------------------------------------------

TwoEigenState two_eigen_state(const FrameState& st) {
  if (st.fibers.size() != 2) throw ValidationError("two-eigenvalue state needs exactly two fibers");
  TwoEigenState t;
  const FiberFrame& a = st.fibers[0];
  const FiberFrame& b = st.fibers[1];
  t.X = a.xi;
  t.Y = b.xi;
  t.r1 = a.dim;
  t.r2 = b.dim;
  t.K1 = a.einstein_term().v;
  t.K2 = b.einstein_term().v;
  t.fprime = st.fp;
  t.rho = st.rho;
  t.n = st.n;
  return t;
}

TwoEigenResult two_eigen_identities(const TwoEigenState& t, double tol, double delta) {
  if (t.r1 + t.r2 != t.n - 1) throw ValidationError("multiplicities must satisfy r1 + r2 = n - 1");
  const double X = t.X.v, Y = t.Y.v;
  if (!(std::fabs(X - Y) >= delta)) throw ValidationError("eigenvalues are not distinct: |X - Y| < delta");
  const double Xp = t.X.d1;
  const double fp = t.fprime.v, rho = t.rho, K1 = t.K1, K2 = t.K2;
  const double S1 = t.r1 * X + t.r2 * Y;
  const double S2 = t.r1 * X * X + t.r2 * Y * Y;
  const double P = Xp + X * X;  // X' + X^2
  const double D = X - Y;
  const double sum = X + Y;
  const double sq = X * X + Y * Y;

  TwoEigenResult res;
  auto add = [&](const char* name, double lhs, double rhs) { res.residuals.push_back(make_residual(name, lhs - rhs, tol)); };
  add("lemma41_46", K1 - K2, D * (S1 - sum - fp));
  add("lemma41_47", K1 + K2, 2.0 * P + rho + S2 - sq);
  add("lemma41_48", K1 * X - K2 * Y, D * (P + rho + sum * (S1 - sum - fp) + X * Y));
  add("lemma41_49", -K1 * Y + K2 * X, D * (P + rho + X * Y));
  add("lemma41_410", K1 * X - K2 * Y, D * (P + S2 - sq - X * Y));
  add("lemma41_411", (K1 - K2) * sum, D * (S2 - sq - 2.0 * X * Y - rho));
  add("lemma41_412", S2 - rho, sum * (S1 - fp));
  add("lemma51_1", (t.n - 1) * X * Y + rho, fp * sum);
  add("lemma51_2", P + X * Y, 0.0);
  add("lemma51_3", X * Y * ((t.r1 - 1) * X * X + (t.r2 - 1) * Y * Y - 2.0 * X * Y - rho), 0.0);
  res.x_plus_y_nonzero = std::fabs(sum) >= delta;
  res.lemma52_guard = std::fabs((t.n - 1) * X * Y + rho) >= delta;
  return res;
}

// --- three distinct eigenvalues --------------------------------------------

SampleVerdict evaluate_obstruction_sample(ObstructionSample smp, int n, double rho, double delta,
                                          double feasibility_tol) {
  SampleVerdict v;
  if (smp.r1 + smp.r2 + smp.r3 != n - 1 || smp.r1 < 1 || smp.r2 < 1 || smp.r3 < 1) {
    throw ValidationError("multiplicities must be positive and sum to n - 1");
  }
  auto distinct = [&](const ObstructionSample& q) {
    return std::fabs(q.X - q.Y) >= delta && std::fabs(q.X - q.Z) >= delta && std::fabs(q.Y - q.Z) >= delta;
  };
  if (!distinct(smp)) {
    v.rejected = true;
    return v;
  }
  auto S2_of = [&](const ObstructionSample& q) {
    return smp.r1 * q.X * q.X + smp.r2 * q.Y * q.Y + smp.r3 * q.Z * q.Z;
  };
  if (rho > 0.0) {
    // Impose sum xi^2 = rho by scaling the sample.
    const double scale = std::sqrt(rho / S2_of(smp));
    smp.X *= scale;
    smp.Y *= scale;
    smp.Z *= scale;
    smp.Q *= scale * scale;
    if (!distinct(smp)) {
      v.rejected = true;
      return v;
    }
  }
  const double S1 = smp.r1 * smp.X + smp.r2 * smp.Y + smp.r3 * smp.Z;
  const double S2 = S2_of(smp);

  // The triple equality (X+Y)T = (X+Z)T = (Y+Z)T with T = S1 - f' reads
  // (Y-Z)T = (X-Z)T = 0; distinctness leaves T = 0 as its only solution.
  const double fprime = S1;
  v.sum_identity = std::fabs(S1 - fprime);

  // sum xi^2 - rho = (X+Y)(S1 - f'), and its s-derivative with
  // xi_i' = Q - xi_i^2 and f'' = rho + (n-1) Q.
  const double r412 = S2 - rho - (smp.X + smp.Y) * (S1 - fprime);
  const double fpp = rho + (n - 1) * smp.Q;
  const double rd = smp.r1 * (smp.Q - smp.X * smp.X) + smp.r2 * (smp.Q - smp.Y * smp.Y) +
                    smp.r3 * (smp.Q - smp.Z * smp.Z) - fpp;
  v.margin = std::max(std::fabs(r412), std::fabs(rd)) / (1.0 + std::fabs(rho));
  v.feasible = v.margin <= feasibility_tol;
  return v;
}

void ObstructionTally::add(const SampleVerdict& v) {
  ++samples;
  if (v.rejected) {
    ++rejected;
    return;
  }
  if (v.feasible) ++feasible;
  worst_margin = std::min(worst_margin, v.margin);
  max_sum_identity = std::max(max_sum_identity, v.sum_identity);
}

void ObstructionTally::merge(const ObstructionTally& o) {
  samples += o.samples;
  feasible += o.feasible;
  rejected += o.rejected;
  worst_margin = std::min(worst_margin, o.worst_margin);
  max_sum_identity = std::max(max_sum_identity, o.max_sum_identity);
}

namespace {

constexpr std::uint64_t kChunks = 16;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

ObstructionTally run_chunk(int n, double rho, std::uint64_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ObstructionTally tally;
  const double scale = 1.0 + std::sqrt(std::fabs(rho));
  const int m = n - 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    ObstructionSample smp;
    // Uniform composition of n-1 into three positive parts.
    const int cuts = (m - 1) * (m - 2) / 2;
    int pick = static_cast<int>(uniform01(rng) * cuts);
    int c1 = 1;
    while (pick >= m - 1 - c1) {
      pick -= m - 1 - c1;
      ++c1;
    }
    smp.r1 = c1;
    smp.r2 = pick + 1;
    smp.r3 = m - smp.r1 - smp.r2;
    smp.X = scale * (4.0 * uniform01(rng) - 2.0);
    smp.Y = scale * (4.0 * uniform01(rng) - 2.0);
    smp.Z = scale * (4.0 * uniform01(rng) - 2.0);
    smp.Q = scale * scale * (8.0 * uniform01(rng) - 4.0);
    tally.add(evaluate_obstruction_sample(smp, n, rho));
  }
  return tally;
}

}  // namespace

ObstructionResult three_eigen_obstruction(int n, double rho, std::uint64_t samples, std::uint64_t seed,
                                          unsigned threads) {
  if (n < 4) throw ValidationError("n must be at least 4");
  if (samples < 1) throw ValidationError("samples must be at least 1");
  if (!std::isfinite(rho)) throw ValidationError("rho must be finite");

  // Fixed chunking makes the result independent of the worker count.
  std::vector<ObstructionTally> parts(kChunks);
  auto chunk_size = [&](std::uint64_t c) { return samples / kChunks + (c < samples % kChunks ? 1 : 0); };
  auto chunk_seed = [&](std::uint64_t c) { return splitmix(seed ^ splitmix(c + 1)); };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, kChunks));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < kChunks; ++c) parts[c] = run_chunk(n, rho, chunk_size(c), chunk_seed(c));
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < kChunks; c += threads) parts[c] = run_chunk(n, rho, chunk_size(c), chunk_seed(c));
      });
    }
    for (std::thread& t : pool) t.join();
  }
  ObstructionResult out;
  out.n = n;
  out.rho = rho;
  out.seed = seed;
  for (const ObstructionTally& p : parts) out.tally.merge(p);
  return out;
}

// --- classification ----------------------------------------------------------

std::string Classification::verdict() const { return type ? std::string(to_string(*type)) : "ambiguous"; }

Classification classify(const std::vector<FrameState>& frames, double tol) {
  if (frames.size() < 16) throw ValidationError("classification needs a grid of at least 16 points");
  Classification c;
  bool harmonic = true, soliton = true;
  double max_fp = 0.0, max_f = 0.0;
  bool type_ii = frames.front().rho != 0.0;
  bool single = true;
  bool type_iii = std::fabs(frames.front().rho) <= tol;
  double R_min = INFINITY, R_max = -INFINITY;
  const int n = frames.front().n;
  const double profile = -4.0 * (n - 3.0) * (n - 3.0) / ((n - 1.0) * (n - 1.0));

  for (const FrameState& st : frames) {
    const CurvatureReport rep = curvature_report(st);
    for (double cj : rep.cotton) harmonic = harmonic && std::fabs(cj) <= tol;
    for (const Residual& r : soliton_residual(st, tol)) soliton = soliton && r.pass;
    max_fp = std::max(max_fp, std::fabs(st.fp.v));
    max_f = std::max(max_f, std::fabs(st.f.v));

    double radius = std::fabs(rep.spectrum.lambda1.v);
    for (const Jet3& l : rep.spectrum.lambda) radius = std::max(radius, std::fabs(l.v));
    const double tolE = tol * (1.0 + radius);

    if (type_ii) {
      const double rho = st.rho;
      auto in_set = [&](double l) { return std::fabs(l) <= tolE || std::fabs(l - rho) <= tolE; };
      type_ii = std::fabs(rep.spectrum.lambda1.v) <= tolE && std::fabs(st.fp.d1 - rho) <= tolE;
      for (const Jet3& l : rep.spectrum.lambda) type_ii = type_ii && in_set(l.v);
    }
    for (std::size_t a = 0; a < rep.spectrum.lambda.size(); ++a) {
      for (std::size_t b = a + 1; b < rep.spectrum.lambda.size(); ++b) {
        single = single && std::fabs(rep.spectrum.lambda[a].v - rep.spectrum.lambda[b].v) <= tolE;
      }
    }
    const double dtol = tol * (1.0 + std::fabs(st.fp.v) * radius);
    for (double d : rep.d_tensor) single = single && std::fabs(d) <= dtol;

    R_min = std::min(R_min, rep.R.v);
    R_max = std::max(R_max, rep.R.v);
    const double Rs2 = rep.R.v * st.s * st.s;
    type_iii = type_iii && std::fabs(Rs2 - profile) <= tol * (1.0 + std::fabs(Rs2));
  }
  const bool f_const = max_fp <= tol * (1.0 + max_f);
  type_iii = type_iii && (R_max - R_min) > tol * (1.0 + std::fabs(R_max));

  c.predicates["harmonic_weyl"] = harmonic;
  c.predicates["soliton"] = soliton;
  c.predicates["constant_potential"] = f_const;
  c.predicates["spectrum_0_rho"] = type_ii;
  c.predicates["single_fiber_eigenvalue_D_flat"] = single;
  c.predicates["type_iii_profile"] = type_iii;

  if (!harmonic) {
    c.type = ModelType::non_harmonic;
  } else if (!soliton) {
    c.type = ModelType::non_soliton;
  } else if (f_const) {
    c.type = ModelType::type_i_einstein;
  } else if (type_ii) {
    c.type = ModelType::type_ii;
  } else if (single) {
    c.type = ModelType::type_iv_D_flat;
  } else if (type_iii) {
    c.type = ModelType::type_iii;
  }
  return c;
}

Classification classify_entry(const SolitonSpec& spec, const std::vector<double>& grid, double tol) {
  return classify(spec_frames(spec, grid), tol);
}

Classification classify_trajectory(const Trajectory& traj, double tol) { return classify(trajectory_frames(traj), tol); }

HarmonicCurvature harmonic_curvature_check(const std::vector<FrameState>& frames, double tol) {
  HarmonicCurvature h;
  for (const FrameState& st : frames) {
    h.max_R_prime = std::max(h.max_R_prime, std::fabs(scalar_curvature(st).d1));
    for (double c : cotton_radial(st)) h.max_cotton = std::max(h.max_cotton, std::fabs(c));
  }
  h.pass = h.max_R_prime <= tol && h.max_cotton <= tol;
  return h;
}

HarmonicCurvature harmonic_curvature_check(const SolitonSpec& spec, const std::vector<double>& grid, double tol) {
  return harmonic_curvature_check(spec_frames(spec, grid), tol);
}

}  // namespace warpsol
