#include "warpsol/metric.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace warpsol {

using nlohmann::json;

Formula Formula::parse(std::string_view text) { return {std::string(text), parse_expr(text)}; }

std::string_view to_string(ModelType t) {
  switch (t) {
    case ModelType::type_i_einstein:
      return "type_i_einstein";
    case ModelType::type_ii:
      return "type_ii";
    case ModelType::type_iii:
      return "type_iii";
    case ModelType::type_iv_D_flat:
      return "type_iv_D_flat";
    case ModelType::non_soliton:
      return "non_soliton";
    case ModelType::non_harmonic:
      return "non_harmonic";
  }
  return "unknown";
}

std::vector<double> uniform_grid(const Domain& d, int n) {
  if (n < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] = d.lo + (d.hi - d.lo) * i / (n - 1);
  }
  grid.back() = d.hi;
  return grid;
}

SolitonSpec build_metric(SolitonSpec spec) {
  if (spec.n < 4) throw ValidationError("dimension n must be at least 4");
  if (spec.fibers.empty()) throw ValidationError("at least one fiber is required");
  int total = 1;
  for (std::size_t j = 0; j < spec.fibers.size(); ++j) {
    const FiberSpec& fiber = spec.fibers[j];
    if (fiber.dim < 1) throw ValidationError("fiber " + std::to_string(j + 1) + " has dim < 1");
    if (fiber.dim == 1 && fiber.k != 0.0) {
      throw ValidationError("fiber " + std::to_string(j + 1) + " is 1-dimensional and must have k = 0");
    }
    if (!std::isfinite(fiber.k)) throw ValidationError("fiber " + std::to_string(j + 1) + " has non-finite k");
    total += fiber.dim;
  }
  if (total != spec.n) {
    throw ValidationError("dimension mismatch: 1 + sum of fiber dims = " + std::to_string(total) +
                          " but n = " + std::to_string(spec.n));
  }
  if (spec.warps.size() != spec.fibers.size()) {
    throw ValidationError("expected one warp per fiber (" + std::to_string(spec.fibers.size()) + "), got " +
                          std::to_string(spec.warps.size()));
  }
  if (!std::isfinite(spec.rho)) throw ValidationError("rho must be finite");
  if (!(std::isfinite(spec.domain.lo) && std::isfinite(spec.domain.hi)) || !(spec.domain.lo < spec.domain.hi)) {
    throw ValidationError("empty domain: need s0 < s1");
  }

  for (double s : uniform_grid(spec.domain, 256)) {
    for (std::size_t j = 0; j < spec.warps.size(); ++j) {
      double h = 0.0;
      try {
        h = jet_eval(spec.warps[j].expr, s).v;
      } catch (const DomainError& e) {
        throw ValidationError("warp " + std::to_string(j + 1) + " undefined at s = " + std::to_string(s) + ": " +
                              e.what());
      }
      if (!(h > 0.0) || !std::isfinite(h)) {
        throw ValidationError("warp " + std::to_string(j + 1) + " is not positive at s = " + std::to_string(s));
      }
    }
    try {
      if (!jet_eval(spec.potential.expr, s).finite()) throw DomainError("non-finite value");
    } catch (const DomainError& e) {
      throw ValidationError("potential undefined at s = " + std::to_string(s) + ": " + e.what());
    }
  }
  return spec;
}

namespace {

std::string literal(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", std::fabs(x));
  return std::signbit(x) && x != 0.0 ? std::string("(-") + buf + ")" : std::string(buf);
}

std::string fraction(long num, long den) {
  const long g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (den == 1) return std::to_string(num);
  return "(" + std::to_string(num) + "/" + std::to_string(den) + ")";
}

std::string quadratic_potential(double rho) { return literal(rho / 2.0) + "*s^2"; }

void require_n(const CatalogId& id) {
  if (id.n < 4) throw ValidationError(std::string(to_string(id.kind)) + " requires n >= 4");
}

}  // namespace

CatalogKind catalog_kind_from_string(std::string_view name) {
  if (name == "gaussian") return CatalogKind::gaussian;
  if (name == "einstein_product") return CatalogKind::einstein_product;
  if (name == "type_ii") return CatalogKind::type_ii;
  if (name == "type_iii") return CatalogKind::type_iii;
  if (name == "round_cone") return CatalogKind::round_cone;
  if (name == "custom") return CatalogKind::custom;
  throw ValidationError("unknown catalog id '" + std::string(name) + "'");
}

std::string_view to_string(CatalogKind kind) {
  switch (kind) {
    case CatalogKind::gaussian:
      return "gaussian";
    case CatalogKind::einstein_product:
      return "einstein_product";
    case CatalogKind::type_ii:
      return "type_ii";
    case CatalogKind::type_iii:
      return "type_iii";
    case CatalogKind::round_cone:
      return "round_cone";
    case CatalogKind::custom:
      return "custom";
  }
  return "unknown";
}

SolitonSpec catalog_entry(const CatalogId& id) {
  SolitonSpec spec;
  spec.n = id.n;
  spec.rho = id.rho;
  const int n = id.n;

  switch (id.kind) {
    case CatalogKind::gaussian:
      require_n(id);
      if (id.rho == 0.0) throw ValidationError("gaussian requires rho != 0");
      spec.fibers = {{n - 1, 1.0, true}};
      spec.warps = {Formula::parse("s")};
      spec.potential = Formula::parse(quadratic_potential(id.rho));
      break;

    case CatalogKind::einstein_product:
      require_n(id);
      // R x N^{n-1} with Ric(N) = rho; the potential lives on the line.
      spec.fibers = {{n - 1, id.rho / (n - 2), true}};
      spec.warps = {Formula::parse("1")};
      spec.potential = Formula::parse(id.rho != 0.0 ? quadratic_potential(id.rho) : "0");
      break;

    case CatalogKind::type_ii: {
      require_n(id);
      if (id.rho == 0.0) throw ValidationError("type_ii requires rho != 0");
      const int r = id.r;
      if (r < 1 || r > n - 3) {
        throw ValidationError("type_ii requires 1 <= r <= n-3 (Einstein factor N^{n-r-1} of dim >= 2)");
      }
      const int einstein_dim = n - r - 1;
      spec.fibers = {{r, r == 1 ? 0.0 : 1.0, true}, {einstein_dim, id.rho / (einstein_dim - 1), true}};
      spec.warps = {Formula::parse("s"), Formula::parse("1")};
      spec.potential = Formula::parse(quadratic_potential(id.rho));
      break;
    }

    case CatalogKind::type_iii:
      require_n(id);
      if (n == 5) throw ValidationError("type_iii requires n≠5 (the two warping exponents coincide)");
      if (id.rho != 0.0) throw ValidationError("type_iii is steady: rho must be 0");
      spec.fibers = {{1, 0.0, true}, {n - 2, 0.0, true}};
      spec.warps = {Formula::parse("s^" + fraction(n - 3, n - 1)), Formula::parse("s^" + fraction(2, n - 1))};
      spec.potential = Formula::parse(fraction(2L * (n - 3), n - 1) + "*log(s)");
      break;

    case CatalogKind::round_cone: {
      require_n(id);
      spec.fibers = {{n - 1, 1.0, true}};
      if (id.rho == 0.0) {
        spec.warps = {Formula::parse("s")};
      } else if (id.rho < 0.0) {
        const std::string a = literal(std::sqrt(-id.rho / (n - 1)));
        spec.warps = {Formula::parse("(exp(" + a + "*s)-exp(-" + a + "*s))/(2*" + a + ")")};
      } else {
        throw ValidationError("round_cone needs rho <= 0 (the sphere needs trigonometric warps)");
      }
      spec.potential = Formula::parse("0");
      break;
    }

    case CatalogKind::custom:
      throw ValidationError("custom models have no catalog entry; supply a spec file");
  }
  return build_metric(std::move(spec));
}

ModelType declared_type(const CatalogId& id) {
  switch (id.kind) {
    case CatalogKind::gaussian:
    case CatalogKind::type_ii:
      return ModelType::type_ii;
    case CatalogKind::einstein_product:
      return id.rho != 0.0 ? ModelType::type_ii : ModelType::type_i_einstein;
    case CatalogKind::type_iii:
      return ModelType::type_iii;
    case CatalogKind::round_cone:
      return ModelType::type_i_einstein;
    case CatalogKind::custom:
      break;
  }
  throw ValidationError("custom models have no declared type");
}

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("spec file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("spec file: field '") + key + "' has the wrong type");
  }
}

}  // namespace

SpecDocument spec_from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ValidationError("spec file: top level must be an object");

  SpecDocument doc;
  SolitonSpec& spec = doc.spec;
  spec.n = field<int>(j, "n");
  spec.rho = field<double>(j, "rho");
  if (j.contains("domain")) {
    const auto d = field<std::vector<double>>(j, "domain");
    if (d.size() != 2) throw ValidationError("spec file: domain must be [s0, s1]");
    spec.domain = {d[0], d[1]};
  }
  const json& fibers = j.contains("fibers") ? j.at("fibers") : json();
  if (!fibers.is_array()) throw ValidationError("spec file: 'fibers' must be an array");
  for (const json& f : fibers) {
    FiberSpec fiber;
    fiber.dim = field<int>(f, "dim");
    fiber.k = field<double>(f, "k");
    if (f.contains("space_form")) fiber.space_form = field<bool>(f, "space_form");
    spec.fibers.push_back(fiber);
  }

  if (j.contains("warps") || j.contains("potential")) {
    for (const auto& w : field<std::vector<std::string>>(j, "warps")) spec.warps.push_back(Formula::parse(w));
    spec.potential = Formula::parse(field<std::string>(j, "potential"));
    doc.has_closed_form = true;
  }

  if (j.contains("initial")) {
    const json& init = j.at("initial");
    InitialData data;
    if (init.contains("s0")) data.s0 = field<double>(init, "s0");
    data.h = field<std::vector<double>>(init, "h");
    data.w = field<std::vector<double>>(init, "w");
    data.f = field<double>(init, "f");
    data.fprime = field<double>(init, "fprime");
    doc.initial = std::move(data);
  }
  return doc;
}

SpecDocument load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return spec_from_json_text(buffer.str());
}

std::string spec_to_json_text(const SolitonSpec& spec) {
  json j;
  j["n"] = spec.n;
  j["rho"] = spec.rho;
  j["domain"] = {spec.domain.lo, spec.domain.hi};
  j["fibers"] = json::array();
  for (const FiberSpec& f : spec.fibers) j["fibers"].push_back({{"dim", f.dim}, {"k", f.k}, {"space_form", f.space_form}});
  j["warps"] = json::array();
  for (const Formula& w : spec.warps) j["warps"].push_back(w.text);
  j["potential"] = spec.potential.text;
  return j.dump(2) + "\n";
}

}  // namespace warpsol
