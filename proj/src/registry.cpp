#include "carnot/registry.hpp"

#include <dlfcn.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <sstream>

#include "carnot/algebra_io.hpp"

namespace carnot {

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::logic_error&) {
      throw InvalidArgument("malformed number '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw InvalidArgument("malformed number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

Point parse_point(const std::string& text, const GradedAlgebra& alg) {
  auto v = parse_numbers(text);
  if (static_cast<int>(v.size()) != alg.dim()) {
    throw InvalidArgument("point '" + text + "' needs " + std::to_string(alg.dim()) + " coordinates for " + alg.name());
  }
  return Point(alg, std::move(v));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool is_h1(const GradedAlgebra& alg) {
  if (alg.dim() != 3 || alg.step() != 2 || alg.layer_dim(1) != 2) return false;
  const auto s = alg.structure();
  return s.size() == 1 && s[0].i == 0 && s[0].j == 1 && s[0].k == 2 && s[0].value == 1;
}

MapUnderTest skeleton(const std::string& id, const HomogeneousNorm& source, HomogeneousNorm target, double L) {
  return MapUnderTest{id, source, std::move(target), DomainSet::full(source), nullptr, nullptr, L, true};
}

HomogeneousNorm real_line(const NormFactory& target_norm) { return target_norm(build_abelian(1)); }

struct Plugin {
  void* handle = nullptr;
  int (*eval)(const double*, int, double*, int) = nullptr;
  ~Plugin() {
    if (handle) dlclose(handle);
  }
};

std::string resolve_plugin(const std::string& name) {
  if (name.find('/') != std::string::npos || name.ends_with(".so")) return name;
  const char* dirs = std::getenv("CARNOT_PLUGIN_PATH");
  if (dirs) {
    for (const auto& dir : split(dirs, ':')) {
      for (const auto& file : {"lib" + name + ".so", name + ".so"}) {
        const auto path = std::filesystem::path(dir) / file;
        if (std::filesystem::exists(path)) return path.string();
      }
    }
  }
  throw ConfigError("plugin '" + name + "' not found (set CARNOT_PLUGIN_PATH or give a path)");
}

MapUnderTest plugin_map(const std::string& id, const std::string& name, const HomogeneousNorm& source,
                        const NormFactory& target_norm) {
  const std::string path = resolve_plugin(name);
  auto plugin = std::make_shared<Plugin>();
  plugin->handle = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
  if (!plugin->handle) throw ConfigError("cannot load plugin '" + path + "': " + dlerror());
  auto version = reinterpret_cast<int (*)()>(dlsym(plugin->handle, "carnot_map_abi_version"));
  auto target_fn = reinterpret_cast<const char* (*)()>(dlsym(plugin->handle, "carnot_map_target"));
  plugin->eval = reinterpret_cast<int (*)(const double*, int, double*, int)>(dlsym(plugin->handle, "carnot_map_eval"));
  auto lip = reinterpret_cast<double (*)()>(dlsym(plugin->handle, "carnot_map_lipschitz"));
  if (!version || !target_fn || !plugin->eval) throw ConfigError("plugin '" + path + "' does not export the map interface");
  if (version() != 1) throw ConfigError("plugin '" + path + "' has unsupported ABI version " + std::to_string(version()));
  const char* target_name = target_fn();
  HomogeneousNorm target = target_name ? target_norm(builtin_algebra(target_name)) : source;
  MapUnderTest f = skeleton(id, source, target, 0.0);
  const AlgebraPtr tgt = f.target.algebra;
  f.eval = [plugin, tgt](const Point& x) {
    Point out(*tgt);
    if (plugin->eval(x.coords().data(), static_cast<int>(x.size()), out.mutable_coords().data(), tgt->dim()) != 0) {
      throw Error("plugin evaluation failed");
    }
    return out;
  };
  if (lip) {
    f.lipschitz = lip();
    f.lipschitz_supplied = true;
  } else {
    f.lipschitz = estimate_lipschitz(f, 10000, 0x4C1F);
    f.lipschitz_supplied = false;
  }
  return f;
}

}  // namespace

std::vector<std::string> builtin_map_ids() {
  return {"proj-x", "swap-h1", "left-translate:<coords>", "right-translate:<coords>", "corner-max", "dilation:<r>",
          "smooth-h1r", "custom:<plugin>"};
}

MapUnderTest make_map(const std::string& id, const HomogeneousNorm& source, const NormFactory& target_norm) {
  const AlgebraPtr g = source.algebra;
  const auto colon = id.find(':');
  const std::string head = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
  const bool has_arg = colon != std::string::npos;

  if (head == "proj-x" && !has_arg) {
    MapUnderTest f = skeleton(id, source, real_line(target_norm), 1.0);
    const AlgebraPtr r = f.target.algebra;
    f.eval = [r](const Point& x) { return Point(*r, {x[0]}); };
    f.exact_eval = [r](const ExactElement& x) { return ExactElement(*r, {x[0]}); };
    return f;
  }
  if (head == "swap-h1" && !has_arg) {
    if (!is_h1(*g)) throw ConfigError("map 'swap-h1' needs the source algebra h1, got " + g->name());
    MapUnderTest f = skeleton(id, source, source, 1.0);
    f.eval = [g](const Point& x) { return Point(*g, {x[1], x[0], -x[2]}); };
    f.exact_eval = [g](const ExactElement& x) { return ExactElement(*g, {x[1], x[0], Rational(-x[2])}); };
    return f;
  }
  if ((head == "left-translate" || head == "right-translate") && has_arg) {
    const Point c = parse_point(arg, *g);
    const ExactElement ce = to_exact(c);
    const bool left = head == "left-translate";
    // Right translations are not Lipschitz; the supplied constant is only a tolerance scale.
    MapUnderTest f = skeleton(id, source, source, 1.0);
    f.eval = [g, c, left](const Point& x) { return left ? group_product(*g, c, x) : group_product(*g, x, c); };
    f.exact_eval = [g, ce, left](const ExactElement& x) { return left ? group_product(*g, ce, x) : group_product(*g, x, ce); };
    return f;
  }
  if (head == "corner-max" && !has_arg) {
    if (g->layer_dim(1) < 2) throw ConfigError("map 'corner-max' needs at least two horizontal coordinates");
    MapUnderTest f = skeleton(id, source, real_line(target_norm), 1.0);
    const AlgebraPtr r = f.target.algebra;
    f.eval = [r](const Point& x) { return Point(*r, {std::max(x[0], x[1])}); };
    f.exact_eval = [r](const ExactElement& x) { return ExactElement(*r, {x[0] > x[1] ? x[0] : x[1]}); };
    return f;
  }
  if (head == "dilation" && has_arg) {
    const auto v = parse_numbers(arg);
    if (v.size() != 1 || !(v[0] > 0.0)) throw ConfigError("map 'dilation' needs a positive factor, got '" + arg + "'");
    const double rd = v[0];
    const Rational re = exact_from_double(rd);
    MapUnderTest f = skeleton(id, source, source, rd);
    f.eval = [g, rd](const Point& x) { return dilate(*g, rd, x); };
    f.exact_eval = [g, re](const ExactElement& x) { return dilate(*g, re, x); };
    return f;
  }
  if (head == "smooth-h1r" && !has_arg) {
    if (g->layer_dim(1) < 2) throw ConfigError("map 'smooth-h1r' needs at least two horizontal coordinates");
    MapUnderTest f = skeleton(id, source, real_line(target_norm), std::sqrt(1.25));
    const AlgebraPtr r = f.target.algebra;
    f.eval = [r](const Point& x) { return Point(*r, {std::sin(x[0]) + 0.5 * std::cos(x[1])}); };
    return f;
  }
  if (head == "custom" && has_arg && !arg.empty()) return plugin_map(id, arg, source, target_norm);
  throw ConfigError("unknown map id '" + id + "'");
}

HoleFamilySpec probe_hole_family(const HomogeneousNorm& norm, int levels) {
  const auto& alg = *norm.algebra;
  return dyadic_hole_family(norm, {Point(alg)}, basis_vector<double>(alg, 0), 0, levels, 0.125, 1.0);
}

HoleFamilySpec porous_grid_family(const HomogeneousNorm& norm, int levels) {
  const auto& alg = *norm.algebra;
  return dyadic_hole_family(norm, grid_anchors(alg, 3.0, 1), basis_vector<double>(alg, 0), 1, levels, 0.125, 1.0);
}

HoleFamilySpec density_hole_family(const HomogeneousNorm& norm, int levels) {
  const auto& alg = *norm.algebra;
  return dyadic_hole_family(norm, {Point(alg)}, basis_vector<double>(alg, 0), 1, levels, 0.125, 2.0);
}

DomainSet parse_domain(const std::string& descriptor, const HomogeneousNorm& norm) {
  const auto& alg = *norm.algebra;
  const auto parts = split(descriptor, ':');
  const std::string& head = parts[0];
  auto bad = [&](const std::string& why) { return ConfigError("domain '" + descriptor + "': " + why); };
  if (head == "full" && parts.size() == 1) return DomainSet::full(norm);
  if (head == "probe-holes" && parts.size() == 1) return DomainSet::hole_family(norm, probe_hole_family(norm));
  if (head == "porous-grid" && parts.size() == 1) return DomainSet::hole_family(norm, porous_grid_family(norm));
  if (head == "density-holes" && parts.size() == 1) return DomainSet::hole_family(norm, density_hole_family(norm));
  if (head == "halfspace") {
    if (parts.size() != 3) throw bad("expected halfspace:<normal>:<offset>");
    auto n = parse_numbers(parts[1]);
    auto c = parse_numbers(parts[2]);
    if (c.size() != 1) throw bad("offset must be one number");
    return DomainSet::halfspace(norm, std::move(n), c[0]);
  }
  if (head == "dyadic-holes") {
    if (parts.size() != 5) throw bad("expected dyadic-holes:<anchor>:<lo>-<hi>:<power>:<coeff>");
    const Point anchor = parse_point(parts[1], alg);
    const auto levels = split(parts[2], '-');
    if (levels.size() != 2) throw bad("levels must be <lo>-<hi>");
    int lo = 0, hi = 0;
    try {
      lo = std::stoi(levels[0]);
      hi = std::stoi(levels[1]);
    } catch (const std::logic_error&) {
      throw bad("levels must be integers");
    }
    const auto power = parse_numbers(parts[3]);
    const auto coeff = parse_numbers(parts[4]);
    if (power.size() != 1 || coeff.size() != 1) throw bad("power and coefficient must be numbers");
    return DomainSet::hole_family(norm, dyadic_hole_family(norm, {anchor}, basis_vector<double>(alg, 0), lo, hi, coeff[0], power[0]));
  }
  if (head == "mask") {
    ProductMaskSpec spec;
    spec.excluded.resize(static_cast<std::size_t>(alg.dim()));
    for (const auto& item : split(descriptor.substr(5), ';')) {
      const auto f = split(item, ':');
      if (f.size() != 3) throw bad("expected mask:<i>:<lo>:<hi>");
      const auto i = parse_numbers(f[0]);
      const auto lo = parse_numbers(f[1]);
      const auto hi = parse_numbers(f[2]);
      if (i.size() != 1 || lo.size() != 1 || hi.size() != 1) throw bad("expected mask:<i>:<lo>:<hi>");
      const int idx = static_cast<int>(i[0]);
      if (idx < 0 || idx >= alg.dim() || idx != i[0]) throw bad("coordinate index out of range");
      spec.excluded[static_cast<std::size_t>(idx)].push_back({lo[0], hi[0]});
    }
    return DomainSet::product_mask(norm, std::move(spec));
  }
  if (head == "dyadic-mask") {
    if (parts.size() != 3) throw bad("expected dyadic-mask:<i>:<levels>");
    const auto i = parse_numbers(parts[1]);
    const auto levels = parse_numbers(parts[2]);
    if (i.size() != 1 || levels.size() != 1 || i[0] < 0 || i[0] >= alg.dim() || levels[0] < 1) throw bad("bad index or level count");
    ProductMaskSpec spec;
    spec.excluded.resize(static_cast<std::size_t>(alg.dim()));
    for (int k = 1; k <= static_cast<int>(levels[0]); ++k) {
      const double a = std::ldexp(1.0, -k);
      spec.excluded[static_cast<std::size_t>(i[0])].push_back({a, a + std::ldexp(1.0, -2 * k)});
    }
    return DomainSet::product_mask(norm, std::move(spec));
  }
  throw bad("unknown descriptor");
}

}  // namespace carnot
