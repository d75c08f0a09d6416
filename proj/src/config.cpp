#include "nbl/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nbl {

namespace {

// Walks one JSON object, remembering which keys were consumed so that the
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(path_ + "." + key + ": wrong type");
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw Error(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

FieldSpec parse_field(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  FieldSpec s;
  s.amplitude = 0.0;
  r.get("type", s.type);
  if (s.type == "zero") {
  } else if (s.type == "constant") {
    r.get("value", s.value);
  } else if (s.type == "fourier") {
    r.get("constant", s.value);
    if (const Json* terms = r.child("terms")) {
      if (!terms->is_array()) throw Error(r.path("terms") + ": expected an array");
      for (std::size_t i = 0; i < terms->size(); ++i) {
        ObjectReader tr((*terms)[i], r.path("terms") + "[" + std::to_string(i) + "]");
        FourierTerm t;
        std::vector<int> k;
        std::string kind = "cos";
        tr.get("k", k);
        tr.get("amplitude", t.amplitude);
        tr.get("kind", kind);
        tr.finish();
        if (k.empty() || k.size() > static_cast<std::size_t>(kMaxDim))
          throw Error(r.path("terms") + ": wave vector needs 1 to 3 entries");
        for (std::size_t a = 0; a < k.size(); ++a) t.k[a] = k[a];
        if (kind != "cos" && kind != "sin")
          throw Error(r.path("terms") + ": kind must be 'cos' or 'sin'");
        t.sine = kind == "sin";
        s.terms.push_back(t);
      }
    }
  } else if (s.type == "random") {
    r.get("max_mode", s.max_mode);
    r.get("amplitude", s.amplitude);
    r.get("seed", s.seed);
  } else {
    throw Error(path + ".type: unknown field type '" + s.type + "'");
  }
  r.finish();
  return s;
}

Json field_json(const FieldSpec& s) {
  Json j;
  j["type"] = s.type;
  if (s.type == "constant") j["value"] = s.value;
  if (s.type == "fourier") {
    j["constant"] = s.value;
    Json terms = Json::array();
    for (const auto& t : s.terms)
      terms.push_back({{"k", {t.k[0], t.k[1], t.k[2]}},
                       {"amplitude", t.amplitude},
                       {"kind", t.sine ? "sin" : "cos"}});
    j["terms"] = terms;
  }
  if (s.type == "random") {
    j["max_mode"] = s.max_mode;
    j["amplitude"] = s.amplitude;
    j["seed"] = s.seed;
  }
  return j;
}

OneFormSpec parse_one_form(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  OneFormSpec s;
  s.amplitude = 0.0;
  r.get("type", s.type);
  if (s.type == "zero") {
  } else if (s.type == "random") {
    r.get("max_mode", s.max_mode);
    r.get("amplitude", s.amplitude);
    r.get("seed", s.seed);
  } else if (s.type == "components") {
    const Json* comps = r.child("components");
    if (!comps || !comps->is_array())
      throw Error(r.path("components") + ": expected an array of fields");
    for (std::size_t i = 0; i < comps->size(); ++i)
      s.components.push_back(
          parse_field((*comps)[i], r.path("components") + "[" + std::to_string(i) + "]"));
  } else {
    throw Error(path + ".type: unknown one-form type '" + s.type + "'");
  }
  r.finish();
  return s;
}

Json one_form_json(const OneFormSpec& s) {
  Json j;
  j["type"] = s.type;
  if (s.type == "random") {
    j["max_mode"] = s.max_mode;
    j["amplitude"] = s.amplitude;
    j["seed"] = s.seed;
  }
  if (s.type == "components") {
    Json comps = Json::array();
    for (const auto& c : s.components) comps.push_back(field_json(c));
    j["components"] = comps;
  }
  return j;
}

}  // namespace

PeriodicField FieldSpec::field(int dim) const {
  if (type == "zero") return PeriodicField::zero();
  if (type == "constant") return PeriodicField::constant(value);
  if (type == "fourier") {
    for (const auto& t : terms)
      for (int a = dim; a < kMaxDim; ++a)
        if (t.k[a] != 0) throw Error("Fourier wave vector has more entries than the dimension");
    return PeriodicField(value, terms);
  }
  if (type == "random") return PeriodicField::random(dim, max_mode, amplitude, seed);
  throw Error("unknown field type '" + type + "'");
}

PeriodicOneForm OneFormSpec::form(int dim) const {
  if (type == "zero") return PeriodicOneForm::zero(dim);
  if (type == "random") return PeriodicOneForm::random(dim, max_mode, amplitude, seed);
  if (type == "components") {
    if (static_cast<int>(components.size()) != dim)
      throw Error("beta_spec needs one component per axis");
    PeriodicOneForm f;
    for (const auto& c : components) f.components.push_back(c.field(dim));
    return f;
  }
  throw Error("unknown one-form type '" + type + "'");
}

ConnectionPtr GeometryConfig::connection() const {
  return make_connection(make_base_grid(dim, n, u_spec.field(dim)), flux_matrix(),
                         beta_spec.form(dim));
}

Model GeometryConfig::model(int m) const {
  return Model::build(dim, n, u_spec.field(dim), flux_matrix(), beta_spec.form(dim), m);
}

SolverOptions SolverConfig::options() const {
  SolverOptions o;
  o.k = k;
  o.tol = tol;
  o.seed = seed;
  return o;
}

NodalOptions NodalConfig::options(std::uint64_t seed) const {
  NodalOptions o;
  o.n_theta = n_theta;
  o.tau_relative = tau;
  o.sample_count = sample_count;
  o.seed = seed;
  return o;
}

std::vector<std::pair<int, int>> SphereConfig::resolved_pairs() const {
  if (!pairs.empty()) return pairs;
  std::vector<std::pair<int, int>> all;
  for (int N = 1; N <= 6; ++N)
    for (int m = 1; m <= N; ++m) all.emplace_back(N, m);
  return all;
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  ObjectReader top(j, "config");
  if (const Json* g = top.child("geometry")) {
    ObjectReader r(*g, "geometry");
    r.get("dim", c.geometry.dim);
    r.get("n", c.geometry.n);
    if (const Json* f = r.child("flux")) {
      if (f->is_number_integer()) {
        if (c.geometry.dim != 2) throw Error("geometry.flux: integer shorthand needs dim 2");
        const int c12 = f->get<int>();
        c.geometry.flux = {{0, c12}, {-c12, 0}};
      } else {
        r.get("flux", c.geometry.flux);
      }
    } else {
      c.geometry.flux.assign(c.geometry.dim, std::vector<int>(c.geometry.dim, 0));
      c.geometry.flux[0][1] = 1;
      c.geometry.flux[1][0] = -1;
    }
    if (const Json* u = r.child("u_spec")) c.geometry.u_spec = parse_field(*u, "geometry.u_spec");
    if (const Json* b = r.child("beta_spec"))
      c.geometry.beta_spec = parse_one_form(*b, "geometry.beta_spec");
    r.finish();
  }
  if (const Json* s = top.child("solver")) {
    ObjectReader r(*s, "solver");
    r.get("k", c.solver.k);
    r.get("tol", c.solver.tol);
    r.get("seed", c.solver.seed);
    r.get("weights", c.solver.weights);
    r.get("gap_tol", c.solver.gap_tol);
    r.finish();
  }
  if (const Json* s = top.child("nodal")) {
    ObjectReader r(*s, "nodal");
    r.get("n_theta", c.nodal.n_theta);
    r.get("tau", c.nodal.tau);
    r.get("sample_count", c.nodal.sample_count);
    r.finish();
  }
  if (const Json* s = top.child("perturb")) {
    ObjectReader r(*s, "perturb");
    auto& p = c.perturb;
    r.get("directions", p.directions);
    r.get("epsilons", p.epsilons);
    r.get("fd_epsilon", p.fd_epsilon);
    r.get("richardson_epsilon", p.richardson_epsilon);
    r.get("index", p.index);
    r.get("amplitude", p.amplitude);
    r.get("max_mode", p.max_mode);
    r.get("split_n", p.split_n);
    r.get("split_flux", p.split_flux);
    r.get("split_m", p.split_m);
    r.get("split_seeds", p.split_seeds);
    r.finish();
  }
  if (const Json* s = top.child("sphere")) {
    ObjectReader r(*s, "sphere");
    std::vector<std::vector<int>> pairs;
    r.get("pairs", pairs);
    for (const auto& p : pairs) {
      if (p.size() != 2) throw Error("sphere.pairs: each entry is [N, m]");
      c.sphere.pairs.emplace_back(p[0], p[1]);
    }
    r.get("refinements", c.sphere.refinements);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("config file '" + path + "': " + e.what());
  }
  return from_json(j);
}

Json RunConfig::to_json() const {
  Json j;
  j["geometry"] = {{"dim", geometry.dim},
                   {"n", geometry.n},
                   {"flux", geometry.flux},
                   {"u_spec", field_json(geometry.u_spec)},
                   {"beta_spec", one_form_json(geometry.beta_spec)}};
  j["solver"] = {{"k", solver.k},
                 {"tol", solver.tol},
                 {"seed", solver.seed},
                 {"weights", solver.weights},
                 {"gap_tol", solver.gap_tol}};
  j["nodal"] = {{"n_theta", nodal.n_theta}, {"tau", nodal.tau}, {"sample_count", nodal.sample_count}};
  j["perturb"] = {{"directions", perturb.directions},
                  {"epsilons", perturb.epsilons},
                  {"fd_epsilon", perturb.fd_epsilon},
                  {"richardson_epsilon", perturb.richardson_epsilon},
                  {"index", perturb.index},
                  {"amplitude", perturb.amplitude},
                  {"max_mode", perturb.max_mode},
                  {"split_n", perturb.split_n},
                  {"split_flux", perturb.split_flux},
                  {"split_m", perturb.split_m},
                  {"split_seeds", perturb.split_seeds}};
  Json pairs = Json::array();
  for (const auto& [N, m] : sphere.pairs) pairs.push_back({N, m});
  j["sphere"] = {{"pairs", pairs}, {"refinements", sphere.refinements}};
  return j;
}

void RunConfig::validate() const {
  const auto& g = geometry;
  if (g.dim != 2 && g.dim != 3) throw Error("geometry.dim must be 2 or 3");
  if (g.n < 8) throw Error("geometry.n must be at least 8");
  (void)g.flux_matrix();
  if (g.u_spec.field(g.dim).sup_bound() > kMaxConformal)
    throw Error("geometry.u_spec: sup |u| may exceed 2");
  (void)g.beta_spec.form(g.dim);
  if (solver.k < 1) throw Error("solver.k must be positive");
  if (!(solver.tol > 0.0)) throw Error("solver.tol must be positive");
  if (solver.weights.empty()) throw Error("solver.weights must not be empty");
  if (!(solver.gap_tol > 0.0)) throw Error("solver.gap_tol must be positive");
  if (nodal.n_theta < 0) throw Error("nodal.n_theta must be >= 0 (0 selects the automatic rule)");
  if (!(nodal.tau >= 0.0)) throw Error("nodal.tau must be non-negative");
  if (nodal.sample_count < 1) throw Error("nodal.sample_count must be positive");
  for (const auto& d : perturb.directions) (void)direction_from_string(d);
  for (double e : perturb.epsilons)
    if (!(e >= 0.0)) throw Error("perturb.epsilons must be non-negative");
  if (!(perturb.fd_epsilon > 0.0) || !(perturb.richardson_epsilon > 0.0))
    throw Error("perturb finite-difference steps must be positive");
  if (perturb.split_seeds < 0) throw Error("perturb.split_seeds must be >= 0");
  for (const auto& [N, m] : sphere.pairs)
    if (m < 1 || N < m) throw Error("sphere.pairs: need N >= m >= 1");
  if (sphere.refinements < 1) throw Error("sphere.refinements must be at least 1");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(to_json().dump()); }

std::string RunConfig::hash_hex() const { return hex64(hash()); }

}  // namespace nbl
