#include "mfglab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mfglab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokenize(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number '" + s + "'");
  }
}

long to_long(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse integer '" + s + "'");
  }
}

}  // namespace

FourierFn parse_fourier_fn(const std::string& text, int d) {
  auto toks = tokenize(text);
  if (toks.empty()) throw ConfigError("function spec: empty");
  double c0 = 0.0;
  std::vector<FourierFn::Term> terms;
  std::size_t i = 0;
  while (i < toks.size()) {
    const std::string& kind = toks[i];
    if (kind == "const") {
      if (i + 1 >= toks.size()) throw ConfigError("function spec: const needs a value");
      c0 += to_double(toks[i + 1], "function spec");
      i += 2;
    } else if (kind == "cos" || kind == "sin") {
      std::size_t need = static_cast<std::size_t>(d) + 1;
      if (i + need >= toks.size())
        throw ConfigError("function spec: " + kind + " needs " + std::to_string(d) +
                          " wavenumbers and an amplitude");
      std::array<int, 2> k{0, 0};
      for (int a = 0; a < d; ++a)
        k[a] = static_cast<int>(to_long(toks[i + 1 + a], "function spec"));
      double amp = to_double(toks[i + d + 1], "function spec");
      terms.push_back({kind == "sin", k, amp});
      i += need + 1;
    } else {
      throw ConfigError("function spec: unknown token '" + kind +
                        "' (expected const/cos/sin)");
    }
  }
  return FourierFn(d, c0, std::move(terms));
}

namespace {

struct RawEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<RawEntry> read_entries(const std::string& text, const std::string& origin) {
  std::vector<RawEntry> entries;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    RawEntry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    entries.push_back(std::move(e));
  }
  return entries;
}

bool key_is(const std::string& key, const std::string& base) {
  if (key == base) return true;
  if (key.size() > base.size() && key.compare(0, base.size(), base) == 0)
    return std::all_of(key.begin() + base.size(), key.end(), ::isdigit);
  return false;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.a_fn = FourierFn::constant_fn(cfg.d, 1.0);
  cfg.v_fn = FourierFn::constant_fn(cfg.d, 0.0);
  cfg.m0_fn = FourierFn::constant_fn(cfg.d, 1.0);
  cfg.uT_fn = FourierFn::constant_fn(cfg.d, 0.0);

  auto entries = read_entries(text, origin);

  // d first: function specs need the dimension.
  for (const auto& e : entries)
    if (e.section == "problem" && e.key == "d")
      cfg.d = static_cast<int>(to_long(e.value, origin + ":" + std::to_string(e.line)));

  bool have_a = false, have_v = false, have_m0 = false, have_ut = false;
  for (const auto& e : entries) {
    const std::string where = origin + ":" + std::to_string(e.line) + " [" + e.section + "] " +
                              e.key;
    auto num = [&] { return to_double(e.value, where); };
    auto integer = [&] { return to_long(e.value, where); };
    auto list = [&] {
      std::vector<double> out;
      for (const auto& t : tokenize(e.value)) out.push_back(to_double(t, where));
      return out;
    };

    if (e.section == "problem") {
      if (e.key == "d") continue;  // handled above
      else if (e.key == "n") cfg.n = static_cast<int>(integer());
      else if (e.key == "nt") cfg.nt = static_cast<int>(integer());
      else if (e.key == "T") cfg.T = num();
      else if (e.key == "gamma") cfg.gamma = num();
      else if (e.key == "eps") cfg.eps = num();
      else if (e.key == "eps_schedule") cfg.eps_schedule = list();
      else if (e.key == "a") { cfg.a_fn = parse_fourier_fn(e.value, cfg.d); have_a = true; }
      else if (e.key == "V") { cfg.v_fn = parse_fourier_fn(e.value, cfg.d); have_v = true; }
      else if (e.key == "m0") { cfg.m0_fn = parse_fourier_fn(e.value, cfg.d); have_m0 = true; }
      else if (e.key == "uT") { cfg.uT_fn = parse_fourier_fn(e.value, cfg.d); have_ut = true; }
      else throw ConfigError(where + ": unknown key");
    } else if (e.section == "solver") {
      if (e.key == "omega") cfg.omega = num();
      else if (e.key == "tol") cfg.tol = num();
      else if (e.key == "max_iter") cfg.max_iter = static_cast<int>(integer());
      else if (e.key == "alpha") {
        if (e.value == "auto") cfg.alpha_fixed = -1.0;
        else cfg.alpha_fixed = num();
      } else if (e.key == "alpha_margin") cfg.alpha_margin = num();
      else if (e.key == "lin_tol") cfg.lin_tol = num();
      else throw ConfigError(where + ": unknown key");
    } else if (e.section == "harness") {
      if (e.key == "p") cfg.p = num();
      else if (e.key == "q") cfg.q = num();
      else if (e.key == "nu") cfg.nu = num();
      else if (e.key == "x0") {
        if (e.value == "auto") cfg.x0.reset();
        else {
          auto v = list();
          if (static_cast<int>(v.size()) != cfg.d)
            throw ConfigError(where + ": x0 needs " + std::to_string(cfg.d) + " coordinates");
          cfg.x0 = Point{v[0], v.size() > 1 ? v[1] : 0.0};
        }
      } else if (e.key == "mollify") {
        cfg.mollify_cells = static_cast<int>(integer());
      } else if (e.key == "tau") {
        cfg.tau_levels.clear();
        for (const auto& t : tokenize(e.value))
          cfg.tau_levels.push_back(static_cast<int>(to_long(t, where)));
        if (cfg.tau_levels.empty()) throw ConfigError(where + ": tau list empty");
      } else throw ConfigError(where + ": unknown key");
    } else if (e.section == "mms") {
      if (e.key == "levels") cfg.mms_levels = static_cast<int>(integer());
      else if (e.key == "base_n") cfg.mms_base_n = static_cast<int>(integer());
      else if (e.key == "base_nt") cfg.mms_base_nt = static_cast<int>(integer());
      else throw ConfigError(where + ": unknown key");
    } else if (e.section == "particles") {
      if (e.key == "N") cfg.particles_N = static_cast<std::uint32_t>(integer());
      else if (e.key == "seed") cfg.particles_seed = static_cast<std::uint64_t>(integer());
      else if (e.key == "snapshots") cfg.snapshot_fractions = list();
      else if (e.key == "bucket") {
        auto v = list();
        if (v.size() != 2) throw ConfigError(where + ": bucket needs lo hi");
        cfg.bucket_lo = v[0];
        cfg.bucket_hi = v[1];
      } else throw ConfigError(where + ": unknown key");
    } else if (e.section == "exponents") {
      auto toks = tokenize(e.value);
      if (key_is(e.key, "witness_a")) {
        if (toks.size() != 4) throw ConfigError(where + ": expected 'd q b lam'");
        RunConfig::WitnessAQuery qq;
        qq.d = static_cast<int>(to_long(toks[0], where));
        qq.q = parse_fraction(toks[1]);
        qq.b = parse_fraction(toks[2]);
        qq.lam = parse_fraction(toks[3]);
        cfg.witness_a_queries.push_back(std::move(qq));
      } else if (key_is(e.key, "witness_b")) {
        if (toks.size() != 3) throw ConfigError(where + ": expected 'd lam p'");
        RunConfig::WitnessBQuery qq;
        qq.d = static_cast<int>(to_long(toks[0], where));
        qq.lam = parse_fraction(toks[1]);
        qq.p = parse_fraction(toks[2]);
        cfg.witness_b_queries.push_back(std::move(qq));
      } else throw ConfigError(where + ": unknown key");
    } else if (e.section == "output") {
      if (e.key == "dir") cfg.out_dir = e.value;
      else if (e.key == "write_fields") {
        if (e.value == "true") cfg.write_fields = true;
        else if (e.value == "false") cfg.write_fields = false;
        else throw ConfigError(where + ": expected true/false");
      } else throw ConfigError(where + ": unknown key");
    } else {
      throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown section [" +
                        e.section + "]");
    }
  }

  // Re-parse function specs if d changed after defaults were built.
  if (!have_a) cfg.a_fn = FourierFn::constant_fn(cfg.d, 1.0);
  if (!have_v) cfg.v_fn = FourierFn::constant_fn(cfg.d, 0.0);
  if (!have_m0) cfg.m0_fn = FourierFn::constant_fn(cfg.d, 1.0);
  if (!have_ut) cfg.uT_fn = FourierFn::constant_fn(cfg.d, 0.0);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str(), path);
}

GridSpec RunConfig::make_grid() const { return GridSpec(d, n, nt, T); }

HamiltonianParams RunConfig::make_params() const { return HamiltonianParams(a_fn, v_fn, gamma); }

MFGProblem RunConfig::make_problem() const {
  GridSpec g = make_grid();
  MFGProblem p{g, make_params(), m0_fn.sample(g), uT_fn.sample(g), eps};
  p.validate();
  return p;
}

PicardOptions RunConfig::make_picard_options() const {
  PicardOptions o;
  o.omega = omega;
  o.tol = tol;
  o.max_iter = max_iter;
  o.lin_tol = lin_tol;
  o.alpha_fixed = alpha_fixed;
  o.alpha_margin = alpha_margin;
  o.validate();
  return o;
}

HarnessOptions RunConfig::make_harness_options() const {
  HarnessOptions h;
  h.p = p;
  h.q = q;
  h.nu = nu;
  h.x0 = x0;
  h.taus = tau_levels;
  h.mollify_cells = mollify_cells;
  return h;
}

}  // namespace mfglab
