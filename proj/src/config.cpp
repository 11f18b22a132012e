#include "mflab/config.hpp"
#include "mflab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mflab {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, where + ": " + what);
}

double parse_double(const std::string& where, const std::string& s) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) fail(where, "trailing characters in number '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(where, "bad number '" + s + "'");
  }
}

long parse_long(const std::string& where, const std::string& s) {
  try {
    size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) fail(where, "trailing characters in integer '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(where, "bad integer '" + s + "'");
  }
}

// "1.5", "-2i", "1+0.5i", "0.3-2e-3i"
Complex parse_complex(const std::string& where, const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) fail(where, "empty coefficient");
  if (s.back() != 'i') return Complex(parse_double(where, s), 0.0);
  s.pop_back();
  // Split at the last +/- that is not an exponent sign and not leading.
  size_t split = std::string::npos;
  for (size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) {
    if (s.empty() || s == "+" || s == "-") s += "1";
    return Complex(0.0, parse_double(where, s));
  }
  std::string im = s.substr(split);
  if (im == "+" || im == "-") im += "1";
  return Complex(parse_double(where, s.substr(0, split)), parse_double(where, im));
}

IntVector parse_offset(const std::string& where, const std::string& tok, int dim) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : tok) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (static_cast<int>(parts.size()) != dim)
    fail(where, "offset '" + tok + "' has " + std::to_string(parts.size()) + " coordinates, want " +
                    std::to_string(dim));
  IntVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = static_cast<int>(parse_long(where, trim(parts[i])));
  return v;
}

// `a(off,spin)` / `adag(off,spin)` sequences.
std::vector<GeneratorFactor> parse_monomial(const std::string& where, const std::string& s,
                                            int dim) {
  std::vector<GeneratorFactor> factors;
  size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    GeneratorFactor f;
    if (s.compare(i, 4, "adag") == 0) {
      f.dagger = true;
      i += 4;
    } else if (s[i] == 'a') {
      i += 1;
    } else {
      fail(where, "expected a(...) or adag(...) at '" + s.substr(i) + "'");
    }
    if (i >= s.size() || s[i] != '(') fail(where, "expected '(' in generator");
    size_t close = s.find(')', i);
    if (close == std::string::npos) fail(where, "missing ')' in generator");
    std::string inside = s.substr(i + 1, close - i - 1);
    size_t comma = inside.rfind(',');
    if (comma == std::string::npos) fail(where, "generator needs 'offset,spin'");
    std::string off = trim(inside.substr(0, comma));
    f.spin = trim(inside.substr(comma + 1));
    if (f.spin.empty()) fail(where, "empty spin label");
    // multi-dimensional offsets within a generator are space separated
    std::string normalized;
    for (char c : off) normalized += (c == ' ') ? ',' : c;
    f.offset = parse_offset(where, normalized, dim);
    factors.push_back(std::move(f));
    i = close + 1;
  }
  if (factors.empty()) fail(where, "empty monomial");
  return factors;
}

// `anchor <offsets> : <coeff> : <monomial>`
void parse_anchor_line(const std::string& where, const std::string& line, int dim,
                       Interaction& into) {
  size_t c1 = line.find(':');
  if (c1 == std::string::npos) fail(where, "anchor line needs 'offsets : coeff : monomial'");
  size_t c2 = line.find(':', c1 + 1);
  if (c2 == std::string::npos) fail(where, "anchor line needs a second ':'");
  std::vector<IntVector> support;
  for (const auto& tok : split_ws(trim(line.substr(0, c1))))
    support.push_back(parse_offset(where, tok, dim));
  InteractionMonomial mono;
  mono.coeff = parse_complex(where, trim(line.substr(c1 + 1, c2 - c1 - 1)));
  mono.factors = parse_monomial(where, trim(line.substr(c2 + 1)), dim);
  into.add_anchor(std::move(support), {std::move(mono)});
}

}  // namespace

std::string apply_override(const std::string& text, const std::string& override_kv) {
  size_t eq = override_kv.find('=');
  size_t dot = override_kv.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    fail("--set", "expected section.key=value, got '" + override_kv + "'");
  std::string section = override_kv.substr(0, dot);
  std::string key = override_kv.substr(dot + 1, eq - dot - 1);
  std::string value = override_kv.substr(eq + 1);

  std::istringstream in(text);
  std::ostringstream out;
  std::string line, current;
  bool replaced = false;
  std::vector<std::string> pending;
  auto flush_section = [&](const std::string& ending) {
    if (!replaced && current == section) {
      out << key << " = " << value << "\n";
      replaced = true;
    }
    out << ending;
  };
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty() && t.front() == '[' && t.back() == ']') {
      flush_section("");
      current = t.substr(1, t.size() - 2);
      out << line << "\n";
      continue;
    }
    size_t line_eq = t.find('=');
    if (current == section && line_eq != std::string::npos &&
        trim(t.substr(0, line_eq)) == key && !replaced) {
      out << key << " = " << value << "\n";
      replaced = true;
      continue;
    }
    out << line << "\n";
  }
  flush_section("");
  if (!replaced) {
    // Section absent entirely: append it.
    if (current != section) out << "[" << section << "]\n";
    out << key << " = " << value << "\n";
  }
  return out.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.raw_text = text;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;

  bool dim_known = false;
  std::vector<std::pair<std::string, std::string>> phi_lines;  // (where, line)
  struct RawTerm {
    std::string gamma_text;
    bool normalize = false;
    std::vector<std::pair<std::string, std::string>> lines;
  };
  std::vector<RawTerm> raw_terms;
  RawTerm* open_term = nullptr;

  auto where_at = [&](int n) { return "line " + std::to_string(n); };

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (size_t h = t.find(" #"); h != std::string::npos) t = trim(t.substr(0, h));
    const std::string where = where_at(line_no);
    if (t.front() == '[' && t.back() == ']') {
      if (open_term) fail(where, "unterminated term block");
      section = t.substr(1, t.size() - 2);
      continue;
    }
    if (section == "phi") {
      if (t.rfind("anchor", 0) != 0) fail(where, "expected an anchor line in [phi]");
      phi_lines.emplace_back(where, trim(t.substr(6)));
      continue;
    }
    if (section == "longrange") {
      if (t.rfind("term", 0) == 0) {
        if (open_term) fail(where, "nested term block");
        auto toks = split_ws(trim(t.substr(4)));
        if (toks.empty()) fail(where, "term needs a weight");
        RawTerm raw;
        raw.gamma_text = toks[0];
        for (size_t i = 1; i < toks.size(); ++i) {
          if (toks[i] == "normalize")
            raw.normalize = true;
          else
            fail(where, "unknown term option '" + toks[i] + "'");
        }
        raw_terms.push_back(std::move(raw));
        open_term = &raw_terms.back();
        continue;
      }
      if (t == "endterm") {
        if (!open_term) fail(where, "endterm without term");
        open_term = nullptr;
        continue;
      }
      if (!open_term) fail(where, "anchor lines must sit inside a term block");
      if (t.rfind("anchor", 0) != 0) fail(where, "expected an anchor line in term block");
      open_term->lines.emplace_back(where, trim(t.substr(6)));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section == "lattice") {
      if (key == "d") {
        cfg.dim = static_cast<int>(parse_long(where, value));
        dim_known = true;
      } else if (key == "L")
        cfg.half_width = static_cast<int>(parse_long(where, value));
      else if (key == "L_list") {
        cfg.width_list.clear();
        for (const auto& tok : split_ws(value))
          cfg.width_list.push_back(static_cast<int>(parse_long(where, tok)));
      } else if (key == "spins")
        cfg.spins = split_ws(value);
      else if (key == "mode_cap")
        cfg.mode_cap = static_cast<int>(parse_long(where, value));
      else
        fail(where, "unknown lattice key '" + key + "'");
    } else if (section == "decay") {
      if (key == "varsigma")
        cfg.decay.varsigma = parse_double(where, value);
      else if (key == "epsilon")
        cfg.decay.epsilon = parse_double(where, value);
      else
        fail(where, "unknown decay key '" + key + "'");
    } else if (section == "thermo") {
      if (key == "beta")
        cfg.beta = parse_double(where, value);
      else if (key == "beta_list") {
        cfg.beta_list.clear();
        for (const auto& tok : split_ws(value)) cfg.beta_list.push_back(parse_double(where, tok));
      } else
        fail(where, "unknown thermo key '" + key + "'");
    } else if (section == "solver") {
      if (key == "damping")
        cfg.solver.damping = parse_double(where, value);
      else if (key == "restarts")
        cfg.solver.restarts = static_cast<int>(parse_long(where, value));
      else if (key == "max_iterations")
        cfg.solver.max_iterations = static_cast<int>(parse_long(where, value));
      else if (key == "fp_tol")
        cfg.solver.fp_tol = parse_double(where, value);
      else if (key == "cluster_tol")
        cfg.solver.cluster_tol = parse_double(where, value);
      else if (key == "coarse_step")
        cfg.solver.coarse_step = parse_double(where, value);
      else if (key == "grid_radius")
        cfg.grid.radius = parse_double(where, value);
      else if (key == "grid_step")
        cfg.grid.step = parse_double(where, value);
      else if (key == "grid_phases")
        cfg.grid.phases = static_cast<int>(parse_long(where, value));
      else if (key == "kms_panel")
        cfg.kms_panel = static_cast<int>(parse_long(where, value));
      else if (key == "samples")
        cfg.samples = static_cast<int>(parse_long(where, value));
      else if (key == "sweep_cap")
        cfg.sweep_cap = parse_long(where, value);
      else if (key == "probe_simple")
        cfg.probe_simple = parse_long(where, value) != 0;
      else
        fail(where, "unknown solver key '" + key + "'");
    } else if (section == "dynamics") {
      if (key == "t_final")
        cfg.t_final = parse_double(where, value);
      else if (key == "dt")
        cfg.flow.dt = parse_double(where, value);
      else if (key == "snapshot_interval")
        cfg.flow.snapshot_interval = parse_double(where, value);
      else if (key == "initial")
        cfg.initial_state = value;
      else
        fail(where, "unknown dynamics key '" + key + "'");
    } else if (section == "run") {
      if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_long(where, value));
      else if (key == "ell")
        cfg.sub_window = static_cast<int>(parse_long(where, value));
      else
        fail(where, "unknown run key '" + key + "'");
    } else {
      fail(where, "unknown section '" + section + "'");
    }
  }
  if (open_term) fail("end of file", "unterminated term block");
  if (!dim_known && (!phi_lines.empty() || !raw_terms.empty()))
    fail("config", "[lattice] d must come before model sections");

  cfg.decay.dim = cfg.dim;
  cfg.phi = Interaction(cfg.dim, "phi");
  for (const auto& [where, body] : phi_lines) parse_anchor_line(where, body, cfg.dim, cfg.phi);
  for (size_t i = 0; i < raw_terms.size(); ++i) {
    TermSpec spec;
    spec.psi = Interaction(cfg.dim, "psi" + std::to_string(i));
    spec.gamma_text = raw_terms[i].gamma_text;
    spec.gamma = parse_double("term weight", raw_terms[i].gamma_text);
    spec.normalize = raw_terms[i].normalize;
    for (const auto& [where, body] : raw_terms[i].lines)
      parse_anchor_line(where, body, cfg.dim, spec.psi);
    if (spec.psi.empty()) fail("term " + std::to_string(i), "term has no anchor lines");
    cfg.terms.push_back(std::move(spec));
  }
  // validation
  if (cfg.beta <= 0.0 || cfg.beta > 200.0) fail("thermo.beta", "must lie in (0, 200]");
  for (double b : cfg.beta_list)
    if (b <= 0.0 || b > 200.0) fail("thermo.beta_list", "entries must lie in (0, 200]");
  if (cfg.solver.fp_tol <= 0.0) fail("solver.fp_tol", "must be positive");
  if (cfg.solver.cluster_tol <= 0.0) fail("solver.cluster_tol", "must be positive");
  if (cfg.grid.step <= 0.0) fail("solver.grid_step", "must be positive");
  if (cfg.flow.dt <= 0.0) fail("dynamics.dt", "must be positive");
  if (cfg.spins.empty()) fail("lattice.spins", "must be non-empty");
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  for (const auto& kv : overrides) text = apply_override(text, kv);
  return parse_config_text(text);
}

LongRangeModel build_model(const ExperimentConfig& cfg, ModelBuildReport* report) {
  ModelBuildReport rep;
  std::vector<LongRangeTerm> terms;
  for (const auto& spec : cfg.terms) {
    LongRangeTerm t;
    t.psi = spec.psi;
    t.gamma = spec.gamma;
    double n = interaction_norm(spec.psi, cfg.decay);
    rep.raw_norms.push_back(n);
    bool scaled = false;
    if (spec.normalize && std::abs(n - 1.0) > 1e-12) {
      if (n <= 0.0) fail("term '" + spec.psi.label() + "'", "cannot normalize a zero interaction");
      t.psi = scale_interaction(spec.psi, 1.0 / n);
      t.psi.set_label(spec.psi.label());
      t.gamma = spec.gamma * n * n;
      scaled = true;
    }
    rep.normalized.push_back(scaled);
    terms.push_back(std::move(t));
  }
  LongRangeModel m = make_long_range_model(cfg.phi, std::move(terms), cfg.decay,
                                           &rep.symmetrization);
  if (report) *report = rep;
  return m;
}

FockContext context_for(const ExperimentConfig& cfg, int half_width) {
  return build_fock_context(cfg.dim, half_width, cfg.spins, cfg.mode_cap);
}

std::vector<int> effective_widths(const ExperimentConfig& cfg) {
  if (!cfg.width_list.empty()) return cfg.width_list;
  return {cfg.half_width};
}

std::vector<double> effective_betas(const ExperimentConfig& cfg) {
  if (!cfg.beta_list.empty()) return cfg.beta_list;
  return {cfg.beta};
}

namespace {

std::string format_offset(const IntVector& o) {
  std::string s;
  for (int i = 0; i < o.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(o[i]);
  }
  return s;
}

std::string format_complex(Complex c) {
  char buf[80];
  if (c.imag() == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17g", c.real());
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", c.real(), c.imag());
  return buf;
}

}  // namespace

std::string serialize_interaction(const Interaction& phi) {
  std::string out;
  for (const auto& anchor : phi.anchors()) {
    for (const auto& mono : anchor.poly) {
      out += "anchor ";
      for (size_t i = 0; i < anchor.support.size(); ++i) {
        if (i) out += ' ';
        out += format_offset(anchor.support[i]);
      }
      out += " : " + format_complex(mono.coeff) + " : ";
      for (const auto& f : mono.factors) {
        out += f.dagger ? "adag(" : "a(";
        std::string off = format_offset(f.offset);
        for (auto& ch : off)
          if (ch == ',') ch = ' ';
        out += off + "," + f.spin + ") ";
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out += '\n';
    }
  }
  return out;
}

}  // namespace mflab
