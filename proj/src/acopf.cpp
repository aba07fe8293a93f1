#include "polyopt/acopf.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "polyopt/errors.hpp"

namespace polyopt {

int Network::bus_index(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return static_cast<int>(i);
  }
  throw InputError("unknown bus id " + std::to_string(id));
}

bool Network::has_gen(int bus_id) const {
  for (const auto& g : gens) {
    if (g.bus == bus_id) return true;
  }
  return false;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool starts_with(const std::string& s, const std::string& p) {
  return s.rfind(p, 0) == 0;
}

double parse_number(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed value '" + tok + "'", line);
  }
}

struct RawTable {
  bool present = false;
  int header_line = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;
};

std::vector<std::string> split_tokens(const std::string& chunk) {
  std::string cleaned = chunk;
  for (char& c : cleaned) {
    if (c == ',' || c == '\t') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void append_rows(RawTable& tab, const std::string& content, int line) {
  std::stringstream in(content);
  std::string chunk;
  while (std::getline(in, chunk, ';')) {
    auto toks = split_tokens(chunk);
    if (toks.empty()) continue;
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& t : toks) row.push_back(parse_number(t, line));
    tab.rows.push_back(std::move(row));
    tab.lines.push_back(line);
  }
}

void check_columns(const RawTable& tab, const std::string& name, std::size_t min_cols) {
  if (!tab.present) throw ParseError("missing table mpc." + name, 0);
  if (!tab.rows.empty() && tab.rows.front().size() < min_cols) {
    throw ParseError("mpc." + name + " needs at least " + std::to_string(min_cols) +
                         " columns",
                     tab.lines.front());
  }
  for (std::size_t i = 1; i < tab.rows.size(); ++i) {
    if (tab.rows[i].size() != tab.rows.front().size()) {
      throw ParseError("inconsistent column count in mpc." + name, tab.lines[i]);
    }
  }
}

}  // namespace

Network parse_matpower(const std::string& text) {
  std::map<std::string, RawTable> tables;
  double base = 0.0;
  bool have_base = false;
  std::vector<std::string> warnings;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string block;   // mpc field currently being filled; "" outside blocks
  char closer = 0;     // ']' or '}'
  RawTable* tab = nullptr;  // null while skipping an unknown block

  auto feed = [&](const std::string& content, int line) {
    std::size_t end = content.find(closer);
    std::string body = end == std::string::npos ? content : content.substr(0, end);
    if (tab) append_rows(*tab, body, line);
    if (end != std::string::npos) {
      block.clear();
      tab = nullptr;
    }
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    std::size_t cmt = line.find('%');
    if (cmt != std::string::npos) line = line.substr(0, cmt);
    line = trim(line);
    if (line.empty()) continue;

    if (!block.empty()) {
      feed(line, lineno);
      continue;
    }
    if (starts_with(line, "function")) continue;
    if (!starts_with(line, "mpc.")) {
      warnings.push_back("line " + std::to_string(lineno) + ": ignored '" + line + "'");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected '=' after field", lineno);
    std::string name = trim(line.substr(4, eq - 4));
    std::string rhs = trim(line.substr(eq + 1));
    if (name == "version") {
      if (rhs.find('2') == std::string::npos) {
        warnings.push_back("line " + std::to_string(lineno) +
                           ": case format version is not 2");
      }
      continue;
    }
    if (name == "baseMVA") {
      std::string tok = rhs;
      if (!tok.empty() && tok.back() == ';') tok = trim(tok.substr(0, tok.size() - 1));
      base = parse_number(tok, lineno);
      have_base = true;
      continue;
    }
    if (!rhs.empty() && (rhs[0] == '[' || rhs[0] == '{')) {
      bool known = name == "bus" || name == "gen" || name == "branch" || name == "gencost";
      closer = rhs[0] == '[' ? ']' : '}';
      block = name;
      if (known) {
        tab = &tables[name];
        tab->present = true;
        tab->header_line = lineno;
      } else {
        tab = nullptr;
        warnings.push_back("line " + std::to_string(lineno) + ": ignored field mpc." + name);
      }
      feed(rhs.substr(1), lineno);
      continue;
    }
    warnings.push_back("line " + std::to_string(lineno) + ": ignored field mpc." + name);
  }
  if (!block.empty()) throw ParseError("unterminated mpc." + block + " table", lineno);
  if (!have_base) throw ParseError("missing mpc.baseMVA", 0);
  if (base <= 0.0) throw ParseError("mpc.baseMVA must be positive", 0);

  check_columns(tables["bus"], "bus", 13);
  check_columns(tables["gen"], "gen", 10);
  check_columns(tables["branch"], "branch", 11);
  check_columns(tables["gencost"], "gencost", 4);

  Network net;
  net.base_mva = base;

  std::set<int> bus_ids;
  const RawTable& bus_tab = tables["bus"];
  for (std::size_t i = 0; i < bus_tab.rows.size(); ++i) {
    const auto& r = bus_tab.rows[i];
    BusRow b;
    b.id = static_cast<int>(r[0]);
    b.type = static_cast<int>(r[1]);
    b.pd = r[2] / base;
    b.qd = r[3] / base;
    b.gs = r[4] / base;
    b.bs = r[5] / base;
    b.vm = r[7];
    b.va = r[8];
    b.vmax = r[11];
    b.vmin = r[12];
    if (!bus_ids.insert(b.id).second) {
      throw ParseError("duplicate bus id " + std::to_string(b.id), bus_tab.lines[i]);
    }
    net.buses.push_back(b);
  }

  const RawTable& gen_tab = tables["gen"];
  const RawTable& cost_tab = tables["gencost"];
  if (gen_tab.rows.size() != cost_tab.rows.size()) {
    throw ParseError("mpc.gencost must have one row per generator",
                     cost_tab.present ? cost_tab.header_line : 0);
  }
  if (!gen_tab.rows.empty() && gen_tab.rows.front().size() > 10) {
    warnings.push_back("extra generator columns ignored");
  }
  bool warned_startup = false;
  for (std::size_t i = 0; i < gen_tab.rows.size(); ++i) {
    const auto& r = gen_tab.rows[i];
    const auto& c = cost_tab.rows[i];
    if (r[7] <= 0.0) {
      warnings.push_back("line " + std::to_string(gen_tab.lines[i]) +
                         ": out-of-service generator skipped");
      continue;
    }
    GenRow g;
    g.bus = static_cast<int>(r[0]);
    g.pg = r[1] / base;
    g.qg = r[2] / base;
    g.qmax = r[3] / base;
    g.qmin = r[4] / base;
    g.vg = r[5];
    g.pmax = r[8] / base;
    g.pmin = r[9] / base;
    if (bus_ids.find(g.bus) == bus_ids.end()) {
      throw ParseError("generator references unknown bus " + std::to_string(g.bus),
                       gen_tab.lines[i]);
    }
    int model = static_cast<int>(c[0]);
    int ncost = static_cast<int>(c[3]);
    if (model != 2) {
      throw ParseError("only polynomial cost model 2 is supported", cost_tab.lines[i]);
    }
    if ((c[1] != 0.0 || c[2] != 0.0) && !warned_startup) {
      warnings.push_back("startup/shutdown costs ignored");
      warned_startup = true;
    }
    if (ncost < 2 || ncost > 3 || c.size() < static_cast<std::size_t>(4 + ncost)) {
      throw ParseError("cost polynomial must have 2 or 3 coefficients",
                       cost_tab.lines[i]);
    }
    if (ncost == 3) {
      g.c2 = c[4];
      g.c1 = c[5];
      g.c0 = c[6];
    } else {
      g.c1 = c[4];
      g.c0 = c[5];
    }
    net.gens.push_back(g);
  }

  const RawTable& br_tab = tables["branch"];
  bool warned_angles = false;
  for (std::size_t i = 0; i < br_tab.rows.size(); ++i) {
    const auto& r = br_tab.rows[i];
    if (r[10] <= 0.0) {
      warnings.push_back("line " + std::to_string(br_tab.lines[i]) +
                         ": out-of-service branch skipped");
      continue;
    }
    BranchRow b;
    b.from = static_cast<int>(r[0]);
    b.to = static_cast<int>(r[1]);
    b.r = r[2];
    b.x = r[3];
    b.b = r[4];
    b.rate_a = r[5] / base;
    b.tap = r[8];
    b.shift = r[9];
    if (bus_ids.find(b.from) == bus_ids.end() || bus_ids.find(b.to) == bus_ids.end()) {
      throw ParseError("branch endpoint references unknown bus", br_tab.lines[i]);
    }
    if (b.shift != 0.0) {
      warnings.push_back("line " + std::to_string(br_tab.lines[i]) +
                         ": phase shift ignored");
      b.shift = 0.0;
    }
    if (r.size() >= 13 && !warned_angles) {
      auto nontrivial = [](double a) { return a != 0.0 && std::abs(a) != 360.0; };
      if (nontrivial(r[11]) || nontrivial(r[12])) {
        warnings.push_back("branch angle difference limits ignored");
        warned_angles = true;
      }
    }
    net.branches.push_back(b);
  }

  net.warnings = std::move(warnings);
  return net;
}

namespace {

// 2x2 admittance block of one branch: (self, other) row entries seen from the
// chosen end under MATPOWER's from-side off-nominal tap convention.
struct EndAdmittance {
  std::complex<double> self, other;
  int self_bus, other_bus;  // bus-array positions
};

EndAdmittance end_admittance(const Network& net, const BranchRow& br, bool from_side) {
  std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
  std::complex<double> ych(0.0, br.b / 2.0);
  double tap = br.tap == 0.0 ? 1.0 : br.tap;
  EndAdmittance e;
  if (from_side) {
    e.self = (ys + ych) / (tap * tap);
    e.self_bus = net.bus_index(br.from);
    e.other_bus = net.bus_index(br.to);
  } else {
    e.self = ys + ych;
    e.self_bus = net.bus_index(br.to);
    e.other_bus = net.bus_index(br.from);
  }
  e.other = -ys / tap;
  return e;
}

}  // namespace

std::pair<std::vector<Polynomial>, std::vector<Polynomial>> injection_polynomials(
    const Network& net) {
  const int N = static_cast<int>(net.buses.size());
  const int n = 2 * N;
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(N, N);
  for (const auto& br : net.branches) {
    EndAdmittance f = end_admittance(net, br, true);
    EndAdmittance t = end_admittance(net, br, false);
    Y(f.self_bus, f.self_bus) += f.self;
    Y(f.self_bus, f.other_bus) += f.other;
    Y(t.self_bus, t.self_bus) += t.self;
    Y(t.self_bus, t.other_bus) += t.other;
  }
  for (int k = 0; k < N; ++k) Y(k, k) += std::complex<double>(net.buses[k].gs, net.buses[k].bs);

  std::vector<Polynomial> p, q;
  p.reserve(N);
  q.reserve(N);
  for (int k = 0; k < N; ++k) {
    Polynomial pk(n), qk(n);
    for (int i = 0; i < N; ++i) {
      double G = Y(k, i).real(), B = Y(k, i).imag();
      if (G == 0.0 && B == 0.0) continue;
      Exponent ee = Exponent::unit(n, k).plus(Exponent::unit(n, i));
      Exponent ef = Exponent::unit(n, k).plus(Exponent::unit(n, N + i));
      Exponent fe = Exponent::unit(n, N + k).plus(Exponent::unit(n, i));
      Exponent ff = Exponent::unit(n, N + k).plus(Exponent::unit(n, N + i));
      pk.add_term(ee, G);
      pk.add_term(ef, -B);
      pk.add_term(fe, B);
      pk.add_term(ff, G);
      qk.add_term(fe, G);
      qk.add_term(ff, -B);
      qk.add_term(ee, -B);
      qk.add_term(ef, -G);
    }
    p.push_back(std::move(pk));
    q.push_back(std::move(qk));
  }
  return {std::move(p), std::move(q)};
}

std::pair<Polynomial, Polynomial> branch_flow(const Network& net, int b, bool from_side,
                                              bool alt_form) {
  if (b < 0 || b >= static_cast<int>(net.branches.size())) {
    throw InputError("branch index out of range");
  }
  const BranchRow& br = net.branches[b];
  const int N = static_cast<int>(net.buses.size());
  const int n = 2 * N;
  EndAdmittance ea = end_admittance(net, br, from_side);
  const int l = ea.self_bus, m = ea.other_bus;
  Exponent el2 = Exponent::unit(n, l).plus(Exponent::unit(n, l));
  Exponent fl2 = Exponent::unit(n, N + l).plus(Exponent::unit(n, N + l));
  Exponent elem = Exponent::unit(n, l).plus(Exponent::unit(n, m));
  Exponent flfm = Exponent::unit(n, N + l).plus(Exponent::unit(n, N + m));
  Exponent flem = Exponent::unit(n, N + l).plus(Exponent::unit(n, m));
  Exponent elfm = Exponent::unit(n, l).plus(Exponent::unit(n, N + m));

  Polynomial P(n), Q(n);
  if (!alt_form) {
    double gss = ea.self.real(), bss = ea.self.imag();
    double gto = ea.other.real(), bto = ea.other.imag();
    P.add_term(el2, gss);
    P.add_term(fl2, gss);
    P.add_term(elem, gto);
    P.add_term(flfm, gto);
    P.add_term(flem, bto);
    P.add_term(elfm, -bto);
    Q.add_term(el2, -bss);
    Q.add_term(fl2, -bss);
    Q.add_term(flem, gto);
    Q.add_term(elfm, -gto);
    Q.add_term(elem, -bto);
    Q.add_term(flfm, -bto);
  } else {
    // Displayed reactive-flow expression; series g + jb and shunt b̄ applied
    // without tap handling.  Kept for comparison only — it is not consistent
    // with the bus injection model (see README).
    std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
    double g = ys.real(), bb = ys.imag(), half_sh = br.b / 2.0;
    P.add_term(elfm, bb);
    P.add_term(flem, -bb);
    P.add_term(el2, g);
    P.add_term(fl2, g);
    P.add_term(flfm, -g);
    P.add_term(elem, -g);
    Q.add_term(elfm, bb);
    Q.add_term(flfm, -bb);
    Q.add_term(el2, -bb - half_sh);
    Q.add_term(fl2, -bb - half_sh);
    Q.add_term(elfm, g);
    Q.add_term(flem, -2.0 * g);
  }
  return {std::move(P), std::move(Q)};
}

namespace {

struct Builder {
  Pop pop;
  std::vector<std::string> labels;

  void add(Polynomial g, ConstraintKind kind, const std::string& label) {
    pop.constraints.push_back(std::move(g));
    pop.kinds.push_back(kind);
    labels.push_back(label);
  }

  // Emits lo <= value(x) <= hi as two inequalities, or one equality if lo = hi.
  void bound(const Polynomial& value, double lo, double hi, const std::string& prefix,
             const std::string& where) {
    const int n = value.var_count();
    if (lo == hi) {
      add(value - Polynomial::constant(n, hi), ConstraintKind::Equality,
          prefix + "-fixed@" + where);
      return;
    }
    add(Polynomial::constant(n, hi) - value, ConstraintKind::Inequality,
        prefix + "-upper@" + where);
    add(value - Polynomial::constant(n, lo), ConstraintKind::Inequality,
        prefix + "-lower@" + where);
  }
};

}  // namespace

AcopfPop build_pop(const Network& net, const BuildOptions& opt) {
  const int N = static_cast<int>(net.buses.size());
  if (N == 0) throw InputError("network has no buses");
  const int n = 2 * N;
  const double base = net.base_mva;

  int slack = -1;
  for (int k = 0; k < N; ++k) {
    if (net.buses[k].type == 3) {
      if (slack >= 0) throw InputError("multiple reference buses");
      slack = k;
    }
  }
  if (slack < 0) throw InputError("no reference bus (type 3)");

  std::map<int, const GenRow*> gen_at;
  for (const auto& g : net.gens) {
    if (!gen_at.emplace(g.bus, &g).second) {
      throw InputError("multiple generators at bus " + std::to_string(g.bus) +
                       " are not supported");
    }
  }

  AcopfPop out;
  out.n_bus = N;
  auto inj = injection_polynomials(net);
  out.p_inj = std::move(inj.first);
  out.q_inj = std::move(inj.second);

  Builder b;
  b.pop.n = n;
  b.pop.objective = Polynomial(n);

  // Cost applies to megawatt generation: Pg[MW] = base * (P_k(x) + Pd_k).
  for (const auto& g : net.gens) {
    int k = net.bus_index(g.bus);
    Polynomial pg = out.p_inj[k] + Polynomial::constant(n, net.buses[k].pd);
    b.pop.objective += (g.c2 * base * base) * (pg * pg) + (g.c1 * base) * pg +
                       Polynomial::constant(n, g.c0);
  }

  for (int k = 0; k < N; ++k) {
    const BusRow& bus = net.buses[k];
    std::string where = "bus " + std::to_string(bus.id);
    Polynomial pg = out.p_inj[k] + Polynomial::constant(n, bus.pd);
    auto it = gen_at.find(bus.id);
    if (it != gen_at.end()) {
      b.bound(pg, it->second->pmin, it->second->pmax, "P", where);
    } else {
      b.bound(pg, 0.0, 0.0, "P", where);
    }
  }
  for (int k = 0; k < N; ++k) {
    const BusRow& bus = net.buses[k];
    std::string where = "bus " + std::to_string(bus.id);
    Polynomial qg = out.q_inj[k] + Polynomial::constant(n, bus.qd);
    auto it = gen_at.find(bus.id);
    if (it != gen_at.end()) {
      b.bound(qg, it->second->qmin, it->second->qmax, "Q", where);
    } else {
      b.bound(qg, 0.0, 0.0, "Q", where);
    }
  }
  for (int k = 0; k < N; ++k) {
    const BusRow& bus = net.buses[k];
    Polynomial vsq(n);
    vsq.add_term(Exponent::unit(n, k).plus(Exponent::unit(n, k)), 1.0);
    vsq.add_term(Exponent::unit(n, N + k).plus(Exponent::unit(n, N + k)), 1.0);
    b.bound(vsq, bus.vmin * bus.vmin, bus.vmax * bus.vmax, "V",
            "bus " + std::to_string(bus.id));
  }
  b.add(Polynomial::variable(n, N + slack), ConstraintKind::Equality,
        "angle-ref@bus " + std::to_string(net.buses[slack].id));
  for (std::size_t e = 0; e < net.branches.size(); ++e) {
    const BranchRow& br = net.branches[e];
    if (br.rate_a <= 0.0) continue;  // MATPOWER convention: 0 = unlimited
    double s2 = br.rate_a * br.rate_a;
    auto emit = [&](bool from_side) {
      auto [P, Q] = branch_flow(net, static_cast<int>(e), from_side, opt.alt_flow_form);
      Polynomial lim = Polynomial::constant(n, s2) - P * P - Q * Q;
      int a = from_side ? br.from : br.to;
      int c = from_side ? br.to : br.from;
      b.add(std::move(lim), ConstraintKind::Inequality,
            "S-limit@branch " + std::to_string(a) + "-" + std::to_string(c));
    };
    emit(true);
    if (opt.both_end_limits) emit(false);
  }

  out.pop = Pop(n, std::move(b.pop.objective), std::move(b.pop.constraints),
                std::move(b.pop.kinds));
  out.labels = std::move(b.labels);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (!out.label_index.emplace(out.labels[i], static_cast<int>(i)).second) {
      throw InputError("duplicate constraint label " + out.labels[i]);
    }
  }
  return out;
}

Eigen::VectorXd reference_point(const Network& net) {
  const int N = static_cast<int>(net.buses.size());
  Eigen::VectorXd x(2 * N);
  const double deg = std::acos(-1.0) / 180.0;
  for (int k = 0; k < N; ++k) {
    x[k] = net.buses[k].vm * std::cos(net.buses[k].va * deg);
    x[N + k] = net.buses[k].vm * std::sin(net.buses[k].va * deg);
  }
  return x;
}

double reference_objective(const Network& net) {
  double total = 0.0;
  for (const auto& g : net.gens) {
    double mw = g.pg * net.base_mva;
    total += g.c2 * mw * mw + g.c1 * mw + g.c0;
  }
  return total;
}

int reduced_kkt_degree(const AcopfPop& apop, const ActiveSet& active) {
  return reduce(apop.pop, active).max_degree();
}

}  // namespace polyopt
